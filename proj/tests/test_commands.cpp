#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "beliefsim/commands.hpp"
#include "beliefsim/errors.hpp"
#include "fixtures.hpp"

using namespace beliefsim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string two_agent_config_text() {
  return R"({
    "states": {"names": ["A", "B"], "true_state": 0},
    "agents": [
      {"signals": ["s0", "s1"], "likelihood": [[0.8, 0.2], [0.2, 0.8]]},
      {"signals": ["s0", "s1"], "likelihood": [[0.8, 0.2], [0.2, 0.8]]}
    ],
    "network": {"matrix": [[0.6, 0.4], [0.4, 0.6]]},
    "run": {"rule": "geometric-sample", "horizon": 300, "thinning": 10, "seeds": [1]},
    "diagnostics": {"threshold": 0.95, "burn_in": 50, "beta_fraction": 0.5}
  })";
}

fs::path write_config(const TempDir& dir, const std::string& text) {
  const fs::path path = dir.path / "config.json";
  std::ofstream out(path);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("effective seeds honor overrides") {
  ConfigDoc doc;
  doc.seeds = {5, 6};
  CHECK(effective_seeds(doc, std::nullopt, std::nullopt) == std::vector<std::uint64_t>{5, 6});
  CHECK(effective_seeds(doc, 9, std::nullopt) == std::vector<std::uint64_t>{9});
  CHECK(effective_seeds(doc, std::nullopt, 3) == std::vector<std::uint64_t>{5, 6, 7});
  CHECK(effective_seeds(doc, 10, 2) == std::vector<std::uint64_t>{10, 11});
  CHECK_THROWS_AS(effective_seeds(doc, std::nullopt, 0), ValidationError);
}

TEST_CASE("cmd_run writes traces and a summary for each seed") {
  TempDir dir("bs_run_test");
  const auto config_path = write_config(dir, two_agent_config_text());

  RunOptions options;
  options.config_path = config_path;
  options.out_dir = dir.path / "out";
  std::ostringstream out, err;
  REQUIRE(cmd_run(options, out, err) == kExitOk);

  CHECK(fs::exists(dir.path / "out" / "trace_seed1.csv"));
  REQUIRE(fs::exists(dir.path / "out" / "summary.json"));
  const auto summary = nlohmann::json::parse(read_text_file(dir.path / "out" / "summary.json"));
  CHECK(summary.at("runs").size() == 1);
  CHECK(summary.at("runs").at(0).at("agents").size() == 2);
  CHECK(summary.at("runs").at(0).at("invariant_violations") == 0);
}

TEST_CASE("seed override changes the effective hash but not the base hash") {
  TempDir dir("bs_seed_override");
  const auto config_path = write_config(dir, two_agent_config_text());

  RunOptions base;
  base.config_path = config_path;
  base.out_dir = dir.path / "a";
  std::ostringstream out, err;
  REQUIRE(cmd_run(base, out, err) == kExitOk);

  RunOptions overridden = base;
  overridden.out_dir = dir.path / "b";
  overridden.seed = 42;
  REQUIRE(cmd_run(overridden, out, err) == kExitOk);

  const auto sa = nlohmann::json::parse(read_text_file(dir.path / "a" / "summary.json"));
  const auto sb = nlohmann::json::parse(read_text_file(dir.path / "b" / "summary.json"));
  CHECK(sa.at("base_config_hash") == sb.at("base_config_hash"));
  CHECK(sa.at("runs").at(0).at("effective_config_hash") !=
        sb.at("runs").at(0).at("effective_config_hash"));
  CHECK(sb.at("runs").at(0).at("seed") == 42);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  TempDir dir("bs_rerun");
  const auto config_path = write_config(dir, two_agent_config_text());

  for (const char* sub : {"first", "second"}) {
    RunOptions options;
    options.config_path = config_path;
    options.out_dir = dir.path / sub;
    std::ostringstream out, err;
    REQUIRE(cmd_run(options, out, err) == kExitOk);
  }
  CHECK(read_text_file(dir.path / "first" / "trace_seed1.csv") ==
        read_text_file(dir.path / "second" / "trace_seed1.csv"));
  CHECK(read_text_file(dir.path / "first" / "summary.json") ==
        read_text_file(dir.path / "second" / "summary.json"));
}

TEST_CASE("cmd_run maps failures to the documented exit codes") {
  TempDir dir("bs_exit_codes");

  RunOptions options;
  options.config_path = dir.path / "missing.json";
  options.out_dir = dir.path / "out";
  std::ostringstream out, err;
  CHECK(cmd_run(options, out, err) == kExitIoFailure);

  const auto bad_config = write_config(dir, "{\"states\": {}}");
  options.config_path = bad_config;
  CHECK(cmd_run(options, out, err) == kExitValidationFailure);

  // out dir path occupied by a regular file
  const auto blocked = dir.path / "blocked";
  std::ofstream(blocked) << "x";
  options.config_path = write_config(dir, two_agent_config_text());
  options.out_dir = blocked;
  CHECK(cmd_run(options, out, err) == kExitIoFailure);
}

TEST_CASE("cmd_bounds reports the chain recursion over stdout") {
  TempDir dir("bs_bounds");
  const std::string text = R"({
    "states": {"names": ["A", "B"], "true_state": 0},
    "agents": [
      {"signals": ["s0", "s1"], "likelihood": [[0.5, 0.5], [0.5, 0.5]]},
      {"signals": ["s0", "s1"], "likelihood": [[0.5, 0.5], [0.5, 0.5]]},
      {"signals": ["s0", "s1"], "likelihood": [[0.9, 0.1], [0.1, 0.9]]}
    ],
    "network": {"matrix": [[0.6, 0.4, 0.0], [0.0, 0.6, 0.4], [0.4, 0.0, 0.6]]},
    "run": {"rule": "geometric-sample", "horizon": 10, "thinning": 1, "seeds": [1]},
    "diagnostics": {}
  })";
  BoundsOptions options;
  options.config_path = write_config(dir, text);
  std::ostringstream out, err;
  REQUIRE(cmd_bounds(options, out, err) == kExitOk);
  const auto report = nlohmann::json::parse(out.str());
  const auto beta_bar = report.at("per_theta").at(0).at("beta_bar");
  REQUIRE(beta_bar.size() == 3);
  CHECK(std::abs(beta_bar.at(0).get<double>() - 0.75) <= 1e-12);
  CHECK(std::abs(beta_bar.at(1).get<double>() - 0.9) <= 1e-12);
  CHECK(std::abs(beta_bar.at(2).get<double>() - 0.96) <= 1e-12);
}

TEST_CASE("cmd_bounds warns about missing experts but exits zero") {
  TempDir dir("bs_bounds_warn");
  const std::string text = R"({
    "states": {"names": ["A", "B", "C"], "true_state": 0},
    "agents": [
      {"signals": ["s0", "s1"], "likelihood": [[0.9, 0.1], [0.1, 0.9], [0.9, 0.1]]},
      {"signals": ["s0", "s1"], "likelihood": [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]}
    ],
    "network": {"matrix": [[0.6, 0.4], [0.4, 0.6]]},
    "run": {"rule": "geometric-sample", "horizon": 10, "thinning": 1, "seeds": [1]},
    "diagnostics": {}
  })";
  BoundsOptions options;
  options.config_path = write_config(dir, text);
  std::ostringstream out, err;
  CHECK(cmd_bounds(options, out, err) == kExitOk);
  CHECK(err.str().find("no expert separates state 2") != std::string::npos);
  CHECK(err.str().find("collective distinguishability fails") != std::string::npos);
}

TEST_CASE("cmd_bounds writes to a file when asked") {
  TempDir dir("bs_bounds_file");
  BoundsOptions options;
  options.config_path = write_config(dir, two_agent_config_text());
  options.out_file = dir.path / "report.json";
  std::ostringstream out, err;
  REQUIRE(cmd_bounds(options, out, err) == kExitOk);
  CHECK(fs::exists(*options.out_file));
  const auto parsed = nlohmann::json::parse(read_text_file(*options.out_file));
  CHECK(parsed.contains("per_theta"));
}

TEST_CASE("cmd_verify passes on a fast-converging scenario") {
  TempDir dir("bs_verify_pass");
  const std::string text = R"({
    "states": {"names": ["A", "B", "C"], "true_state": 0},
    "agents": [
      {"signals": ["s0", "s1", "s2"], "likelihood": [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]},
      {"signals": ["s0", "s1", "s2"], "likelihood": [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]},
      {"signals": ["s0", "s1", "s2"], "likelihood": [[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]}
    ],
    "network": {"matrix": [[0.6, 0.4, 0.0], [0.0, 0.6, 0.4], [0.4, 0.0, 0.6]]},
    "run": {"rule": "geometric-sample", "horizon": 400, "thinning": 2, "seeds": [1]},
    "diagnostics": {"threshold": 0.95, "burn_in": 100, "beta_fraction": 0.5}
  })";
  VerifyOptions options;
  options.config_path = write_config(dir, text);
  options.out_dir = dir.path / "out";
  options.seeds_count = 6;
  std::ostringstream out, err;
  const int code = cmd_verify(options, out, err);
  INFO(out.str());
  CHECK(code == kExitOk);
  CHECK(fs::exists(dir.path / "out" / "bound_report.json"));
  CHECK(fs::exists(dir.path / "out" / "criteria.json"));
  CHECK(out.str().find("PASS") != std::string::npos);
}

TEST_CASE("cmd_verify fails with exit 3 when the horizon is too short") {
  TempDir dir("bs_verify_fail");
  std::string text = two_agent_config_text();
  VerifyOptions options;
  options.config_path = write_config(dir, text);
  options.out_dir = dir.path / "out";
  options.seeds_count = 4;
  std::ostringstream out, err;

  // horizon 2 cannot reach the 0.95 hold under these likelihoods
  const std::string short_text = [&] {
    auto t = text;
    const std::string needle = "\"horizon\": 300";
    t.replace(t.find(needle), needle.size(), "\"horizon\": 2");
    return t;
  }();
  options.config_path = write_config(dir, short_text);
  const int code = cmd_verify(options, out, err);
  CHECK(code == kExitCriteriaFailure);
  CHECK(fs::exists(dir.path / "out" / "bound_report.json"));  // report still written
  CHECK(out.str().find("FAIL") != std::string::npos);
}

TEST_CASE("cmd_verify marks convergence not-applicable for sample-arithmetic") {
  TempDir dir("bs_verify_na");
  std::string text = two_agent_config_text();
  const std::string needle = "\"rule\": \"geometric-sample\"";
  text.replace(text.find(needle), needle.size(), "\"rule\": \"sample-arithmetic\"");
  VerifyOptions options;
  options.config_path = write_config(dir, text);
  options.out_dir = dir.path / "out";
  options.seeds_count = 3;
  std::ostringstream out, err;
  const int code = cmd_verify(options, out, err);
  INFO(out.str());
  CHECK(code == kExitOk);
  CHECK(out.str().find("N/A") != std::string::npos);
}

TEST_CASE("cmd_gen emits a runnable, collectively distinguishable config") {
  TempDir dir("bs_gen");
  GenOptions options;
  options.kind = ScenarioKind::Ring;
  options.n = 5;
  options.m = 2;
  options.seed = 3;
  options.out_path = dir.path / "generated.json";
  std::ostringstream out, err;
  REQUIRE(cmd_gen(options, out, err) == kExitOk);

  const auto doc = load_config(options.out_path);
  const auto config = build_sim_config(doc);
  const auto report = distinguishability(config.model, config.space);
  CHECK(report.collective);

  // the generated config runs end to end
  RunOptions run_options;
  run_options.config_path = options.out_path;
  run_options.out_dir = dir.path / "out";
  run_options.horizon = 20;
  run_options.seeds_count = 1;
  CHECK(cmd_run(run_options, out, err) == kExitOk);
}

TEST_CASE("cmd_gen is byte-reproducible for a fixed seed") {
  TempDir dir("bs_gen_repro");
  for (const char* name : {"a.json", "b.json"}) {
    GenOptions options;
    options.kind = ScenarioKind::Random;
    options.n = 4;
    options.m = 3;
    options.edge_prob = 0.5;
    options.seed = 11;
    options.out_path = dir.path / name;
    std::ostringstream out, err;
    REQUIRE(cmd_gen(options, out, err) == kExitOk);
  }
  CHECK(read_text_file(dir.path / "a.json") == read_text_file(dir.path / "b.json"));
}

TEST_CASE("cmd_gen with many states keeps every pair separated") {
  TempDir dir("bs_gen_many");
  GenOptions options;
  options.kind = ScenarioKind::Star;
  options.n = 3;
  options.m = 6;  // more wrong states than agents: round-robin reuses agents
  options.seed = 21;
  options.out_path = dir.path / "gen.json";
  std::ostringstream out, err;
  REQUIRE(cmd_gen(options, out, err) == kExitOk);
  const auto doc = load_config(options.out_path);
  const auto report = distinguishability(doc.model, doc.space);
  CHECK(report.collective);
}
