#include "beliefsim/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "beliefsim/errors.hpp"

namespace beliefsim {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad_config(const std::string& message) {
  throw ValidationError(ErrorCode::BadConfig, message);
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const char* context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) bad_config(std::string("unknown key '") + item.key() + "' in " + context);
  }
}

Matrix parse_matrix(const json& rows, const char* context) {
  if (!rows.is_array()) bad_config(std::string(context) + " must be an array of rows");
  Matrix out;
  for (const auto& row : rows) {
    if (!row.is_array()) bad_config(std::string(context) + " rows must be arrays");
    out.push_back(row.get<std::vector<double>>());
  }
  return out;
}

std::string_view scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Ring: return "ring";
    case ScenarioKind::Star: return "star";
    case ScenarioKind::Random: return "random";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "ring") return ScenarioKind::Ring;
  if (name == "star") return ScenarioKind::Star;
  if (name == "random") return ScenarioKind::Random;
  bad_config("unknown generator kind '" + name + "'");
}

json space_to_json(const StateSpace& space) {
  return json{{"names", space.states}, {"true_state", space.true_state}};
}

json model_to_json(const LikelihoodModel& model) {
  json agents = json::array();
  for (const AgentSensor& sensor : model.agents) {
    agents.push_back(json{{"signals", sensor.signals}, {"likelihood", sensor.likelihood}});
  }
  return agents;
}

}  // namespace

ConfigDoc parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& err) {
    bad_config(std::string("not valid JSON: ") + err.what());
  }
  try {
    if (!root.is_object()) bad_config("top level must be an object");
    require_keys(root, {"states", "agents", "network", "run", "diagnostics"}, "config");

    ConfigDoc doc;

    const json& states = root.at("states");
    require_keys(states, {"names", "true_state"}, "states");
    doc.space.states = states.at("names").get<std::vector<std::string>>();
    const json& true_state = states.at("true_state");
    if (true_state.is_string()) {
      const std::string name = true_state.get<std::string>();
      doc.space.true_state = -1;
      for (std::size_t k = 0; k < doc.space.states.size(); ++k) {
        if (doc.space.states[k] == name) doc.space.true_state = static_cast<int>(k);
      }
      if (doc.space.true_state < 0) bad_config("true_state '" + name + "' not in states.names");
    } else {
      doc.space.true_state = true_state.get<int>();
    }

    for (const json& agent : root.at("agents")) {
      require_keys(agent, {"signals", "likelihood"}, "agents[]");
      AgentSensor sensor;
      sensor.signals = agent.at("signals").get<std::vector<std::string>>();
      sensor.likelihood = parse_matrix(agent.at("likelihood"), "agents[].likelihood");
      doc.model.agents.push_back(std::move(sensor));
    }

    const json& network = root.at("network");
    require_keys(network, {"matrix", "generator"}, "network");
    if (network.contains("matrix") == network.contains("generator")) {
      bad_config("network needs exactly one of 'matrix' or 'generator'");
    }
    if (network.contains("matrix")) {
      doc.network_matrix = parse_matrix(network.at("matrix"), "network.matrix");
    } else {
      const json& gen = network.at("generator");
      require_keys(gen, {"kind", "n", "self_weight", "edge_prob", "seed"}, "network.generator");
      GeneratorSpec spec;
      spec.kind = parse_scenario_kind(gen.at("kind").get<std::string>());
      spec.n = gen.at("n").get<int>();
      if (gen.contains("self_weight")) spec.self_weight = gen.at("self_weight").get<double>();
      if (gen.contains("edge_prob")) spec.edge_prob = gen.at("edge_prob").get<double>();
      if (gen.contains("seed")) spec.seed = gen.at("seed").get<std::uint64_t>();
      doc.generator = spec;
    }

    const json& run = root.at("run");
    require_keys(run, {"rule", "horizon", "thinning", "seeds"}, "run");
    const auto rule = parse_rule(run.at("rule").get<std::string>());
    if (!rule) bad_config("unknown rule '" + run.at("rule").get<std::string>() + "'");
    doc.rule = *rule;
    doc.horizon = run.at("horizon").get<long long>();
    if (run.contains("thinning")) doc.thinning = run.at("thinning").get<long long>();
    if (run.contains("seeds")) {
      doc.seeds = run.at("seeds").get<std::vector<std::uint64_t>>();
      if (doc.seeds.empty()) bad_config("run.seeds must not be empty");
    }

    doc.diagnostics.burn_in = -1;
    if (root.contains("diagnostics")) {
      const json& diag = root.at("diagnostics");
      require_keys(diag, {"threshold", "burn_in", "beta_fraction"}, "diagnostics");
      if (diag.contains("threshold")) doc.diagnostics.threshold = diag.at("threshold").get<double>();
      if (diag.contains("burn_in")) doc.diagnostics.burn_in = diag.at("burn_in").get<long long>();
      if (diag.contains("beta_fraction")) {
        doc.diagnostics.beta_fraction = diag.at("beta_fraction").get<double>();
        if (!(doc.diagnostics.beta_fraction > 0.0) || !(doc.diagnostics.beta_fraction < 1.0)) {
          bad_config("diagnostics.beta_fraction must lie in (0, 1)");
        }
      }
    }
    return doc;
  } catch (const json::exception& err) {
    bad_config(std::string("malformed config: ") + err.what());
  }
}

ConfigDoc load_config(const std::filesystem::path& path) {
  return parse_config_text(read_text_file(path));
}

std::string serialize_config(const ConfigDoc& doc) {
  json root;
  root["states"] = space_to_json(doc.space);
  root["agents"] = model_to_json(doc.model);
  if (doc.network_matrix) {
    root["network"] = json{{"matrix", *doc.network_matrix}};
  } else {
    const GeneratorSpec& gen = *doc.generator;
    root["network"] = json{{"generator",
                            json{{"kind", std::string(scenario_kind_name(gen.kind))},
                                 {"n", gen.n},
                                 {"self_weight", gen.self_weight},
                                 {"edge_prob", gen.edge_prob},
                                 {"seed", gen.seed}}}};
  }
  root["run"] = json{{"rule", std::string(rule_name(doc.rule))},
                     {"horizon", doc.horizon},
                     {"thinning", doc.thinning},
                     {"seeds", doc.seeds}};
  root["diagnostics"] = json{{"threshold", doc.diagnostics.threshold},
                             {"burn_in", doc.diagnostics.burn_in},
                             {"beta_fraction", doc.diagnostics.beta_fraction}};
  return root.dump(2) + "\n";
}

SimulationConfig build_sim_config(const ConfigDoc& doc) {
  SimulationConfig config;
  config.space = doc.space;
  config.model = doc.model;

  Matrix weights;
  if (doc.network_matrix) {
    weights = *doc.network_matrix;
  } else {
    const GeneratorSpec& gen = *doc.generator;
    ScenarioParams params;
    params.self_weight = gen.self_weight;
    params.edge_prob = gen.edge_prob;
    RngStream rng(derive_stream_seed(gen.seed, 0, StreamPurpose::Scenario));
    weights = scenario_weights(gen.kind, gen.n, params, rng);
  }
  config.net = validate_network(std::move(weights));
  config.horizon = doc.horizon;
  config.thinning = doc.thinning;
  config.rule = doc.rule;
  config.seed = doc.seeds.front();
  validate_config(config);
  return config;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (char c : text) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hash_hex(std::string_view text) {
  const std::uint64_t h = fnv1a64(text);
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int k = 0; k < 16; ++k) {
    buf[15 - k] = digits[(h >> (4 * k)) & 0xF];
  }
  buf[16] = '\0';
  return std::string(buf);
}

std::string base_config_hash(const ConfigDoc& doc) { return hash_hex(serialize_config(doc)); }

// Hash of the effective per-run inputs; declared in engine.hpp.
std::string config_hash(const SimulationConfig& config) {
  json root;
  root["states"] = space_to_json(config.space);
  root["agents"] = model_to_json(config.model);
  root["network"] = config.net.weights;
  root["rule"] = std::string(rule_name(config.rule));
  root["horizon"] = config.horizon;
  root["thinning"] = config.thinning;
  root["seed"] = config.seed;
  return hash_hex(root.dump());
}

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
  out << "# config_hash=" << trace.config_hash << " seed=" << trace.seed
      << " rule=" << rule_name(trace.rule) << " m=" << trace.m << " n=" << trace.n
      << " thinning=" << trace.thinning << "\n";
  out << "t,agent,signal,action";
  for (int k = 0; k < trace.m; ++k) out << ",belief_" << k;
  for (int k = 0; k < trace.m; ++k) out << ",count_" << k;
  out << "\n";
  for (const RoundRecord& rec : trace.rounds) {
    for (int i = 0; i < trace.n; ++i) {
      const AgentRound& agent = rec.agents[static_cast<std::size_t>(i)];
      out << rec.t << ',' << i << ',' << agent.signal << ',' << agent.action;
      for (double p : agent.pooled) out << ',' << format_double(p);
      for (long long c : agent.counters) out << ',' << c;
      out << "\n";
    }
  }
}

std::string trace_csv_string(const SimulationTrace& trace) {
  std::ostringstream out;
  write_trace_csv(trace, out);
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string meta_value(const std::string& header, const std::string& key) {
  const std::string needle = key + "=";
  const std::size_t pos = header.find(needle);
  if (pos == std::string::npos) throw IoError("trace header missing " + key);
  const std::size_t begin = pos + needle.size();
  std::size_t end = header.find(' ', begin);
  if (end == std::string::npos) end = header.size();
  return header.substr(begin, end - begin);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc()) throw IoError("bad number in trace: '" + text + "'");
  return value;
}

long long parse_int(const std::string& text) {
  long long value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc()) throw IoError("bad integer in trace: '" + text + "'");
  return value;
}

}  // namespace

SimulationTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw IoError("trace file missing metadata header");
  }
  SimulationTrace trace;
  trace.config_hash = meta_value(line, "config_hash");
  trace.seed = static_cast<std::uint64_t>(std::stoull(meta_value(line, "seed")));
  const auto rule = parse_rule(meta_value(line, "rule"));
  if (!rule) throw IoError("trace header has unknown rule");
  trace.rule = *rule;
  trace.m = static_cast<int>(parse_int(meta_value(line, "m")));
  trace.n = static_cast<int>(parse_int(meta_value(line, "n")));
  trace.thinning = parse_int(meta_value(line, "thinning"));

  if (!std::getline(in, line)) throw IoError("trace file missing column header");

  RoundRecord current;
  current.t = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (static_cast<int>(parts.size()) != 4 + 2 * trace.m) {
      throw IoError("trace row has wrong column count");
    }
    const long long t = parse_int(parts[0]);
    if (t != current.t) {
      if (current.t >= 0) trace.rounds.push_back(std::move(current));
      current = RoundRecord{};
      current.t = t;
    }
    AgentRound agent;
    agent.signal = static_cast<int>(parse_int(parts[2]));
    agent.action = static_cast<int>(parse_int(parts[3]));
    for (int k = 0; k < trace.m; ++k) {
      agent.pooled.push_back(parse_double(parts[static_cast<std::size_t>(4 + k)]));
    }
    for (int k = 0; k < trace.m; ++k) {
      agent.counters.push_back(parse_int(parts[static_cast<std::size_t>(4 + trace.m + k)]));
    }
    current.agents.push_back(std::move(agent));
  }
  if (current.t >= 0) trace.rounds.push_back(std::move(current));
  if (trace.rounds.empty()) throw IoError("trace file has no rounds");
  trace.horizon = trace.rounds.back().t;
  return trace;
}

SimulationTrace load_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path.string());
  return read_trace_csv(in);
}

nlohmann::ordered_json bound_report_to_json(const BoundReport& report) {
  nlohmann::ordered_json root;
  root["collective"] = report.collective;
  nlohmann::ordered_json violating = nlohmann::ordered_json::array();
  for (const auto& [a, b] : report.violating_pairs) violating.push_back({a, b});
  root["violating_pairs"] = violating;
  root["beta_fraction"] = report.beta_fraction;
  root["gamma_search"] = {{"grid_step", report.grid_step}, {"refinement", report.refinement}};

  nlohmann::ordered_json per_theta = nlohmann::ordered_json::array();
  for (const ThetaGeometry& geom : report.per_theta) {
    nlohmann::ordered_json entry;
    entry["theta"] = geom.theta;
    entry["empty_expert_set"] = geom.empty_expert_set;
    if (!geom.empty_expert_set) {
      entry["expert_set"] = geom.geometry.expert_set;
      entry["dist"] = geom.geometry.dist;
      entry["sigma"] = geom.geometry.sigma;
      entry["h"] = geom.geometry.h;
      entry["beta_bar"] = geom.geometry.beta_bar;
      entry["beta_tilde"] = geom.geometry.beta_tilde;
      entry["skipped_level"] = geom.geometry.skipped_level;
    }
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const PairBound& pair : geom.pairs) {
      nlohmann::ordered_json p;
      p["agent"] = pair.agent;
      p["identifiable"] = pair.identifiable;
      if (pair.identifiable) {
        p["kl"] = pair.kl;
        p["beta"] = pair.beta;
        p["gamma"] = pair.gamma;
        p["alpha_star"] = pair.alpha_star;
      }
      pairs.push_back(std::move(p));
    }
    entry["agents"] = std::move(pairs);
    per_theta.push_back(std::move(entry));
  }
  root["per_theta"] = std::move(per_theta);

  if (report.empirical) {
    const EmpiricalStats& emp = *report.empirical;
    nlohmann::ordered_json e;
    e["seeds"] = emp.seeds;
    e["horizon"] = emp.horizon;
    e["burn_in"] = emp.burn_in;
    e["threshold"] = emp.threshold;
    e["all_learned_rate"] = emp.all_learned_rate;
    e["per_agent_learned_rate"] = emp.per_agent_learned_rate;

    nlohmann::ordered_json slopes = nlohmann::ordered_json::array();
    for (const SlopeEstimate& s : emp.slopes) {
      slopes.push_back({{"agent", s.agent},
                        {"theta", s.theta},
                        {"mean", s.mean},
                        {"std_error", s.std_error},
                        {"band99", s.band99},
                        {"kl_reference", s.kl_reference},
                        {"t_eval", s.t_eval}});
    }
    e["private_decay_slopes"] = std::move(slopes);

    e["floor"] = {{"burn_in", emp.floor.burn_in},
                  {"overall_frequency", emp.floor.overall_frequency},
                  {"per_agent_frequency", emp.floor.per_agent_frequency},
                  {"checks", emp.floor.checks},
                  {"violations", emp.floor.violations}};
    nlohmann::ordered_json trend = nlohmann::ordered_json::array();
    for (const auto& [t, freq] : emp.floor.trend) trend.push_back({{"t_end", t}, {"frequency", freq}});
    e["floor"]["trend"] = std::move(trend);

    e["count_growth"] = {{"burn_in", emp.growth.burn_in},
                         {"min_final_ratio", emp.growth.min_final_ratio},
                         {"min_poly_ratio", emp.growth.min_poly_ratio},
                         {"final_ratio", emp.growth.final_ratio}};

    nlohmann::ordered_json plateau = nlohmann::ordered_json::array();
    for (const auto& entry : emp.plateau.entries) {
      plateau.push_back({{"agent", entry.agent},
                         {"theta", entry.theta},
                         {"deltas", entry.deltas},
                         {"max_delta", entry.max_delta()},
                         {"fraction_within_3", entry.fraction_within(3)}});
    }
    e["plateau"] = {{"half_round", emp.plateau.half_round}, {"entries", std::move(plateau)}};

    nlohmann::ordered_json exponents = nlohmann::ordered_json::array();
    for (const CountExponentRow& row : emp.count_exponents) {
      exponents.push_back({{"agent", row.agent},
                           {"theta", row.theta},
                           {"dist", row.dist},
                           {"max_exponent", row.max_exponent},
                           {"ceiling", row.ceiling}});
    }
    e["count_exponents"] = std::move(exponents);
    root["empirical"] = std::move(e);
  }
  return root;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace beliefsim
