#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beliefsim/diagnostics.hpp"
#include "beliefsim/engine.hpp"

namespace beliefsim {

struct GeneratorSpec {
  ScenarioKind kind = ScenarioKind::Ring;
  int n = 2;
  double self_weight = 0.6;
  double edge_prob = 0.4;
  std::uint64_t seed = 1;
};

/// Parsed configuration document. Holds the run-level settings on top of the
/// engine config; the network may be explicit or generator-backed.
struct ConfigDoc {
  StateSpace space;
  LikelihoodModel model;
  std::optional<Matrix> network_matrix;
  std::optional<GeneratorSpec> generator;
  Rule rule = Rule::GeometricSample;
  long long horizon = 1;
  long long thinning = 1;
  std::vector<std::uint64_t> seeds{1};
  DiagnosticsOptions diagnostics;
};

/// Strict parse: unknown keys anywhere are rejected.
ConfigDoc parse_config_text(const std::string& text);
ConfigDoc load_config(const std::filesystem::path& path);

/// Canonical form: sorted keys, shortest round-trip numbers. parse(serialize(x))
/// reproduces x.
std::string serialize_config(const ConfigDoc& doc);

/// Expands the generator (if any) and runs all module validations.
SimulationConfig build_sim_config(const ConfigDoc& doc);

std::uint64_t fnv1a64(std::string_view text);
std::string hash_hex(std::string_view text);

/// Hash of the canonical document serialization (covers the seed list as written).
std::string base_config_hash(const ConfigDoc& doc);

/// Shortest decimal that round-trips the binary value.
std::string format_double(double value);

void write_trace_csv(const SimulationTrace& trace, std::ostream& out);
std::string trace_csv_string(const SimulationTrace& trace);

/// Reads a trace file back. Private beliefs are not part of the file format;
/// the log_private fields come back empty.
SimulationTrace read_trace_csv(std::istream& in);
SimulationTrace load_trace_csv(const std::filesystem::path& path);

nlohmann::ordered_json bound_report_to_json(const BoundReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace beliefsim
