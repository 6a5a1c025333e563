#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbl/io.hpp"

namespace hbl {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExperimentConfig {
  Json space;  // generator spec or {"file": path}
  double delta = 0.5;
  bool random_tie_break = false;
  double b = 5.0;
  double c = 3.5;
  std::optional<double> b0;
  double q = 2.0;
  double r0 = 1.0;
  double beta = 0.7;
  std::vector<std::string> suites;
  std::optional<std::uint64_t> seed;
  std::size_t functions = 6;         // sampled functions per suite
  std::size_t atoms = 10;            // atoms handed to split_atom
  std::size_t operator_samples = 64;
  std::size_t triviality = 10;       // functions per tree-triviality check
  std::filesystem::path output = "hbl-out";
  Json echo;  // normalized config, as written into the report
};

/// Validates every field up front. Violations raise InvalidParameter naming
/// the field. HBL_SEED, when set, replaces the seed.
ExperimentConfig parse_config(const Json& j, bool use_environment = true);

struct RunReport {
  Json report;  // deterministic for a fixed config
  Json timing;  // wall-clock seconds per suite
  std::vector<std::pair<std::string, std::string>> csv;  // file name, contents
  std::vector<std::string> hard_failures;
  std::vector<std::string> warnings;

  int exit_code() const { return hard_failures.empty() ? 0 : 1; }
};

/// Runs the requested suites in dependency order (space, dyadic, the rest).
/// With `parallel`, independent suites run concurrently; the report is the
/// same either way.
RunReport run(const ExperimentConfig& config, bool parallel = false);

/// report.json, timing.json and the CSV files.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

}  // namespace hbl
