#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aoi/harness.hpp"

namespace aoi {

/// Parsed flat key = value config. Instance fields are always present;
/// experiment fields carry defaults, except the algorithm which stays empty
/// until the config names one.
struct ParsedConfig {
  ProblemInstance instance;
  std::optional<Algorithm> algorithm;
  InitialStateMode initial_state_mode = InitialStateMode::UniformRandom;
  int replications = 20;
  std::uint64_t base_seed = 1;
  bool record_trace = false;
  double theta0_constant = 1.0;
  double via_tol = 1e-10;
  long via_max_iters = 1000000;
};

/// Parses "key = value" lines; '#' starts a comment, blank lines are
/// skipped, list values are comma-separated. Throws on malformed lines.
std::map<std::string, std::string> parse_key_value_text(
    const std::string& text);

std::map<std::string, std::string> load_key_value_file(
    const std::string& path);

/// Applies repeatable "key=value" override strings on top of file values.
void apply_overrides(std::map<std::string, std::string>& kv,
                     const std::vector<std::string>& sets);

/// Builds and validates the configuration; errors name the offending key.
ParsedConfig config_from_kv(const std::map<std::string, std::string>& kv);

ExperimentConfig experiment_config(const ParsedConfig& parsed);

/// Instance fields as config text; parsing it back reproduces the instance
/// bit-for-bit (values carry 17 significant digits).
std::string instance_to_config(const ProblemInstance& inst);

std::string algorithm_name(Algorithm a);

}  // namespace aoi
