#include "aoi/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aoi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "': not a number: " + value);
  }
  if (used != value.size())
    throw std::invalid_argument("config key '" + key +
                                "': trailing junk in number: " + value);
  return x;
}

long long parse_int(const std::string& key, const std::string& value) {
  size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "': not an integer: " + value);
  }
  if (used != value.size())
    throw std::invalid_argument("config key '" + key +
                                "': trailing junk in integer: " + value);
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw std::invalid_argument("config key '" + key +
                              "': expected a boolean, got: " + value);
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw std::invalid_argument("config key '" + key +
                                  "': empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_value_text(
    const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("malformed config line " +
                                  std::to_string(lineno) + ": " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("empty key on config line " +
                                  std::to_string(lineno));
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> load_key_value_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_value_text(buf.str());
}

void apply_overrides(std::map<std::string, std::string>& kv,
                     const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must look like key=value: " + s);
    kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
  }
}

ParsedConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  ParsedConfig cfg;
  ProblemInstance inst;
  inst.age_fn.kind = AgeKind::Linear;
  inst.horizon = 50;
  inst.num_episodes = 1000;
  inst.delta = 0.01;

  bool have_channels = false, have_probs = false, have_amax = false,
       have_power = false, have_alpha = false;

  for (const auto& [key, value] : kv) {
    if (key == "num_channels") {
      inst.num_channels = static_cast<int>(parse_int(key, value));
      have_channels = true;
    } else if (key == "success_probs") {
      inst.success_probs = parse_double_list(key, value);
      have_probs = true;
    } else if (key == "a_max") {
      inst.a_max = static_cast<int>(parse_int(key, value));
      have_amax = true;
    } else if (key == "power_cost") {
      inst.power_cost = parse_double(key, value);
      have_power = true;
    } else if (key == "alpha") {
      inst.alpha = parse_double(key, value);
      have_alpha = true;
    } else if (key == "age_fn") {
      if (value == "linear") {
        inst.age_fn.kind = AgeKind::Linear;
      } else if (value == "exponential" || value == "exp") {
        inst.age_fn.kind = AgeKind::Exponential;
      } else {
        throw std::invalid_argument(
            "config key 'age_fn': expected linear or exponential, got: " +
            value);
      }
    } else if (key == "age_psi") {
      inst.age_fn.psi = parse_double(key, value);
    } else if (key == "horizon") {
      inst.horizon = static_cast<int>(parse_int(key, value));
    } else if (key == "num_episodes") {
      inst.num_episodes = parse_int(key, value);
    } else if (key == "delta") {
      inst.delta = parse_double(key, value);
    } else if (key == "algorithm") {
      if (value == "alg1") cfg.algorithm = Algorithm::Alg1;
      else if (value == "alg2") cfg.algorithm = Algorithm::Alg2;
      else if (value == "ucbvi") cfg.algorithm = Algorithm::UCBVI;
      else if (value == "oracle") cfg.algorithm = Algorithm::Oracle;
      else
        throw std::invalid_argument(
            "config key 'algorithm': expected alg1, alg2, ucbvi or oracle, "
            "got: " + value);
    } else if (key == "initial_state_mode") {
      if (value == "uniform") cfg.initial_state_mode = InitialStateMode::UniformRandom;
      else if (value == "nr") cfg.initial_state_mode = InitialStateMode::NR;
      else
        throw std::invalid_argument(
            "config key 'initial_state_mode': expected uniform or nr, got: " +
            value);
    } else if (key == "replications") {
      cfg.replications = static_cast<int>(parse_int(key, value));
    } else if (key == "base_seed") {
      cfg.base_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "record_trace") {
      cfg.record_trace = parse_bool(key, value);
    } else if (key == "theta0_constant") {
      cfg.theta0_constant = parse_double(key, value);
    } else if (key == "via_tol") {
      cfg.via_tol = parse_double(key, value);
    } else if (key == "via_max_iters") {
      cfg.via_max_iters = parse_int(key, value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }

  if (!have_channels) throw std::invalid_argument("missing config key: num_channels");
  if (!have_probs) throw std::invalid_argument("missing config key: success_probs");
  if (!have_amax) throw std::invalid_argument("missing config key: a_max");
  if (!have_power) throw std::invalid_argument("missing config key: power_cost");
  if (!have_alpha) throw std::invalid_argument("missing config key: alpha");

  cfg.instance = validated(std::move(inst));
  return cfg;
}

ExperimentConfig experiment_config(const ParsedConfig& parsed) {
  if (!parsed.algorithm)
    throw std::invalid_argument("missing config key: algorithm");
  ExperimentConfig cfg;
  cfg.instance = parsed.instance;
  cfg.algorithm = *parsed.algorithm;
  cfg.initial_state_mode = parsed.initial_state_mode;
  cfg.replications = parsed.replications;
  cfg.base_seed = parsed.base_seed;
  cfg.record_trace = parsed.record_trace;
  cfg.theta0_constant = parsed.theta0_constant;
  return cfg;
}

std::string instance_to_config(const ProblemInstance& inst) {
  char buf[40];
  auto g17 = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::string out;
  out += "num_channels = " + std::to_string(inst.num_channels) + "\n";
  out += "success_probs = ";
  for (int c = 1; c <= inst.num_channels; ++c) {
    if (c > 1) out += ",";
    out += g17(inst.mu(c));
  }
  out += "\n";
  out += "a_max = " + std::to_string(inst.a_max) + "\n";
  out += "power_cost = " + g17(inst.power_cost) + "\n";
  out += "alpha = " + g17(inst.alpha) + "\n";
  if (inst.age_fn.kind == AgeKind::Exponential) {
    out += "age_fn = exponential\n";
    out += "age_psi = " + g17(inst.age_fn.psi) + "\n";
  } else {
    out += "age_fn = linear\n";
  }
  out += "horizon = " + std::to_string(inst.horizon) + "\n";
  out += "num_episodes = " + std::to_string(inst.num_episodes) + "\n";
  out += "delta = " + g17(inst.delta) + "\n";
  return out;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Alg1: return "alg1";
    case Algorithm::Alg2: return "alg2";
    case Algorithm::UCBVI: return "ucbvi";
    case Algorithm::Oracle: return "oracle";
  }
  return "?";
}

}  // namespace aoi
