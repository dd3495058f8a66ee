#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoi/config.hpp"
#include "aoi/harness.hpp"
#include "aoi/learner.hpp"
#include "aoi/verify.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> sets;
  std::optional<long long> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool out_required) {
  cmd->add_option("--config", args.config_path, "key = value config file")
      ->required();
  auto* out = cmd->add_option("--out", args.out_path, "output file path");
  if (out_required) out->required();
  cmd->add_option("--set", args.sets,
                  "override a config key, e.g. --set alpha=0.5 (repeatable)");
  cmd->add_option("--seed", args.seed, "override base_seed");
}

aoi::ParsedConfig load(const CommonArgs& args) {
  auto kv = aoi::load_key_value_file(args.config_path);
  aoi::apply_overrides(kv, args.sets);
  aoi::ParsedConfig parsed = aoi::config_from_kv(kv);
  if (args.seed) parsed.base_seed = static_cast<std::uint64_t>(*args.seed);
  return parsed;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_solve(const CommonArgs& args) {
  const aoi::ParsedConfig parsed = load(args);
  const aoi::ProblemInstance& inst = parsed.instance;
  const aoi::SolveResult solve =
      aoi::solve_average_cost(inst, parsed.via_tol, parsed.via_max_iters);

  std::string report;
  report += "rho_star_via = " + g17(solve.rho_star) + "\n";
  const auto [rho_stat, gamma] =
      aoi::stationary_average_cost(inst, solve.threshold);
  report += "rho_star_stationary = " + g17(rho_stat) + "\n";
  if (inst.age_fn.kind == aoi::AgeKind::Linear && solve.threshold >= 1 &&
      solve.threshold < inst.a_max) {
    report += "rho_star_closed_form = " +
              g17(aoi::closed_form_rho(inst, solve.threshold)) + "\n";
  } else {
    report += "rho_star_closed_form = n/a\n";
  }
  report += "threshold = " + std::to_string(solve.threshold) + "\n";
  report += "best_channel = " + std::to_string(solve.best_channel) + "\n";
  if (inst.alpha < 1.0) {
    const auto [p_min, p_max] = aoi::power_thresholds(inst, solve);
    report += "p_min = " + g17(p_min) + "\n";
    report += "p_max = " + g17(p_max) + "\n";
  } else {
    report += "p_min = n/a\np_max = n/a\n";
  }
  report += "iterations = " + std::to_string(solve.iterations) + "\n";
  report += aoi::format_solve_table(inst, solve);

  if (args.out_path.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open output file: " << args.out_path << "\n";
      return 1;
    }
    out << report;
  }
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  const aoi::ParsedConfig parsed = load(args);
  const aoi::ExperimentConfig cfg = aoi::experiment_config(parsed);

  std::string trace_csv;
  const aoi::RegretTrace trace = aoi::run_experiment(
      cfg, cfg.record_trace ? &trace_csv : nullptr);
  aoi::emit_csv(trace, args.out_path);
  if (cfg.record_trace) {
    std::ofstream t(args.out_path + ".trace.csv", std::ios::binary);
    if (!t) {
      std::cerr << "cannot open trace file: " << args.out_path
                << ".trace.csv\n";
      return 1;
    }
    t << trace_csv;
  }

  const long long K = trace.num_episodes;
  std::cout << "algorithm=" << aoi::algorithm_name(cfg.algorithm)
            << " episodes=" << K << " replications=" << trace.replications;
  if (cfg.algorithm == aoi::Algorithm::Alg1) {
    std::cout << " theta0="
              << aoi::theta0_episodes(cfg.instance.num_channels,
                                      cfg.instance.delta,
                                      cfg.theta0_constant);
  }
  std::cout << " final_cum_regret=" << g17(trace.mean_cum_regret[K - 1])
            << " stderr=" << g17(trace.stderr_cum_regret[K - 1]) << "\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, int sweep) {
  const aoi::ParsedConfig parsed = load(args);
  int failures = 0;
  auto report = [&failures](const std::string& scope,
                            const std::vector<aoi::CheckResult>& checks) {
    for (const aoi::CheckResult& c : checks) {
      if (!c.pass) ++failures;
      std::cout << (c.pass ? "[ok]   " : "[FAIL] ") << scope << c.name;
      if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
      std::cout << "\n";
    }
  };

  report("", aoi::instance_checks(parsed.instance, parsed.via_tol,
                                  parsed.via_max_iters));
  if (sweep > 0) {
    aoi::Rng rng(parsed.base_seed);
    for (int i = 0; i < sweep; ++i) {
      const aoi::ProblemInstance inst = aoi::random_instance(rng);
      report("sweep" + std::to_string(i) + ":",
             aoi::instance_checks(inst, parsed.via_tol, parsed.via_max_iters));
    }
  }
  std::cout << (failures == 0 ? "all checks passed\n"
                              : std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information vs. energy scheduling: exact solvers, "
               "learning algorithms and regret experiments"};
  app.require_subcommand(1);

  CommonArgs solve_args, sim_args, verify_args;
  int sweep = 0;

  CLI::App* solve = app.add_subcommand("solve",
      "solve the average-cost problem and report the threshold policy");
  add_common(solve, solve_args, false);

  CLI::App* simulate = app.add_subcommand("simulate",
      "run a regret experiment and write the per-episode CSV");
  add_common(simulate, sim_args, true);

  CLI::App* verify = app.add_subcommand("verify",
      "run the structural and oracle checks");
  add_common(verify, verify_args, false);
  verify->add_option("--sweep", sweep, "also check N random instances");

  CommonArgs sweep_args;
  int sweep_count = 100;
  CLI::App* sweep_cmd = app.add_subcommand("sweep",
      "verify the configured instance plus N random ones (default 100)");
  add_common(sweep_cmd, sweep_args, false);
  sweep_cmd->add_option("--sweep", sweep_count, "number of random instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_args);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (verify->parsed()) return cmd_verify(verify_args, sweep);
    if (sweep_cmd->parsed()) return cmd_verify(sweep_args, sweep_count);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
