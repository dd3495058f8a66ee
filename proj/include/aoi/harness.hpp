#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoi/exact.hpp"
#include "aoi/learner.hpp"
#include "aoi/problem.hpp"

namespace aoi {

enum class Algorithm { Alg1, Alg2, UCBVI, Oracle };

struct ExperimentConfig {
  ProblemInstance instance;
  Algorithm algorithm = Algorithm::Alg2;
  InitialStateMode initial_state_mode = InitialStateMode::UniformRandom;
  int replications = 20;
  std::uint64_t base_seed = 1;
  bool record_trace = false;
  double theta0_constant = 1.0;
};

/// Per-episode aggregates across replications. Cumulative regret at k is the
/// running sum of per-episode regrets 1..k by construction.
///
/// Two regret series are kept. The primary one subtracts the exact optimal
/// expectation from the *realized* episode cost; it is what the CSV carries.
/// The expected series instead evaluates each planned policy exactly (forward
/// propagation under the true kernel), which integrates the trajectory noise
/// out of the estimate of E[C(pi)] - E[C(pi*)]; it is nonnegative episode by
/// episode and is the right series for convergence/flatness readings.
struct RegretTrace {
  long long num_episodes = 0;
  int replications = 0;
  std::vector<double> mean_cum_regret;
  std::vector<double> stderr_cum_regret;
  std::vector<double> mean_episode_cost;
  std::vector<double> mean_optimal_cost;
  std::vector<double> mean_cum_expected_regret;
  std::vector<double> stderr_cum_expected_regret;
};

/// Finite-horizon optimal policy with its expected episode cost from every
/// initial state, computed once per experiment.
struct OptimalBenchmark {
  FiniteHorizonSolution solution;
  std::vector<double> expected_episode_cost;  // indexed by initial state - 1
};

OptimalBenchmark make_benchmark(const ProblemInstance& inst);

/// Exact E[sum of step costs] over one episode under the optimal per-step
/// policy, by forward propagation of the state distribution from a point
/// mass at `initial`. No sampling.
double optimal_expected_episode_cost(const ProblemInstance& inst,
                                     const FiniteHorizonSolution& solution,
                                     int initial);

/// Same forward propagation under an arbitrary episode plan.
double expected_plan_cost(const ProblemInstance& inst, const EpisodePlan& plan,
                          int initial);

/// Runs the configured learner against the exact benchmark. Replication r
/// uses seed base_seed + r and owns its learner and random stream;
/// replications may run on several threads (capped by AOI_SCHED_THREADS)
/// without changing the result. When cfg.record_trace is set and trace_csv
/// is non-null, replication 0's per-step log is written there as CSV.
RegretTrace run_experiment(const ExperimentConfig& cfg,
                           std::string* trace_csv = nullptr);

/// CSV with header episode,mean_cum_regret,stderr,mean_episode_cost,
/// optimal_episode_cost and one row per episode; byte-deterministic, values
/// printed with 17 significant digits.
std::string trace_to_csv(const RegretTrace& trace);
void emit_csv(const RegretTrace& trace, const std::string& path);

}  // namespace aoi
