#include "aoi/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace aoi {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int resolve_thread_count(int replications) {
  int threads = 0;
  if (const char* env = std::getenv("AOI_SCHED_THREADS")) {
    threads = std::atoi(env);
    if (threads < 1) threads = 1;
  } else {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  return std::min(threads, replications);
}

EpisodePlan plan_from_policy(const PolicyTable& policy) {
  EpisodePlan plan;
  plan.horizon = policy.horizon;
  plan.a_max = policy.a_max;
  plan.actions = policy.actions;
  return plan;
}

struct RepResult {
  std::vector<double> cum_regret;
  std::vector<double> episode_cost;
  std::vector<double> optimal_cost;
  std::vector<double> cum_expected_regret;
};

}  // namespace

namespace {

// Forward propagation of the state distribution from a point mass,
// accumulating the expected per-slot cost of the given per-step actions.
template <typename ActionAt>
double propagate_expected_cost(const ProblemInstance& inst, int horizon,
                               int initial, ActionAt&& action_at) {
  const int S = inst.a_max;
  std::vector<double> dist(S, 0.0), next(S, 0.0);
  dist[initial - 1] = 1.0;
  double total = 0.0;
  for (int h = 1; h <= horizon; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 1; s <= S; ++s) {
      const double mass = dist[s - 1];
      if (mass == 0.0) continue;
      const int a = action_at(h, s);
      total += mass * step_cost(inst, s, a);
      const int up = inst.successor(s);
      if (a == 0) {
        next[up - 1] += mass;
      } else {
        const double mu = inst.mu(a);
        next[0] += mass * mu;
        next[up - 1] += mass * (1.0 - mu);
      }
    }
    dist.swap(next);
  }
  return total;
}

}  // namespace

double optimal_expected_episode_cost(const ProblemInstance& inst,
                                     const FiniteHorizonSolution& solution,
                                     int initial) {
  return propagate_expected_cost(
      inst, solution.horizon, initial,
      [&](int h, int s) { return solution.policy.action(h, s); });
}

double expected_plan_cost(const ProblemInstance& inst, const EpisodePlan& plan,
                          int initial) {
  return propagate_expected_cost(
      inst, plan.horizon, initial,
      [&](int h, int s) { return plan.action(h, s); });
}

OptimalBenchmark make_benchmark(const ProblemInstance& inst) {
  OptimalBenchmark bench;
  bench.solution = solve_finite_horizon(inst);
  bench.expected_episode_cost.resize(inst.a_max);
  for (int s = 1; s <= inst.a_max; ++s)
    bench.expected_episode_cost[s - 1] =
        optimal_expected_episode_cost(inst, bench.solution, s);
  return bench;
}

RegretTrace run_experiment(const ExperimentConfig& cfg,
                           std::string* trace_csv) {
  const ProblemInstance& inst = cfg.instance;
  if (cfg.replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  if (cfg.algorithm != Algorithm::Oracle) {
    const GapDiagnostics gaps = gap_diagnostics(inst);
    if (gaps.channel_gap_min == 0.0)
      throw std::invalid_argument(
          "instance has duplicated maximal success probabilities "
          "(channel gap 0); rejected for regret experiments");
  }

  const OptimalBenchmark bench = make_benchmark(inst);
  const EpisodePlan oracle_plan = plan_from_policy(bench.solution.policy);
  const long long K = inst.num_episodes;
  const int R = cfg.replications;
  const bool pilots = cfg.algorithm == Algorithm::Alg1 ||
                      cfg.algorithm == Algorithm::Alg2;

  std::vector<RepResult> reps(R);
  std::vector<std::string> trace_parts(R);

  auto run_rep = [&](int r) {
    Rng rng(cfg.base_seed + static_cast<std::uint64_t>(r));
    LearnerState ls = make_learner_state(inst, cfg.theta0_constant);
    RepResult& out = reps[r];
    out.cum_regret.resize(K);
    out.episode_cost.resize(K);
    out.optimal_cost.resize(K);
    out.cum_expected_regret.resize(K);
    std::optional<int> prev_final;
    double cum = 0.0;
    double cum_expected = 0.0;
    const bool trace_this = cfg.record_trace && trace_csv != nullptr && r == 0;

    for (long long k = 1; k <= K; ++k) {
      const int s0 = initial_state_rule(cfg.initial_state_mode, k, prev_final,
                                        rng, inst.a_max);
      EpisodePlan plan;
      switch (cfg.algorithm) {
        case Algorithm::Alg1: plan = plan_episode_alg1(ls, inst); break;
        case Algorithm::Alg2: plan = plan_episode_alg2(ls, inst); break;
        case Algorithm::UCBVI: plan = plan_episode_ucbvi(ls, inst); break;
        case Algorithm::Oracle: plan = oracle_plan; break;
      }
      const EpisodeLog log = run_episode(inst, ls, plan, s0, rng, pilots);
      prev_final = log.final_state;

      const double optimal = bench.expected_episode_cost[s0 - 1];
      cum += log.total_cost - optimal;
      cum_expected += expected_plan_cost(inst, plan, s0) - optimal;
      out.cum_regret[k - 1] = cum;
      out.episode_cost[k - 1] = log.total_cost;
      out.optimal_cost[k - 1] = optimal;
      out.cum_expected_regret[k - 1] = cum_expected;

      if (trace_this) {
        std::string& t = trace_parts[r];
        for (const EpisodeStep& st : log.steps) {
          t += std::to_string(k) + "," + std::to_string(st.h) + "," +
               std::to_string(st.s) + "," + std::to_string(st.a) + "," +
               g17(st.cost) + ",";
          if (st.pilot_channel) t += std::to_string(*st.pilot_channel);
          t += ",";
          if (st.pilot_success) t += *st.pilot_success ? "1" : "0";
          t += "\n";
        }
      }
    }
  };

  const int threads = resolve_thread_count(R);
  if (threads <= 1) {
    for (int r = 0; r < R; ++r) run_rep(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int r = t; r < R; r += threads) run_rep(r);
      });
    for (std::thread& th : pool) th.join();
  }

  RegretTrace trace;
  trace.num_episodes = K;
  trace.replications = R;
  trace.mean_cum_regret.resize(K);
  trace.stderr_cum_regret.resize(K);
  trace.mean_episode_cost.resize(K);
  trace.mean_optimal_cost.resize(K);
  trace.mean_cum_expected_regret.resize(K);
  trace.stderr_cum_expected_regret.resize(K);
  auto stderr_of = [R](const std::vector<RepResult>& rr, long long k,
                       double mean, auto field) {
    if (R <= 1) return 0.0;
    double var = 0.0;
    for (int r = 0; r < R; ++r) {
      const double d = (rr[r].*field)[k] - mean;
      var += d * d;
    }
    return std::sqrt(var / (R - 1) / R);
  };
  for (long long k = 0; k < K; ++k) {
    double mean = 0.0, mean_cost = 0.0, mean_opt = 0.0, mean_exp = 0.0;
    for (int r = 0; r < R; ++r) {
      mean += reps[r].cum_regret[k];
      mean_cost += reps[r].episode_cost[k];
      mean_opt += reps[r].optimal_cost[k];
      mean_exp += reps[r].cum_expected_regret[k];
    }
    mean /= R;
    mean_exp /= R;
    trace.mean_cum_regret[k] = mean;
    trace.mean_episode_cost[k] = mean_cost / R;
    trace.mean_optimal_cost[k] = mean_opt / R;
    trace.mean_cum_expected_regret[k] = mean_exp;
    trace.stderr_cum_regret[k] =
        stderr_of(reps, k, mean, &RepResult::cum_regret);
    trace.stderr_cum_expected_regret[k] =
        stderr_of(reps, k, mean_exp, &RepResult::cum_expected_regret);
  }

  if (cfg.record_trace && trace_csv != nullptr) {
    *trace_csv = "episode,h,s,a,cost,pilot_channel,pilot_success\n";
    *trace_csv += trace_parts[0];
  }
  return trace;
}

std::string trace_to_csv(const RegretTrace& trace) {
  std::string out =
      "episode,mean_cum_regret,stderr,mean_episode_cost,optimal_episode_cost\n";
  for (long long k = 0; k < trace.num_episodes; ++k) {
    out += std::to_string(k + 1) + "," + g17(trace.mean_cum_regret[k]) + "," +
           g17(trace.stderr_cum_regret[k]) + "," +
           g17(trace.mean_episode_cost[k]) + "," +
           g17(trace.mean_optimal_cost[k]) + "\n";
  }
  return out;
}

void emit_csv(const RegretTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  const std::string text = trace_to_csv(trace);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace aoi
