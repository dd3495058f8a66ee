#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aoi/problem.hpp"

namespace aoi {

/// Count tables and optimistic Q/V bookkeeping of one learner. Single-owner
/// mutable; planning is a deterministic function of the stored counts.
struct LearnerState {
  int a_max = 0;
  int num_channels = 0;
  int horizon = 0;
  long long total_steps = 0;  // T = K*H, used by the exploration bonus
  double delta = 0.0;
  double theta0 = 0.0;        // bonus stays on while episode_index <= theta0
  long long episode_index = 1;

  // Transition triple counts; only s' = 1 (reset) and s' = s+ occur.
  std::vector<long long> n_reset;  // a_max x (C+1)
  std::vector<long long> n_up;     // a_max x (C+1)
  // Pooled per-channel tallies, fed by real transmissions and pilots alike.
  std::vector<long long> chan_attempts;   // C
  std::vector<long long> chan_successes;  // C

  std::vector<double> q_table;  // H x a_max x (C+1), reward units in [0, H]
  std::vector<double> v_table;  // (H+1) x a_max

  long long n(int s, int a) const {
    return n_reset[sa(s, a)] + n_up[sa(s, a)];
  }
  long long n_triple(int s, int a, int next) const;

  /// Pooled success estimate for one channel; optimistic 1.0 when unseen.
  double estimated_success(int channel) const {
    const long long att = chan_attempts[channel - 1];
    return att == 0 ? 1.0
                    : static_cast<double>(chan_successes[channel - 1]) / att;
  }

  size_t sa(int s, int a) const {
    return static_cast<size_t>(s - 1) * (num_channels + 1) + a;
  }
  size_t qidx(int h, int s, int a) const {
    return (static_cast<size_t>(h - 1) * a_max + (s - 1)) *
               (num_channels + 1) +
           a;
  }
  size_t vidx(int h, int s) const {
    return static_cast<size_t>(h - 1) * a_max + (s - 1);
  }
};

/// Episode index below which the bonus phase is active:
/// ceil(c * C^2 * ln(2C / delta)).
double theta0_episodes(int num_channels, double delta, double c);

LearnerState make_learner_state(const ProblemInstance& inst,
                                double theta0_constant = 1.0);

/// Chernoff-Hoeffding bonus 7H ln(5 S A T / delta) sqrt(1 / max(N(s,a), 1)).
double exploration_bonus(const LearnerState& ls, int s, int a);

/// Estimated per-channel failure probabilities and the structured kernel
/// they induce (drop moves up deterministically, transmit splits between
/// reset and up).
struct EstimatedKernel {
  std::vector<double> failure_prob;  // per channel, index c-1

  /// P-hat(next | s, a) for the structured kernel.
  double prob(const ProblemInstance& inst, int s, int a, int next) const;
};

EstimatedKernel estimated_kernel(const LearnerState& ls);

/// One episode's plan: greedy actions per (step, state).
struct EpisodePlan {
  int horizon = 0;
  int a_max = 0;
  std::vector<int> actions;  // horizon x a_max, h-major

  int action(int h, int s) const {
    return actions[static_cast<size_t>(h - 1) * a_max + (s - 1)];
  }
};

/// Bonus-phase planner: backward induction over the estimated kernel with
/// the exploration bonus while episode_index <= theta0, each Q clipped at H
/// and at its previous-episode value. Updates ls.q_table / ls.v_table.
EpisodePlan plan_episode_alg1(LearnerState& ls, const ProblemInstance& inst);

/// Bonus-free planner: plain backward induction over the estimated kernel.
EpisodePlan plan_episode_alg2(LearnerState& ls, const ProblemInstance& inst);

/// AoI-agnostic baseline: per-(s,a) empirical transition estimates, no
/// pilot data, bonus always on, Q clipped at H and at the previous value.
EpisodePlan plan_episode_ucbvi(LearnerState& ls, const ProblemInstance& inst);

/// Planning core with injected channel failure probabilities and no bonus;
/// lets tests and the oracle-equivalence checks bypass the counts.
EpisodePlan plan_with_failure_probs(LearnerState& ls,
                                    const ProblemInstance& inst,
                                    std::span<const double> failure_probs,
                                    bool clip_at_previous);

struct EpisodeStep {
  int h = 0;
  int s = 0;
  int a = 0;
  double reward = 0.0;
  double cost = 0.0;
  int next_state = 0;
  std::optional<int> pilot_channel;
  std::optional<bool> pilot_success;
};

struct EpisodeLog {
  int initial_state = 0;
  int final_state = 0;
  double total_cost = 0.0;
  std::vector<EpisodeStep> steps;
};

/// Executes a plan for one episode. Every realized transition is counted
/// under the taken action; on drop steps with pilots enabled one channel is
/// probed uniformly at random and the outcome recorded under that channel.
/// Counts are absorbed in a batch at the episode boundary.
EpisodeLog run_episode(const ProblemInstance& inst, LearnerState& ls,
                       const EpisodePlan& plan, int initial, Rng& rng,
                       bool pilots_enabled);

enum class InitialStateMode { UniformRandom, NR };

/// Episode start state: uniform over states, or chained from the previous
/// episode's final AoI (s = 1 for the very first episode).
int initial_state_rule(InitialStateMode mode, long long episode,
                       std::optional<int> prev_episode_final, Rng& rng,
                       int a_max);

/// Gap quantities from the regret bound of the bonus-free algorithm.
struct GapDiagnostics {
  double delta_min = 0.0;        // min_i |(1-alpha)P/(alpha a_max) - mu_i|
  double channel_gap_min = 0.0;  // min_{i != k*} |mu_{k*} - mu_i|
};

GapDiagnostics gap_diagnostics(const ProblemInstance& inst);

}  // namespace aoi
