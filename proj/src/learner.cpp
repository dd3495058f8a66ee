#include "aoi/learner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoi {

double theta0_episodes(int num_channels, double delta, double c) {
  return std::ceil(c * num_channels * num_channels *
                   std::log(2.0 * num_channels / delta));
}

LearnerState make_learner_state(const ProblemInstance& inst,
                                double theta0_constant) {
  LearnerState ls;
  ls.a_max = inst.a_max;
  ls.num_channels = inst.num_channels;
  ls.horizon = inst.horizon;
  ls.total_steps = inst.total_steps();
  ls.delta = inst.delta;
  ls.theta0 = theta0_episodes(inst.num_channels, inst.delta, theta0_constant);
  const size_t sa = static_cast<size_t>(inst.a_max) * (inst.num_channels + 1);
  ls.n_reset.assign(sa, 0);
  ls.n_up.assign(sa, 0);
  ls.chan_attempts.assign(inst.num_channels, 0);
  ls.chan_successes.assign(inst.num_channels, 0);
  // Q0 = H everywhere so the first clipped update can only shrink it.
  ls.q_table.assign(static_cast<size_t>(inst.horizon) * sa,
                    static_cast<double>(inst.horizon));
  ls.v_table.assign(static_cast<size_t>(inst.horizon + 1) * inst.a_max, 0.0);
  return ls;
}

long long LearnerState::n_triple(int s, int a, int next) const {
  const int up = s + 1 < a_max ? s + 1 : a_max;
  if (next == 1 && a != 0) return n_reset[sa(s, a)];
  if (next == up) return n_up[sa(s, a)];
  return 0;
}

double exploration_bonus(const LearnerState& ls, int s, int a) {
  const double states = ls.a_max;
  const double actions = ls.num_channels + 1;
  const double log_term = std::log(5.0 * states * actions *
                                   static_cast<double>(ls.total_steps) /
                                   ls.delta);
  const double visits =
      static_cast<double>(std::max<long long>(ls.n(s, a), 1));
  return 7.0 * ls.horizon * log_term * std::sqrt(1.0 / visits);
}

EstimatedKernel estimated_kernel(const LearnerState& ls) {
  EstimatedKernel k;
  k.failure_prob.resize(ls.num_channels);
  for (int c = 1; c <= ls.num_channels; ++c)
    k.failure_prob[c - 1] = 1.0 - ls.estimated_success(c);
  return k;
}

double EstimatedKernel::prob(const ProblemInstance& inst, int s, int a,
                             int next) const {
  const int up = inst.successor(s);
  if (a == 0) return next == up ? 1.0 : 0.0;
  if (next == 1) return 1.0 - failure_prob[a - 1];
  if (next == up) return failure_prob[a - 1];
  return 0.0;
}

namespace {

enum class KernelKind { PooledChannels, PerStateAction };

EpisodePlan plan_core(LearnerState& ls, const ProblemInstance& inst,
                      KernelKind kernel, const double* failure_probs,
                      bool bonus_on, bool clip_at_previous) {
  const int S = inst.a_max;
  const int H = inst.horizon;
  const int A = inst.num_channels + 1;

  EpisodePlan plan;
  plan.horizon = H;
  plan.a_max = S;
  plan.actions.assign(static_cast<size_t>(H) * S, 0);

  for (int s = 1; s <= S; ++s) ls.v_table[ls.vidx(H + 1, s)] = 0.0;

  for (int h = H; h >= 1; --h) {
    for (int s = 1; s <= S; ++s) {
      const int up = inst.successor(s);
      const double v_up = ls.v_table[ls.vidx(h + 1, up)];
      const double v_reset = ls.v_table[ls.vidx(h + 1, 1)];
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double expect;
        if (kernel == KernelKind::PooledChannels) {
          if (a == 0) {
            expect = v_up;
          } else {
            const double fail = failure_probs[a - 1];
            expect = fail * v_up + (1.0 - fail) * v_reset;
          }
        } else {
          const long long visits = ls.n(s, a);
          if (visits == 0) {
            // Unvisited pair: the bonus dominates anyway; keep the
            // expectation well-defined with a self-loop.
            expect = ls.v_table[ls.vidx(h + 1, s)];
          } else {
            expect = (ls.n_reset[ls.sa(s, a)] * v_reset +
                      ls.n_up[ls.sa(s, a)] * v_up) /
                     static_cast<double>(visits);
          }
        }
        double q = normalized_reward(inst, s, a) + expect;
        if (bonus_on) q += exploration_bonus(ls, s, a);
        if (clip_at_previous)
          q = std::min({ls.q_table[ls.qidx(h, s, a)], static_cast<double>(H), q});
        ls.q_table[ls.qidx(h, s, a)] = q;
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      ls.v_table[ls.vidx(h, s)] = best;
      plan.actions[static_cast<size_t>(h - 1) * S + (s - 1)] = best_a;
    }
  }
  return plan;
}

}  // namespace

EpisodePlan plan_episode_alg1(LearnerState& ls, const ProblemInstance& inst) {
  const EstimatedKernel k = estimated_kernel(ls);
  const bool bonus_on = ls.episode_index <= ls.theta0;
  return plan_core(ls, inst, KernelKind::PooledChannels,
                   k.failure_prob.data(), bonus_on, true);
}

EpisodePlan plan_episode_alg2(LearnerState& ls, const ProblemInstance& inst) {
  const EstimatedKernel k = estimated_kernel(ls);
  return plan_core(ls, inst, KernelKind::PooledChannels,
                   k.failure_prob.data(), false, false);
}

EpisodePlan plan_episode_ucbvi(LearnerState& ls, const ProblemInstance& inst) {
  return plan_core(ls, inst, KernelKind::PerStateAction, nullptr, true, true);
}

EpisodePlan plan_with_failure_probs(LearnerState& ls,
                                    const ProblemInstance& inst,
                                    std::span<const double> failure_probs,
                                    bool clip_at_previous) {
  assert(static_cast<int>(failure_probs.size()) == inst.num_channels);
  return plan_core(ls, inst, KernelKind::PooledChannels, failure_probs.data(),
                   false, clip_at_previous);
}

EpisodeLog run_episode(const ProblemInstance& inst, LearnerState& ls,
                       const EpisodePlan& plan, int initial, Rng& rng,
                       bool pilots_enabled) {
  assert(plan.horizon == inst.horizon);
  assert(initial >= 1 && initial <= inst.a_max);

  EpisodeLog log;
  log.initial_state = initial;
  log.steps.reserve(inst.horizon);

  int s = initial;
  for (int h = 1; h <= inst.horizon; ++h) {
    const int a = plan.action(h, s);
    const StepOutcome out = sample_step(inst, s, a, rng);
    EpisodeStep step;
    step.h = h;
    step.s = s;
    step.a = a;
    step.reward = normalized_reward(inst, s, a);
    step.cost = out.cost;
    step.next_state = out.next_state;
    if (a == 0 && pilots_enabled) {
      const int c = rng.uniform_int(1, inst.num_channels);
      step.pilot_channel = c;
      step.pilot_success = sample_pilot(inst, c, rng);
    }
    log.total_cost += out.cost;
    log.steps.push_back(step);
    s = out.next_state;
  }
  log.final_state = s;

  // Batched count update at the episode boundary.
  for (const EpisodeStep& step : log.steps) {
    if (step.a == 0) {
      ++ls.n_up[ls.sa(step.s, 0)];
    } else {
      const bool success = step.next_state == 1;
      if (success)
        ++ls.n_reset[ls.sa(step.s, step.a)];
      else
        ++ls.n_up[ls.sa(step.s, step.a)];
      ++ls.chan_attempts[step.a - 1];
      if (success) ++ls.chan_successes[step.a - 1];
    }
    if (step.pilot_channel) {
      const int c = *step.pilot_channel;
      const bool ok = *step.pilot_success;
      if (ok)
        ++ls.n_reset[ls.sa(step.s, c)];
      else
        ++ls.n_up[ls.sa(step.s, c)];
      ++ls.chan_attempts[c - 1];
      if (ok) ++ls.chan_successes[c - 1];
    }
  }
  ++ls.episode_index;
  return log;
}

int initial_state_rule(InitialStateMode mode, long long episode,
                       std::optional<int> prev_episode_final, Rng& rng,
                       int a_max) {
  if (mode == InitialStateMode::UniformRandom) return rng.uniform_int(1, a_max);
  if (episode <= 1) return 1;
  if (!prev_episode_final)
    throw std::logic_error("NR mode needs the previous episode's final state");
  return *prev_episode_final;
}

GapDiagnostics gap_diagnostics(const ProblemInstance& inst) {
  GapDiagnostics g;
  const double inf = std::numeric_limits<double>::infinity();
  g.delta_min = inf;
  if (inst.alpha > 0.0) {
    const double ratio =
        (1.0 - inst.alpha) * inst.power_cost / (inst.alpha * inst.a_max);
    for (int c = 1; c <= inst.num_channels; ++c)
      g.delta_min = std::min(g.delta_min, std::fabs(ratio - inst.mu(c)));
  }
  g.channel_gap_min = inf;
  for (int c = 1; c <= inst.num_channels; ++c) {
    if (c == inst.best_channel) continue;
    g.channel_gap_min =
        std::min(g.channel_gap_min,
                 std::fabs(inst.mu(inst.best_channel) - inst.mu(c)));
  }
  return g;
}

}  // namespace aoi
