#include "aoi/problem.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace aoi {

ProblemInstance validated(ProblemInstance p) {
  if (p.num_channels < 1)
    throw std::invalid_argument("num_channels must be >= 1");
  if (static_cast<int>(p.success_probs.size()) != p.num_channels)
    throw std::invalid_argument(
        "success_probs must list exactly num_channels values (got " +
        std::to_string(p.success_probs.size()) + ", expected " +
        std::to_string(p.num_channels) + ")");
  for (int i = 0; i < p.num_channels; ++i) {
    const double mu = p.success_probs[i];
    if (!(mu > 0.0 && mu < 1.0))
      throw std::invalid_argument("success_probs[" + std::to_string(i) +
                                  "] = " + std::to_string(mu) +
                                  " must lie strictly inside (0,1)");
  }
  if (p.a_max < 2) throw std::invalid_argument("a_max must be >= 2");
  if (!(p.power_cost >= 0.0) || !std::isfinite(p.power_cost))
    throw std::invalid_argument("power_cost must be a nonnegative real");
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0,1]");
  if (p.age_fn.kind == AgeKind::Exponential && !(p.age_fn.psi > 0.0))
    throw std::invalid_argument("age_psi must be > 0 for the exponential age function");
  if (p.age_fn.kind == AgeKind::Linear) p.age_fn.psi = 0.0;
  if (p.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (p.num_episodes < 1)
    throw std::invalid_argument("num_episodes must be >= 1");
  if (!(p.delta > 0.0 && p.delta < 1.0))
    throw std::invalid_argument("delta must lie strictly inside (0,1)");

  // Lowest index among the maximal success probabilities.
  int best = 1;
  for (int c = 2; c <= p.num_channels; ++c)
    if (p.success_probs[c - 1] > p.success_probs[best - 1]) best = c;
  p.best_channel = best;

  if (!(p.reward_scale() > 0.0))
    throw std::invalid_argument(
        "degenerate reward normalization: alpha*(F(a_max)-F(1)) + "
        "(1-alpha)*power_cost must be > 0 (alpha = 0 with power_cost = 0?)");
  if (!std::isfinite(p.cost_max()))
    throw std::invalid_argument("age function overflows at a_max; reduce age_psi or a_max");
  return p;
}

double step_cost(const ProblemInstance& inst, int s, int a) {
  assert(s >= 1 && s <= inst.a_max);
  assert(a >= 0 && a <= inst.num_channels);
  double c = inst.alpha * inst.age(s);
  if (a != 0) c += (1.0 - inst.alpha) * inst.power_cost;
  return c;
}

std::vector<double> transition_dist(const ProblemInstance& inst, int s, int a) {
  assert(s >= 1 && s <= inst.a_max);
  assert(a >= 0 && a <= inst.num_channels);
  std::vector<double> dist(inst.a_max, 0.0);
  const int up = inst.successor(s);
  if (a == 0) {
    dist[up - 1] = 1.0;
  } else {
    const double mu = inst.mu(a);
    dist[0] = mu;          // reset to AoI 1; up >= 2, so no aliasing
    dist[up - 1] = 1.0 - mu;
  }
  return dist;
}

StepOutcome sample_step(const ProblemInstance& inst, int s, int a, Rng& rng) {
  assert(s >= 1 && s <= inst.a_max);
  assert(a >= 0 && a <= inst.num_channels);
  StepOutcome out;
  out.cost = step_cost(inst, s, a);
  if (a == 0) {
    out.next_state = inst.successor(s);
  } else {
    const bool success = rng.bernoulli(inst.mu(a));
    out.transmission_success = success;
    out.next_state = success ? 1 : inst.successor(s);
  }
  return out;
}

bool sample_pilot(const ProblemInstance& inst, int channel, Rng& rng) {
  if (channel < 1 || channel > inst.num_channels)
    throw std::invalid_argument("pilot channel index " +
                                std::to_string(channel) +
                                " outside 1.." + std::to_string(inst.num_channels));
  return rng.bernoulli(inst.mu(channel));
}

double normalized_reward(const ProblemInstance& inst, int s, int a) {
  return (inst.cost_max() - step_cost(inst, s, a)) / inst.reward_scale();
}

double reward_to_cost(const ProblemInstance& inst, double reward) {
  return inst.cost_max() - reward * inst.reward_scale();
}

}  // namespace aoi
