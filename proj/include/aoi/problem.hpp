#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "aoi/rng.hpp"

namespace aoi {

// States are the AoI values s in {1..a_max}; actions are integers in
// {0..num_channels} where 0 drops the update and a = i > 0 transmits it over
// channel i (channels are 1-based throughout).

enum class AgeKind { Linear, Exponential };

/// Per-slot age penalty F(s): s for Linear, exp(psi * s) for Exponential.
struct AgeFunction {
  AgeKind kind = AgeKind::Linear;
  double psi = 0.0;

  double operator()(int s) const {
    return kind == AgeKind::Linear ? static_cast<double>(s)
                                   : std::exp(psi * static_cast<double>(s));
  }
};

/// Full environment parameterization shared by the solvers, the learners and
/// the experiment harness. Build one with validated(); instances are treated
/// as immutable values afterwards.
struct ProblemInstance {
  int num_channels = 0;               // C
  std::vector<double> success_probs;  // mu_i, each strictly inside (0,1)
  int a_max = 0;                      // AoI cap, >= 2
  double power_cost = 0.0;            // P
  double alpha = 0.0;                 // AoI weight in [0,1]
  AgeFunction age_fn;
  int horizon = 0;                    // H, episode length
  long long num_episodes = 0;         // K
  double delta = 0.0;                 // confidence parameter in (0,1)

  int best_channel = 0;  // k*, lowest index of a maximal mu; set by validated()

  double mu(int channel) const { return success_probs[channel - 1]; }
  double age(int s) const { return age_fn(s); }
  int successor(int s) const { return s + 1 < a_max ? s + 1 : a_max; }
  long long total_steps() const { return num_episodes * horizon; }

  double cost_min() const { return alpha * age(1); }
  double cost_max() const {
    return alpha * age(a_max) + (1.0 - alpha) * power_cost;
  }
  /// Denominator of the reward normalization; strictly positive by validation.
  double reward_scale() const { return cost_max() - cost_min(); }
};

/// Checks every instance invariant and fills in derived fields. Throws
/// std::invalid_argument naming the offending field.
ProblemInstance validated(ProblemInstance p);

struct StepOutcome {
  int next_state;
  double cost;
  // Present iff the action transmitted (a > 0).
  std::optional<bool> transmission_success;
};

/// Per-slot cost alpha * F(s) + (1 - alpha) * P * 1(a != 0).
double step_cost(const ProblemInstance& inst, int s, int a);

/// Dense next-state distribution for (s, a); entries sum to 1.
std::vector<double> transition_dist(const ProblemInstance& inst, int s, int a);

/// Draws one environment transition. Identical seeds give identical outcomes.
StepOutcome sample_step(const ProblemInstance& inst, int s, int a, Rng& rng);

/// Bernoulli(mu_channel) probe sent during an idle slot. Costs nothing and
/// does not touch the AoI state. Throws on a channel index outside 1..C.
bool sample_pilot(const ProblemInstance& inst, int channel, Rng& rng);

/// Affine map of step_cost onto [0,1]: the cheapest pair (s=1, drop) maps to
/// 1 and the dearest pair (s=a_max, transmit) maps to 0.
double normalized_reward(const ProblemInstance& inst, int s, int a);

/// Inverse of normalized_reward, for converting planned rewards back to
/// cost units.
double reward_to_cost(const ProblemInstance& inst, double reward);

}  // namespace aoi
