#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aoi/problem.hpp"

namespace aoi {

/// Deterministic state -> action mapping, stationary or per-step.
struct PolicyTable {
  bool stationary = true;
  int horizon = 0;  // 0 when stationary
  int a_max = 0;
  std::vector<int> actions;  // a_max entries, or horizon*a_max (h-major)

  int action(int s) const { return actions[s - 1]; }
  int action(int h, int s) const {
    return actions[static_cast<size_t>(h - 1) * a_max + (s - 1)];
  }
};

struct StationaryDistribution {
  std::vector<double> gamma;  // one probability per state 1..a_max
};

struct SolveResult {
  double rho_star = 0.0;          // optimal long-run average cost
  std::vector<double> value_fn;   // relative values, pinned V(1) = 0
  std::vector<double> q_table;    // a_max x (C+1), row-major by state
  PolicyTable policy;             // stationary
  int threshold = 0;              // A_th: largest s with policy(s) = 0
  int best_channel = 0;           // k*
  long iterations = 0;
  double final_span = 0.0;

  double v(int s) const { return value_fn[s - 1]; }
  double q(int s, int a) const {
    const int width = static_cast<int>(q_table.size()) / a_max_();
    return q_table[static_cast<size_t>(s - 1) * width + a];
  }

 private:
  int a_max_() const { return static_cast<int>(value_fn.size()); }
};

struct FiniteHorizonSolution {
  int horizon = 0;
  int a_max = 0;
  PolicyTable policy;         // per-step, horizon x a_max
  std::vector<double> value;  // (horizon+1) x a_max; row H+1 is all zero

  double v(int h, int s) const {
    return value[static_cast<size_t>(h - 1) * a_max + (s - 1)];
  }
};

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative value iteration for the infinite-horizon average-cost problem.
///
/// Each sweep applies the Bellman operator, subtracts the reference value at
/// s = 1 (so the returned V is pinned at V(1) = 0) and stops once the span
/// seminorm of successive differences drops below tol; the subtracted offset
/// at convergence is rho*. The greedy tie-break prefers dropping, then the
/// lowest channel index.
SolveResult solve_average_cost(const ProblemInstance& inst, double tol = 1e-10,
                               long max_iters = 1000000);

/// Backward induction over the episode horizon, cost-minimizing form with
/// terminal values zero. Same tie-break as solve_average_cost.
FiniteHorizonSolution solve_finite_horizon(const ProblemInstance& inst);

/// Closed-form long-run average cost of the threshold policy "drop while
/// s <= a_th, then transmit over the best channel". Requires the linear age
/// function and 1 <= a_th < a_max.
double closed_form_rho(const ProblemInstance& inst, int a_th);

/// Average cost and stationary distribution of the same threshold chain,
/// built from the closed balance-equation recurrences. Accepts the full
/// range 0 <= a_th <= a_max (a_th = a_max is the absorbing all-drop chain).
std::pair<double, StationaryDistribution> stationary_average_cost(
    const ProblemInstance& inst, int a_th);

/// Independent route to the same distribution: assembles the transition
/// matrix of the threshold chain and solves gamma' P = gamma' directly.
StationaryDistribution stationary_distribution_linear_solve(
    const ProblemInstance& inst, int a_th);

/// Diagnostic power levels from the converged relative values: below P_min
/// the re-solved policy transmits everywhere, above P_max it drops
/// everywhere. Throws std::domain_error when alpha = 1.
std::pair<double, double> power_thresholds(const ProblemInstance& inst,
                                           const SolveResult& solve);

struct StructureCheck {
  bool pass = true;
  int violating_state = 0;  // first offending s when pass is false
};

struct StructureReport {
  StructureCheck value_monotone;        // V(s) non-decreasing
  StructureCheck actions_drop_or_best;  // policy(s) in {0, k*}
  StructureCheck threshold_form;        // no drop above a transmit state

  bool all_pass() const {
    return value_monotone.pass && actions_drop_or_best.pass &&
           threshold_form.pass;
  }
};

/// Checks the structural properties the converged solution must satisfy.
StructureReport verify_structure(const SolveResult& solve,
                                 double slack = 1e-10);

/// Largest state mapped to drop; a_max when the policy drops everywhere and
/// 0 when it transmits everywhere.
int threshold_from_policy(const std::vector<int>& actions);

/// Plain-text table (s, V, Q(s,0..C), policy) with round-trip precision.
std::string format_solve_table(const ProblemInstance& inst,
                               const SolveResult& solve);

}  // namespace aoi
