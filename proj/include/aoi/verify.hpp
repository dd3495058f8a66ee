#pragma once

#include <string>
#include <vector>

#include "aoi/exact.hpp"
#include "aoi/problem.hpp"
#include "aoi/rng.hpp"

namespace aoi {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Structural and oracle checks for one instance: monotone values, the
/// {drop, best-channel} threshold policy, Bellman residual, agreement of the
/// iterative, closed-form and stationary-chain average costs, the
/// recurrence-vs-linear-solve distribution cross-check, and the
/// power-threshold re-solves.
std::vector<CheckResult> instance_checks(const ProblemInstance& inst,
                                         double via_tol = 1e-10,
                                         long via_max_iters = 1000000);

/// Random solvable instance for sweeps: a_max in 5..50, 1..8 channels with
/// probabilities in (0.05, 0.95) and a unique maximum, alpha in (0.05, 0.95),
/// power cost in (0, 50), linear age.
ProblemInstance random_instance(Rng& rng);

}  // namespace aoi
