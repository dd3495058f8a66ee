#include "aoi/verify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace aoi {

namespace {

std::string fmt(const char* format, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

double rel_err(double a, double b) {
  const double diff = std::fabs(a - b);
  if (diff == 0.0) return 0.0;
  return diff / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

}  // namespace

std::vector<CheckResult> instance_checks(const ProblemInstance& inst,
                                         double via_tol, long via_max_iters) {
  std::vector<CheckResult> out;
  const SolveResult solve = solve_average_cost(inst, via_tol, via_max_iters);

  const StructureReport rep = verify_structure(solve);
  out.push_back({"value-monotone", rep.value_monotone.pass,
                 rep.value_monotone.pass
                     ? ""
                     : "violated at s=" +
                           std::to_string(rep.value_monotone.violating_state)});
  out.push_back({"policy-drop-or-best", rep.actions_drop_or_best.pass,
                 rep.actions_drop_or_best.pass
                     ? ""
                     : "violated at s=" + std::to_string(
                           rep.actions_drop_or_best.violating_state)});
  out.push_back({"policy-threshold-form", rep.threshold_form.pass,
                 rep.threshold_form.pass
                     ? ""
                     : "violated at s=" +
                           std::to_string(rep.threshold_form.violating_state)});

  double residual = 0.0;
  for (int s = 1; s <= inst.a_max; ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= inst.num_channels; ++a)
      best = std::min(best, solve.q(s, a));
    residual = std::max(residual,
                        std::fabs(solve.rho_star + solve.v(s) - best));
  }
  out.push_back({"bellman-residual", residual < via_tol,
                 fmt("max residual %.3g (tol %.3g)", residual, via_tol)});

  const auto [rho_stat, gamma] = stationary_average_cost(inst, solve.threshold);
  double gamma_sum = 0.0;
  for (double g : gamma.gamma) gamma_sum += g;
  out.push_back({"gamma-normalized", std::fabs(gamma_sum - 1.0) <= 1e-12,
                 fmt("sum %.17g (%g)", gamma_sum, gamma_sum - 1.0)});

  out.push_back({"rho-via-vs-stationary", rel_err(solve.rho_star, rho_stat) <= 1e-6,
                 fmt("via %.12g vs stationary %.12g", solve.rho_star, rho_stat)});

  if (inst.age_fn.kind == AgeKind::Linear && solve.threshold >= 1 &&
      solve.threshold < inst.a_max) {
    const double rho_cf = closed_form_rho(inst, solve.threshold);
    out.push_back({"rho-closed-form-vs-stationary",
                   rel_err(rho_cf, rho_stat) <= 1e-9,
                   fmt("closed form %.12g vs stationary %.12g", rho_cf,
                       rho_stat)});
  } else {
    out.push_back({"rho-closed-form-vs-stationary", true,
                   "skipped (threshold at boundary or non-linear age)"});
  }

  const StationaryDistribution direct =
      stationary_distribution_linear_solve(inst, solve.threshold);
  double gamma_err = 0.0;
  for (int s = 0; s < inst.a_max; ++s)
    gamma_err = std::max(gamma_err,
                         std::fabs(gamma.gamma[s] - direct.gamma[s]));
  out.push_back({"gamma-recurrence-vs-linear-solve", gamma_err <= 1e-10,
                 fmt("max elementwise diff %.3g (tol %.3g)", gamma_err, 1e-10)});

  if (inst.alpha > 0.0 && inst.alpha < 1.0) {
    const auto [p_min, p_max] = power_thresholds(inst, solve);
    out.push_back({"power-thresholds-ordered", p_min <= p_max,
                   fmt("P_min %.12g, P_max %.12g", p_min, p_max)});
    if (p_min > 0.0) {
      ProblemInstance low = inst;
      low.power_cost = 0.5 * p_min;
      const SolveResult ls = solve_average_cost(low, via_tol, via_max_iters);
      out.push_back({"below-pmin-transmits-everywhere", ls.threshold == 0,
                     "threshold " + std::to_string(ls.threshold) +
                         " at P=" + std::to_string(low.power_cost)});
      ProblemInstance high = inst;
      high.power_cost = 2.0 * std::max(p_max, 1e-12);
      const SolveResult hs = solve_average_cost(high, via_tol, via_max_iters);
      out.push_back({"above-pmax-drops-everywhere", hs.threshold == inst.a_max,
                     "threshold " + std::to_string(hs.threshold) +
                         " at P=" + std::to_string(high.power_cost)});
    } else {
      out.push_back({"below-pmin-transmits-everywhere", true,
                     "skipped (P_min = 0)"});
      out.push_back({"above-pmax-drops-everywhere", true,
                     "skipped (P_min = 0)"});
    }
  }

  return out;
}

ProblemInstance random_instance(Rng& rng) {
  ProblemInstance p;
  p.num_channels = rng.uniform_int(1, 8);
  p.a_max = rng.uniform_int(5, 50);
  while (true) {
    p.success_probs.clear();
    for (int c = 0; c < p.num_channels; ++c)
      p.success_probs.push_back(0.05 + 0.9 * rng.unit());
    // Redraw on a duplicated maximum so the best channel is unambiguous.
    int best = 0;
    bool dup = false;
    for (int c = 1; c < p.num_channels; ++c)
      if (p.success_probs[c] > p.success_probs[best]) best = c;
    for (int c = 0; c < p.num_channels; ++c)
      if (c != best && p.success_probs[c] == p.success_probs[best]) dup = true;
    if (!dup) break;
  }
  p.alpha = 0.05 + 0.9 * rng.unit();
  p.power_cost = 0.01 + 49.99 * rng.unit();
  p.age_fn.kind = AgeKind::Linear;
  p.horizon = 32;
  p.num_episodes = 100;
  p.delta = 0.01;
  return validated(std::move(p));
}

}  // namespace aoi
