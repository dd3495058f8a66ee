#include "aoi/exact.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>

namespace aoi {

namespace {

// One-step lookahead cost of (s, a) against a value vector indexed by s-1.
double backup(const ProblemInstance& inst, int s, int a,
              const std::vector<double>& v) {
  const double c = step_cost(inst, s, a);
  const int up = inst.successor(s);
  if (a == 0) return c + v[up - 1];
  const double mu = inst.mu(a);
  return c + mu * v[0] + (1.0 - mu) * v[up - 1];
}

// Greedy action; ties prefer dropping, then the lowest channel index.
int greedy_min(const ProblemInstance& inst, int s,
               const std::vector<double>& v, double* best_out) {
  int best_a = 0;
  double best = backup(inst, s, 0, v);
  for (int a = 1; a <= inst.num_channels; ++a) {
    const double q = backup(inst, s, a, v);
    if (q < best) {
      best = q;
      best_a = a;
    }
  }
  if (best_out) *best_out = best;
  return best_a;
}

// Gaussian elimination with partial pivoting; a is n x n row-major and both
// arguments are consumed. Sized for the small chains handled here.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0)
      throw std::runtime_error("singular matrix in stationary solve");
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * x[c];
    x[r] = acc / a[r * n + r];
  }
  return x;
}

// Relative values of a fixed stationary policy (pinned V(1) = 0), from the
// Poisson equations rho + V(s) = c(s, a_s) + sum_s' P(s'|s,a_s) V(s').
// Unknowns are [rho, V(2), ..., V(a_max)].
std::vector<double> policy_relative_values(const ProblemInstance& inst,
                                           const std::vector<int>& actions) {
  const int n = inst.a_max;
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> b(n, 0.0);
  auto col_of = [](int state) { return state - 1; };  // V(s) at column s-1; column 0 is rho
  for (int s = 1; s <= n; ++s) {
    double* row = &a[static_cast<size_t>(s - 1) * n];
    row[0] += 1.0;                       // rho
    if (s >= 2) row[col_of(s)] += 1.0;   // V(s)
    const int act = actions[s - 1];
    const int up = inst.successor(s);
    if (act == 0) {
      if (up >= 2) row[col_of(up)] -= 1.0;
    } else {
      const double mu = inst.mu(act);
      if (up >= 2) row[col_of(up)] -= (1.0 - mu);
      // the reset lands on state 1 whose value is pinned at 0
    }
    b[s - 1] = step_cost(inst, s, act);
  }
  std::vector<double> x = solve_dense(std::move(a), std::move(b));
  std::vector<double> values(n, 0.0);
  for (int s = 2; s <= n; ++s) values[s - 1] = x[s - 1];
  return values;  // values[0] = V(1) = 0; x[0] = rho, unused here
}

}  // namespace

SolveResult solve_average_cost(const ProblemInstance& inst, double tol,
                               long max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const int S = inst.a_max;
  std::vector<double> v(S, 0.0), w(S, 0.0);
  double rho = 0.0;
  double span = std::numeric_limits<double>::infinity();
  long iters = 0;

  while (iters < max_iters) {
    ++iters;
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -dmin;
    for (int s = 1; s <= S; ++s) {
      double best;
      greedy_min(inst, s, v, &best);
      w[s - 1] = best;
      const double d = best - v[s - 1];
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    span = dmax - dmin;
    rho = w[0];  // offset at the reference state; v[0] stays 0
    for (int s = 1; s <= S; ++s) v[s - 1] = w[s - 1] - rho;
    if (span < tol) break;
  }
  if (!(span < tol))
    throw NonConvergenceError("value iteration span " + std::to_string(span) +
                              " did not reach tol after " +
                              std::to_string(iters) + " sweeps");

  SolveResult res;
  res.rho_star = rho;
  res.value_fn = v;
  res.best_channel = inst.best_channel;
  res.iterations = iters;
  res.final_span = span;
  res.q_table.resize(static_cast<size_t>(S) * (inst.num_channels + 1));
  res.policy.stationary = true;
  res.policy.a_max = S;
  res.policy.actions.resize(S);
  for (int s = 1; s <= S; ++s) {
    for (int a = 0; a <= inst.num_channels; ++a)
      res.q_table[static_cast<size_t>(s - 1) * (inst.num_channels + 1) + a] =
          backup(inst, s, a, v);
    res.policy.actions[s - 1] = greedy_min(inst, s, v, nullptr);
  }
  res.threshold = threshold_from_policy(res.policy.actions);
  return res;
}

FiniteHorizonSolution solve_finite_horizon(const ProblemInstance& inst) {
  const int S = inst.a_max;
  const int H = inst.horizon;
  FiniteHorizonSolution sol;
  sol.horizon = H;
  sol.a_max = S;
  sol.value.assign(static_cast<size_t>(H + 1) * S, 0.0);
  sol.policy.stationary = false;
  sol.policy.horizon = H;
  sol.policy.a_max = S;
  sol.policy.actions.assign(static_cast<size_t>(H) * S, 0);

  std::vector<double> next(S, 0.0);
  for (int h = H; h >= 1; --h) {
    for (int s = 1; s <= S; ++s) {
      double best;
      const int a = greedy_min(inst, s, next, &best);
      sol.value[static_cast<size_t>(h - 1) * S + (s - 1)] = best;
      sol.policy.actions[static_cast<size_t>(h - 1) * S + (s - 1)] = a;
    }
    for (int s = 0; s < S; ++s)
      next[s] = sol.value[static_cast<size_t>(h - 1) * S + s];
  }
  return sol;
}

double closed_form_rho(const ProblemInstance& inst, int a_th) {
  if (inst.age_fn.kind != AgeKind::Linear)
    throw std::domain_error("closed_form_rho requires the linear age function");
  if (a_th < 1 || a_th >= inst.a_max)
    throw std::domain_error("closed_form_rho requires 1 <= a_th < a_max");
  const double mu = inst.mu(inst.best_channel);
  const double q = 1.0 - mu;
  const double alpha = inst.alpha;
  const double p = inst.power_cost;
  const int beta = inst.a_max - (a_th + 1);

  const double b1 = alpha * a_th * (a_th + 1) / 2.0;
  const double b2 =
      (alpha * (a_th + 1) + (1.0 - alpha) * p + alpha * beta * std::pow(q, beta)) /
      mu;
  // Geometric-sum reduction of the tail ages; see the stationary route for
  // the term-by-term form this collapses.
  const double tail = 1.0 -
                      (beta == 0 ? 0.0 : beta * std::pow(q, beta - 1)) +
                      (beta - 1) * std::pow(q, beta);
  const double b3 = alpha * q / (mu * mu) * tail;
  return (b1 + b2 + b3) / (a_th + 1.0 / mu);
}

std::pair<double, StationaryDistribution> stationary_average_cost(
    const ProblemInstance& inst, int a_th) {
  if (a_th < 0 || a_th > inst.a_max)
    throw std::domain_error("stationary_average_cost requires 0 <= a_th <= a_max");
  const int S = inst.a_max;
  StationaryDistribution dist;
  dist.gamma.assign(S, 0.0);

  if (a_th == S) {
    dist.gamma[S - 1] = 1.0;  // all-drop chain absorbs at the cap
    return {inst.alpha * inst.age(S), dist};
  }

  const double mu = inst.mu(inst.best_channel);
  const double q = 1.0 - mu;
  const int beta = S - (a_th + 1);
  const double g = 1.0 / (a_th + 1.0 / mu);
  for (int i = 1; i <= a_th; ++i) dist.gamma[i - 1] = g;
  for (int i = 0; i <= beta - 1; ++i)
    dist.gamma[a_th + i] = std::pow(q, i) * g;
  dist.gamma[S - 1] = std::pow(q, beta) / mu * g;

  double rho = 0.0;
  for (int s = 1; s <= S; ++s) {
    double c = inst.alpha * inst.age(s);
    if (s > a_th) c += (1.0 - inst.alpha) * inst.power_cost;
    rho += c * dist.gamma[s - 1];
  }
  return {rho, dist};
}

StationaryDistribution stationary_distribution_linear_solve(
    const ProblemInstance& inst, int a_th) {
  if (a_th < 0 || a_th > inst.a_max)
    throw std::domain_error("stationary_distribution_linear_solve requires 0 <= a_th <= a_max");
  const int n = inst.a_max;
  const double mu = inst.mu(inst.best_channel);

  // Transition matrix of the threshold chain.
  std::vector<double> p(static_cast<size_t>(n) * n, 0.0);
  for (int s = 1; s <= n; ++s) {
    const int up = inst.successor(s);
    if (s <= a_th) {
      p[static_cast<size_t>(s - 1) * n + (up - 1)] += 1.0;
    } else {
      p[static_cast<size_t>(s - 1) * n + 0] += mu;
      p[static_cast<size_t>(s - 1) * n + (up - 1)] += 1.0 - mu;
    }
  }

  // gamma' P = gamma', sum gamma = 1: rows of (P' - I), first row replaced
  // by the normalization.
  std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> b(n, 0.0);
  for (int c = 0; c < n; ++c) m[c] = 1.0;
  b[0] = 1.0;
  for (int r = 1; r < n; ++r)
    for (int c = 0; c < n; ++c)
      m[static_cast<size_t>(r) * n + c] =
          p[static_cast<size_t>(c) * n + r] - (r == c ? 1.0 : 0.0);

  StationaryDistribution dist;
  dist.gamma = solve_dense(std::move(m), std::move(b));
  return dist;
}

std::pair<double, double> power_thresholds(const ProblemInstance& inst,
                                           const SolveResult& solve) {
  if (inst.alpha >= 1.0)
    throw std::domain_error("power thresholds undefined at alpha = 1");
  // The value function in the threshold formulas is the fixed point for the
  // power level being diagnosed, not for the instance's own P. Within the
  // transmit-everywhere (resp. drop-everywhere) regime the relative values
  // do not depend on P, so evaluating those two policies gives the exact
  // switch points: below p_min every state transmits, above p_max every
  // state drops.
  const double mu = inst.mu(solve.best_channel);
  const double scale = mu / (1.0 - inst.alpha);
  const std::vector<int> transmit_all(inst.a_max, solve.best_channel);
  const std::vector<int> drop_all(inst.a_max, 0);
  const std::vector<double> vt = policy_relative_values(inst, transmit_all);
  const std::vector<double> vd = policy_relative_values(inst, drop_all);
  const double p_min = scale * (vt[1] - vt[0]);
  const double p_max = scale * (vd[inst.a_max - 1] - vd[0]);
  return {p_min, p_max};
}

StructureReport verify_structure(const SolveResult& solve, double slack) {
  StructureReport rep;
  const int S = static_cast<int>(solve.value_fn.size());
  for (int s = 1; s < S; ++s) {
    if (solve.v(s + 1) < solve.v(s) - slack) {
      rep.value_monotone = {false, s};
      break;
    }
  }
  for (int s = 1; s <= S; ++s) {
    const int a = solve.policy.action(s);
    if (a != 0 && a != solve.best_channel) {
      rep.actions_drop_or_best = {false, s};
      break;
    }
  }
  bool transmitting = false;
  for (int s = 1; s <= S; ++s) {
    const int a = solve.policy.action(s);
    if (a != 0) {
      transmitting = true;
    } else if (transmitting) {
      rep.threshold_form = {false, s};
      break;
    }
  }
  return rep;
}

int threshold_from_policy(const std::vector<int>& actions) {
  int th = 0;
  for (int s = 1; s <= static_cast<int>(actions.size()); ++s)
    if (actions[s - 1] == 0) th = s;
  return th;
}

std::string format_solve_table(const ProblemInstance& inst,
                               const SolveResult& solve) {
  std::string out = "s\tV";
  for (int a = 0; a <= inst.num_channels; ++a)
    out += "\tQ(a=" + std::to_string(a) + ")";
  out += "\tpolicy\n";
  char buf[40];
  for (int s = 1; s <= inst.a_max; ++s) {
    out += std::to_string(s);
    std::snprintf(buf, sizeof buf, "\t%.17g", solve.v(s));
    out += buf;
    for (int a = 0; a <= inst.num_channels; ++a) {
      std::snprintf(buf, sizeof buf, "\t%.17g", solve.q(s, a));
      out += buf;
    }
    out += "\t" + std::to_string(solve.policy.action(s)) + "\n";
  }
  return out;
}

}  // namespace aoi
