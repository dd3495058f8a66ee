#include <doctest.h>

#include <cmath>
#include <vector>

#include "aoi/exact.hpp"
#include "aoi/learner.hpp"
#include "aoi/verify.hpp"
#include "test_util.hpp"

using namespace aoi;
using aoi_test::reference_instance;

namespace {

EpisodePlan all_drop_plan(const ProblemInstance& inst) {
  EpisodePlan plan;
  plan.horizon = inst.horizon;
  plan.a_max = inst.a_max;
  plan.actions.assign(static_cast<size_t>(inst.horizon) * inst.a_max, 0);
  return plan;
}

std::vector<double> true_failure_probs(const ProblemInstance& inst) {
  std::vector<double> fail(inst.num_channels);
  for (int c = 1; c <= inst.num_channels; ++c) fail[c - 1] = 1.0 - inst.mu(c);
  return fail;
}

}  // namespace

TEST_CASE("theta0 follows the C^2 log(2C/delta) schedule") {
  // ceil(16 * ln(800)) with ln(800) = 6.68461172766793.
  CHECK(theta0_episodes(4, 0.01, 1.0) == 107.0);
  CHECK(theta0_episodes(4, 0.01, 2.0) == 214.0);
  CHECK(theta0_episodes(1, 0.5, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("exploration bonus floors the count and halves per quadrupling") {
  const auto inst = reference_instance();
  LearnerState ls = make_learner_state(inst);
  CHECK(exploration_bonus(ls, 3, 1) == exploration_bonus(ls, 5, 2));  // N = 0 floor

  ls.n_up[ls.sa(3, 1)] = 100;
  const double b100 = exploration_bonus(ls, 3, 1);
  ls.n_up[ls.sa(3, 1)] = 200;
  const double b200 = exploration_bonus(ls, 3, 1);
  CHECK(b200 == doctest::Approx(b100 / std::sqrt(2.0)).epsilon(1e-12));

  // 7 H ln(5 S A T / delta) at N = 1.
  ls.n_up[ls.sa(3, 1)] = 1;
  const double expected =
      7.0 * 30 * std::log(5.0 * 10 * 5 * (2000.0 * 30) / 0.01);
  CHECK(exploration_bonus(ls, 3, 1) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("estimated kernel rows sum to one and default to optimism") {
  const auto inst = reference_instance();
  LearnerState ls = make_learner_state(inst);
  SUBCASE("unseen channels are presumed perfect") {
    const EstimatedKernel k = estimated_kernel(ls);
    for (int c = 1; c <= inst.num_channels; ++c)
      CHECK(k.failure_prob[c - 1] == 0.0);
  }
  SUBCASE("rows sum to one for arbitrary counts") {
    ls.chan_attempts = {10, 4, 0, 7};
    ls.chan_successes = {2, 4, 0, 3};
    const EstimatedKernel k = estimated_kernel(ls);
    for (int s = 1; s <= inst.a_max; ++s) {
      CHECK(k.prob(inst, s, 0, inst.successor(s)) == 1.0);
      for (int a = 1; a <= inst.num_channels; ++a) {
        double total = k.prob(inst, s, a, 1) + k.prob(inst, s, a, inst.successor(s));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("first-episode plan respects the H cap and determinism") {
  const auto inst = reference_instance();
  LearnerState ls = make_learner_state(inst);
  const EpisodePlan plan = plan_episode_alg1(ls, inst);
  (void)plan;
  for (double q : ls.q_table) {
    CHECK(q <= inst.horizon + 1e-12);
    CHECK(q >= 0.0);
  }
  LearnerState ls2 = make_learner_state(inst);
  const EpisodePlan plan2 = plan_episode_alg1(ls2, inst);
  CHECK(plan.actions == plan2.actions);
}

TEST_CASE("alg1 Q tables are pointwise non-increasing across episodes") {
  const auto inst = reference_instance();
  LearnerState ls = make_learner_state(inst);
  Rng rng(71);
  std::vector<double> prev_q = ls.q_table;
  std::optional<int> prev_final;
  for (int k = 1; k <= 8; ++k) {
    const EpisodePlan plan = plan_episode_alg1(ls, inst);
    for (size_t i = 0; i < ls.q_table.size(); ++i) {
      CHECK(ls.q_table[i] <= prev_q[i] + 1e-12);
      CHECK(ls.q_table[i] >= 0.0);
      CHECK(ls.q_table[i] <= inst.horizon + 1e-12);
    }
    prev_q = ls.q_table;
    const int s0 = initial_state_rule(InitialStateMode::NR, k, prev_final, rng,
                                      inst.a_max);
    prev_final = run_episode(inst, ls, plan, s0, rng, true).final_state;
  }
}

TEST_CASE("bonus switches off strictly after theta0") {
  const auto inst = reference_instance();
  // Past the cutoff the alg1 plan must coincide with the bonus-free core on
  // the same estimates.
  LearnerState past = make_learner_state(inst);
  CHECK(past.theta0 == 107.0);
  past.episode_index = 108;
  const EpisodePlan a = plan_episode_alg1(past, inst);

  LearnerState core = make_learner_state(inst);
  const EstimatedKernel k = estimated_kernel(core);
  const EpisodePlan b = plan_with_failure_probs(core, inst, k.failure_prob, true);
  CHECK(a.actions == b.actions);
  CHECK(past.q_table == core.q_table);

  // theta0_constant = 0 disables the exploration phase outright.
  CHECK(theta0_episodes(4, 0.01, 0.0) == 0.0);

  LearnerState with_bonus = make_learner_state(inst);
  const EpisodePlan c = plan_episode_alg1(with_bonus, inst);
  (void)c;
  CHECK(with_bonus.q_table != core.q_table);  // bonus visibly contributes at k=1
}

TEST_CASE("planners with the true kernel reproduce exact backward induction") {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    ProblemInstance inst = random_instance(rng);
    inst.horizon = 20;
    const std::vector<double> fail = true_failure_probs(inst);
    const FiniteHorizonSolution oracle = solve_finite_horizon(inst);

    for (bool clip : {true, false}) {
      LearnerState ls = make_learner_state(inst);
      const EpisodePlan plan = plan_with_failure_probs(ls, inst, fail, clip);
      for (int h = 1; h <= inst.horizon; ++h)
        for (int s = 1; s <= inst.a_max; ++s)
          REQUIRE(plan.action(h, s) == oracle.policy.action(h, s));
    }
  }
}

TEST_CASE("optimistic first plan on a two-state instance, enumerated by hand") {
  // alpha = 0.5, P = 0.2, A_m = 2, H = 2, unvisited channels treated as
  // perfect. Rewards: r(1,0) = 1, r(1,t) = 5/6, r(2,0) = 1/6, r(2,t) = 0.
  // Last step: drop everywhere (V = [1, 1/6]). First step: transmitting
  // reaches state 1 surely, so Q(1,t) = 5/6 + 1 = 11/6 beats 1 + 1/6 and
  // Q(2,t) = 0 + 1 = 1 beats 1/6 + 1/6; ties inside the channel set break
  // to the lowest index.
  ProblemInstance p;
  p.num_channels = 2;
  p.success_probs = {0.3, 0.6};
  p.a_max = 2;
  p.power_cost = 0.2;
  p.alpha = 0.5;
  p.age_fn = {AgeKind::Linear, 0.0};
  p.horizon = 2;
  p.num_episodes = 10;
  p.delta = 0.01;
  const auto inst = validated(std::move(p));

  LearnerState ls = make_learner_state(inst);
  const EpisodePlan plan = plan_episode_alg2(ls, inst);
  CHECK(plan.action(1, 1) == 1);
  CHECK(plan.action(1, 2) == 1);
  CHECK(plan.action(2, 1) == 0);
  CHECK(plan.action(2, 2) == 0);
  CHECK(ls.v_table[ls.vidx(1, 1)] == doctest::Approx(11.0 / 6.0).epsilon(1e-12));

  // Pure function of the counts: replanning changes nothing.
  const EpisodePlan again = plan_episode_alg2(ls, inst);
  CHECK(plan.actions == again.actions);
}

TEST_CASE("ucbvi plans deterministically and never reads pilot data") {
  const auto inst = reference_instance();
  LearnerState a = make_learner_state(inst);
  LearnerState b = make_learner_state(inst);
  CHECK(plan_episode_ucbvi(a, inst).actions ==
        plan_episode_ucbvi(b, inst).actions);
}

TEST_CASE("run_episode bookkeeping") {
  ProblemInstance inst = reference_instance();
  inst.horizon = 50;

  SUBCASE("all-drop plan with pilots probes one channel per slot") {
    LearnerState ls = make_learner_state(inst);
    Rng rng(401);
    const EpisodeLog log =
        run_episode(inst, ls, all_drop_plan(inst), 1, rng, true);
    CHECK(log.steps.size() == 50);
    long long attempts = 0;
    for (int c = 0; c < inst.num_channels; ++c) {
      attempts += ls.chan_attempts[c];
      // ~12.5 expected per channel; 4 sigma band is about [0.3, 24.7].
      CHECK(ls.chan_attempts[c] >= 1);
      CHECK(ls.chan_attempts[c] <= 24);
      CHECK(ls.chan_successes[c] <= ls.chan_attempts[c]);
    }
    CHECK(attempts == 50);
    for (const EpisodeStep& st : log.steps) {
      CHECK(st.pilot_channel.has_value());
      CHECK(st.pilot_success.has_value());
    }
    // Every drop transition is counted under action 0.
    long long drop_counts = 0;
    for (int s = 1; s <= inst.a_max; ++s) drop_counts += ls.n(s, 0);
    CHECK(drop_counts == 50);
    CHECK(ls.episode_index == 2);
  }

  SUBCASE("pilots disabled leave the channel tallies untouched") {
    LearnerState ls = make_learner_state(inst);
    Rng rng(402);
    const EpisodeLog log =
        run_episode(inst, ls, all_drop_plan(inst), 3, rng, false);
    for (int c = 0; c < inst.num_channels; ++c) {
      CHECK(ls.chan_attempts[c] == 0);
      CHECK(ls.chan_successes[c] == 0);
    }
    for (const EpisodeStep& st : log.steps)
      CHECK(!st.pilot_channel.has_value());
    (void)log;
  }

  SUBCASE("successful transmissions record the reset triple") {
    EpisodePlan plan = all_drop_plan(inst);
    for (auto& a : plan.actions) a = 4;  // transmit on the best channel
    LearnerState ls = make_learner_state(inst);
    Rng rng(403);
    const EpisodeLog log = run_episode(inst, ls, plan, 5, rng, true);
    long long resets = 0, ups = 0, successes = 0;
    for (const EpisodeStep& st : log.steps) {
      if (st.next_state == 1) ++successes;
      CHECK(!st.pilot_channel.has_value());  // no drops, no pilots
    }
    for (int s = 1; s <= inst.a_max; ++s) {
      resets += ls.n_triple(s, 4, 1);
      ups += ls.n_triple(s, 4, inst.successor(s));
    }
    CHECK(resets == successes);
    CHECK(resets + ups == 50);
    CHECK(ls.chan_attempts[3] == 50);
    CHECK(ls.chan_successes[3] == successes);
    // Realized cost is the sum of per-step costs.
    double total = 0.0;
    for (const EpisodeStep& st : log.steps) total += st.cost;
    CHECK(log.total_cost == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("pilot-driven estimates concentrate inside the Hoeffding band") {
  ProblemInstance inst = reference_instance();
  inst.horizon = 50;
  LearnerState ls = make_learner_state(inst);
  Rng rng(503);
  const EpisodePlan plan = all_drop_plan(inst);
  for (int k = 0; k < 200; ++k) run_episode(inst, ls, plan, 1, rng, true);
  const double delta_prime = 0.01;
  for (int c = 1; c <= inst.num_channels; ++c) {
    const double attempts = static_cast<double>(ls.chan_attempts[c - 1]);
    REQUIRE(attempts > 0);
    const double band = 3.0 * std::sqrt(std::log(2.0 / delta_prime) / (2.0 * attempts));
    CHECK(std::fabs(ls.estimated_success(c) - inst.mu(c)) < band);
  }
}

TEST_CASE("initial state rule") {
  Rng rng(601);
  CHECK(initial_state_rule(InitialStateMode::NR, 1, std::nullopt, rng, 10) == 1);
  CHECK(initial_state_rule(InitialStateMode::NR, 5, 7, rng, 10) == 7);
  CHECK_THROWS_AS(
      initial_state_rule(InitialStateMode::NR, 2, std::nullopt, rng, 10),
      std::logic_error);

  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    ++counts[initial_state_rule(InitialStateMode::UniformRandom, 1,
                                std::nullopt, rng, 10) - 1];
  for (int s = 0; s < 10; ++s)
    CHECK(std::fabs(counts[s] / static_cast<double>(draws) - 0.1) < 0.005);
}

TEST_CASE("late-phase plans stop disagreeing with the optimal policy") {
  // After the exploration cutoff the pooled estimates are tight enough that
  // transmit/drop decisions match the optimal policy almost always.
  const auto inst = reference_instance();
  const FiniteHorizonSolution oracle = solve_finite_horizon(inst);
  LearnerState ls = make_learner_state(inst);
  Rng rng(707);
  long long disagree = 0, steps = 0;
  std::optional<int> prev;
  for (int k = 1; k <= 300; ++k) {
    const EpisodePlan plan = plan_episode_alg1(ls, inst);
    const int s0 =
        initial_state_rule(InitialStateMode::UniformRandom, k, prev, rng,
                           inst.a_max);
    const EpisodeLog log = run_episode(inst, ls, plan, s0, rng, true);
    prev = log.final_state;
    if (k > 250) {
      for (const EpisodeStep& st : log.steps) {
        const int opt = oracle.policy.action(st.h, st.s);
        if ((opt == 0) != (st.a == 0)) ++disagree;
        ++steps;
      }
    }
  }
  CHECK(static_cast<double>(disagree) / static_cast<double>(steps) < 0.01);
}

TEST_CASE("gap diagnostics match the stated formulas") {
  const auto inst = reference_instance();
  const GapDiagnostics g = gap_diagnostics(inst);
  // (1-alpha) P / (alpha a_max) = 9/4 = 2.25; nearest mu is 0.8.
  CHECK(g.delta_min == doctest::Approx(1.45).epsilon(1e-12));
  CHECK(g.channel_gap_min == doctest::Approx(0.2).epsilon(1e-12));

  ProblemInstance single;
  single.num_channels = 1;
  single.success_probs = {0.5};
  single.a_max = 5;
  single.power_cost = 1.0;
  single.alpha = 0.5;
  single.age_fn = {AgeKind::Linear, 0.0};
  single.horizon = 10;
  single.num_episodes = 10;
  single.delta = 0.01;
  CHECK(std::isinf(gap_diagnostics(validated(std::move(single))).channel_gap_min));
}
