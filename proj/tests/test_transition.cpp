#include <cmath>

#include <gtest/gtest.h>

#include "twist/transition.hpp"

using namespace twist;

namespace {

const neighboring_pair unit_pair{0.0, 1.0, 0.0};

const generating_function& strong() {
  static const auto h = fk_generating_function({1.0, 2.0});
  return h;
}

const gap_report& strong_gap() {
  static const auto g = detect_gap(strong(), unit_pair, 64, 64);
  return g;
}

schedule_plan plan_for(std::size_t transitions, bool increasing = false) {
  schedule_blueprint bp;
  bp.n_blocks = transitions;
  bp.increasing_spacings = increasing;
  return build_schedule(strong(), unit_pair, strong_gap(), bp);
}

// Smallest sup distance between x on [lo, hi] and integer translates of het.
double distance_to_translates(const configuration& x, long lo, long hi, const heteroclinic& het) {
  const auto h = het.config();
  const long mid = (lo + hi) / 2;
  double best = inf;
  for (long t = mid - 100; t <= mid + 100; ++t) {
    double d = 0.0;
    for (long i = lo; i <= hi; ++i) d = std::max(d, std::abs(x.at(i, unit_pair) - h.at(i - t, unit_pair)));
    best = std::min(best, d);
  }
  return best;
}

}  // namespace

TEST(CountTransitions, Basic) {
  configuration flat{0, {0.0, 0.0}, end_state::u0, end_state::u0};
  EXPECT_EQ(count_transitions(flat, unit_pair, 0.1), 0u);
  const auto up = heteroclinic_minimizer(strong(), unit_pair, direction::up, 32);
  EXPECT_EQ(count_transitions(up.config(), unit_pair, 0.1), 1u);
  const auto down = heteroclinic_minimizer(strong(), unit_pair, direction::down, 32);
  configuration glued = up.config();
  glued.values.insert(glued.values.end(), down.x.begin(), down.x.end());
  glued.right_tail = end_state::u0;
  EXPECT_EQ(count_transitions(glued, unit_pair, 0.1), 2u);
  EXPECT_THROW(count_transitions(flat, unit_pair, 0.6), invalid_parameter);
}

TEST(BuildSchedule, FourTransitionsSatisfyInequalities) {
  const auto p = plan_for(4);
  EXPECT_NO_THROW(validate_schedule(p.sched, unit_pair));
  EXPECT_EQ(violated_inequality(p), "");
  EXPECT_EQ(p.sched.transition_count(), 4u);
  EXPECT_EQ(p.sched.size(), 10u);
  for (std::size_t b = 0; b < p.sched.blocks(); ++b) {
    EXPECT_GE(p.sched.k[b + 1] - p.sched.k[b], p.min_spacing[b]);
    if (p.sched.is_transition(b)) EXPECT_GT(p.margins[b], strong_gap().margin);
  }
  EXPECT_GT(p.phi_lower, 0.0);
  EXPECT_NEAR(p.c_star, strong_gap().c0 + strong_gap().c1, 1e-15);
}

TEST(BuildSchedule, SingleTransitionAndIncreasingSpacings) {
  const auto p = plan_for(1);
  EXPECT_EQ(p.sched.transition_count(), 1u);
  EXPECT_EQ(p.sched.labels.front(), end_state::u0);
  EXPECT_EQ(p.sched.labels.back(), end_state::u1);
  const auto q = plan_for(3, true);
  for (std::size_t b = 0; b + 2 < q.sched.size(); ++b)
    EXPECT_LT(q.sched.k[b + 1] - q.sched.k[b], q.sched.k[b + 2] - q.sched.k[b + 1]);
}

TEST(BuildSchedule, Infeasible) {
  schedule_blueprint bp;
  bp.epsilon = 1e-4;  // window boundaries cannot reach the gap intervals
  EXPECT_THROW(build_schedule(strong(), unit_pair, strong_gap(), bp), construction_error);
  gap_report none = strong_gap();
  none.gap_intervals_I0.clear();
  EXPECT_THROW(build_schedule(strong(), unit_pair, none, schedule_blueprint{}), precondition_error);
  bp = {};
  bp.max_sites = 1000;
  EXPECT_THROW(build_schedule(strong(), unit_pair, strong_gap(), bp), construction_error);
}

TEST(MinimizeTransition, TwoTransitions) {
  const auto p = plan_for(2);
  const auto r = minimize_transition(strong(), unit_pair, p.sched);
  EXPECT_TRUE(r.interior);
  EXPECT_EQ(r.transitions, 2u);
  EXPECT_LT(r.max_residual, 1e-8);
  double res = 0.0;
  for (long i = r.config.lo; i <= r.config.hi(); ++i) {
    const double a = r.config.at(i - 1, unit_pair), b = r.config[i], c = r.config.at(i + 1, unit_pair);
    res = std::max(res, std::abs(strong().d2(a, b) + strong().d1(b, c)));
  }
  EXPECT_LT(res, 1e-8);
  EXPECT_TRUE(non_monotone_blocks(r, unit_pair).empty());
  EXPECT_LE(r.action_value, box_lipschitz(strong(), unit_pair) * p.sched.rho_sum());
}

TEST(MinimizeTransition, SingleTransitionIsAHeteroclinic) {
  const auto p = plan_for(1);
  const auto r = minimize_transition(strong(), unit_pair, p.sched);
  ASSERT_TRUE(r.interior);
  const auto het = heteroclinic_minimizer(strong(), unit_pair, direction::up, 400);
  const long mid = (p.sched.k[1] + p.sched.k[2]) / 2;
  EXPECT_LT(distance_to_translates(r.config, mid - 60, mid + 60, het), 1e-6);
}

TEST(MinimizeTransition, RadiusInsideI0TouchesTheWindow) {
  // 1 - rho lies outside the gap interval, so a heteroclinic can rest on the window edge
  ASSERT_LT(strong_gap().gap_intervals_I0.back().hi, 0.99);
  const schedule s{{0, 40, 45, 85}, {0.01, 0.01, 0.01, 0.01},
                   {end_state::u0, end_state::u0, end_state::u1, end_state::u1}};
  const auto r = minimize_transition(strong(), unit_pair, s);
  EXPECT_FALSE(r.interior);
  EXPECT_FALSE(r.offending.empty());
}

TEST(MinimizeTransition, Deterministic) {
  const schedule s{{0, 30, 35, 65}, {0.02, 0.02, 0.02, 0.02},
                   {end_state::u0, end_state::u0, end_state::u1, end_state::u1}};
  const auto a = minimize_transition(strong(), unit_pair, s);
  const auto b = minimize_transition(strong(), unit_pair, s);
  EXPECT_EQ(a.config.values, b.config.values);
  EXPECT_EQ(a.action_value, b.action_value);
}

TEST(LiftRational, IdentityAndPeriodicLift) {
  const auto h = fk_generating_function({1.0, 0.3});
  configuration y{0, {0.1, 0.2}, end_state::u0, end_state::u0};
  const auto same = lift_rational(h, 1, 0, y, unit_pair, {-1.0, 2.0});
  EXPECT_EQ(same.values, y.values);

  const auto dom = default_reduction_domain(1);
  for (int q : {2, 3}) {
    const auto H = rational_reduction(h, q, 1, dom);
    const auto fp = reduced_fixed_point(H);
    EXPECT_LT(fp.residual, 1e-8);
    configuration c{0, {fp.y, fp.y, fp.y}, end_state::u0, end_state::u0};
    const auto x = lift_rational(h, q, 1, c, {fp.y, fp.y + 1.0, fp.value}, dom);
    double res = 0.0;
    for (double v : stationarity_residuals(h, x.values)) res = std::max(res, v);
    EXPECT_LT(res, 1e-8);
    const long w = static_cast<long>(x.values.size()) - 1;
    EXPECT_NEAR(estimate_rotation_number(x, w).alpha_plus, 1.0 / q, 1.0 / w);
    EXPECT_EQ(std::get<periodic_lift>(x.right_tail), (periodic_lift{q, 1}));
    const auto orb = periodic_minimizer(h, q, 1);
    EXPECT_NEAR(fp.value, orb.action, 1e-8);
  }
}

TEST(LiftRational, RejectsNonStationary) {
  const auto h = fk_generating_function({1.0, 0.3});
  configuration y{0, {0.1, 0.35, 0.2}, end_state::u0, end_state::u0};
  EXPECT_THROW(lift_rational(h, 2, 1, y, unit_pair, default_reduction_domain(1)), lift_inconsistency);
}

TEST(Distinctness, SmallBaseSchedule) {
  const schedule base{{0, 20, 41, 63, 86, 110, 135},
                      std::vector<double>(7, 0.02),
                      {end_state::u0, end_state::u0, end_state::u1, end_state::u1, end_state::u0, end_state::u0,
                       end_state::u1}};
  renormalized_action J(strong(), unit_pair);
  const std::vector<std::vector<long>> seqs{{0, 1, 2, 3}, {0, 2, 3, 4}, {0, 1, 2, 3}};
  const auto rep = multi_schedule_distinctness(J, base, seqs);
  EXPECT_TRUE(rep.all_distinct);
  EXPECT_TRUE(rep.repeats_identical);
  EXPECT_GT(rep.sup_difference[0][1], rep.clearance);
  EXPECT_EQ(rep.sup_difference[0][2], 0.0);
  EXPECT_THROW(indexed_schedule(base, {1, 2}), invalid_parameter);
  EXPECT_THROW(indexed_schedule(base, {0, 2, 2}), invalid_parameter);
}
