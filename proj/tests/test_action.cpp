#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "twist/action.hpp"
#include "twist/minimize.hpp"

using namespace twist;

namespace {

const neighboring_pair unit_pair{0.0, 1.0, 0.0};

schedule two_transitions() {
  return schedule{{0, 6, 12, 18}, {0.05, 0.05, 0.05, 0.05}, {end_state::u0, end_state::u1, end_state::u1, end_state::u0}};
}

}  // namespace

TEST(Configuration, TailExtension) {
  configuration x{3, {0.1, 0.2, 0.3}, end_state::u0, end_state::u1};
  EXPECT_EQ(x.hi(), 5);
  EXPECT_EQ(x.at(-10, unit_pair), 0.0);
  EXPECT_EQ(x.at(4, unit_pair), 0.2);
  EXPECT_EQ(x.at(100, unit_pair), 1.0);
  configuration p{0, {0.1, 0.6}, periodic_lift{2, 1}, periodic_lift{2, 1}};
  EXPECT_DOUBLE_EQ(p.at(2, unit_pair), 1.1);
  EXPECT_DOUBLE_EQ(p.at(5, unit_pair), 2.6);
  EXPECT_DOUBLE_EQ(p.at(-1, unit_pair), -0.4);
  EXPECT_DOUBLE_EQ(p.at(-4, unit_pair), -1.9);
}

TEST(Configuration, Validation) {
  EXPECT_THROW(validate(configuration{}), invalid_parameter);
  EXPECT_THROW(validate(configuration{0, {NAN}}), invalid_parameter);
  EXPECT_THROW(validate(configuration{0, {0.0}, periodic_lift{0, 1}}), invalid_parameter);
  EXPECT_THROW(validate_in_strip(configuration{0, {2.5}}, unit_pair), domain_error);
  EXPECT_NO_THROW(validate_in_strip(configuration{0, {-0.5, 1.9}}, unit_pair));
}

TEST(Configuration, RotationNumber) {
  configuration c{0, {0.0, 0.5, 1.0}, end_state::u0, end_state::u1};
  const auto r = rotation_number(c, 2);
  EXPECT_EQ(r.alpha_plus, 0.0);
  EXPECT_EQ(r.alpha_minus, 0.0);
  configuration p{0, {0.1, 0.6, 1.1, 1.6}, periodic_lift{2, 1}, periodic_lift{2, 1}};
  EXPECT_DOUBLE_EQ(rotation_number(p, 2).alpha_plus, 0.5);
  EXPECT_DOUBLE_EQ(estimate_rotation_number(p, 2).alpha_plus, 0.5);
}

TEST(Schedule, Validation) {
  EXPECT_NO_THROW(validate_schedule(two_transitions(), unit_pair));
  auto s = two_transitions();
  s.k[0] = 1;
  EXPECT_THROW(validate_schedule(s, unit_pair), invalid_parameter);
  s = two_transitions();
  s.k[2] = s.k[1];
  EXPECT_THROW(validate_schedule(s, unit_pair), invalid_parameter);
  s = two_transitions();
  s.rho[1] = 0.5;
  EXPECT_THROW(validate_schedule(s, unit_pair), invalid_parameter);
  s = schedule{{0, 5, 10}, {0.1, 0.1, 0.1}, {end_state::u0, end_state::u1, end_state::u0}};
  EXPECT_THROW(validate_schedule(s, unit_pair), invalid_parameter);
  s.labels.pop_back();
  EXPECT_THROW(validate_schedule(s, unit_pair), invalid_parameter);
}

TEST(Schedule, AlternatingLabels) {
  const auto l = alternating_labels(2);
  const std::vector<end_state> want{end_state::u0, end_state::u0, end_state::u1,
                                    end_state::u1, end_state::u0, end_state::u0};
  EXPECT_EQ(l, want);
  schedule s{{0, 1, 2, 3, 4, 5}, std::vector<double>(6, 0.1), l};
  EXPECT_EQ(s.transition_count(), 2u);
  EXPECT_EQ(s.block_direction(1), direction::up);
  EXPECT_EQ(s.block_direction(3), direction::down);
  EXPECT_NEAR(s.rho_sum(), 0.6, 1e-15);
}

TEST(Action, SegmentAndTerms) {
  const auto h1 = fk_generating_function({1.0, 1.0});
  EXPECT_EQ(segment_action(h1, {0.0, 0.0, 0.0}), 0.0);
  EXPECT_NEAR(segment_action(h1, {0.0, 0.5}), 1.125, 1e-15);
  const auto h = fk_generating_function({1.0, 0.5});
  auto direct = [](double x, double y) {
    auto V = [](double t) { return 0.5 * (1 - std::cos(2 * std::numbers::pi * t)); };
    return 0.5 * ((x - y) * (x - y) + V(x) + V(y));
  };
  EXPECT_NEAR(segment_action(h, {0.0, 0.25, 0.5}), direct(0.0, 0.25) + direct(0.25, 0.5), 1e-15);
  EXPECT_THROW(segment_action(h, {0.0}), invalid_parameter);
  EXPECT_EQ(normalized_term_a(h1, unit_pair, 0.0, 0.0), 0.0);
  EXPECT_NEAR(normalized_term_a(h1, unit_pair, 0.0, 0.5), 1.125, 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int t = 0; t < 1000; ++t) EXPECT_GE(normalized_term_a(h, unit_pair, u(rng), u(rng)), 0.0);
}

TEST(Action, NormalizedActionI) {
  const auto h = fk_generating_function({1.0, 1.0});
  EXPECT_EQ(compute_I(h, unit_pair, configuration{-3, {0, 0, 0, 0}}), 0.0);
  configuration bump{0, {1.0}, end_state::u0, end_state::u0};
  EXPECT_NEAR(compute_I(h, unit_pair, bump), 2 * (h(0.0, 1.0) - unit_pair.c), 1e-15);
  EXPECT_GT(compute_I(h, unit_pair, bump), 0.0);
  configuration lift{0, {0.1, 0.6}, periodic_lift{2, 1}, periodic_lift{2, 1}};
  EXPECT_EQ(compute_I(h, unit_pair, lift), inf);
  configuration flat{0, {0.1}, periodic_lift{1, 0}, periodic_lift{1, 0}};
  EXPECT_THROW(compute_I(h, unit_pair, flat), domain_error);
}

TEST(Action, HeteroclinicITruncation) {
  const auto h = fk_generating_function({1.0, 1.0});
  const auto a = heteroclinic_minimizer(h, unit_pair, direction::up, 200);
  const auto b = heteroclinic_minimizer(h, unit_pair, direction::up, 400);
  const double I200 = compute_I(h, unit_pair, a.config()), I400 = compute_I(h, unit_pair, b.config());
  EXPECT_NEAR(I200, a.value, 1e-12);
  EXPECT_LE(I400, I200 + 1e-14);
  EXPECT_LT(std::abs(I200 - I400), 1e-6);
}

TEST(BlockConstant, SingleStepMatchesGrid) {
  const auto h = fk_generating_function({1.0, 1.0});
  const double ri = 0.2, rn = 0.3;
  const auto v = block_constant(h, unit_pair, 1, ri, rn, direction::up);
  double best = inf;
  const int G = 100;
  for (int i = 0; i <= G; ++i)
    for (int j = 0; j <= G; ++j) best = std::min(best, h(ri * i / G, 1.0 - rn + rn * j / G));
  EXPECT_LE(v.value, best + 1e-12);
  EXPECT_GT(v.value, best - 1e-3);
  EXPECT_EQ(v.segment.size(), 2u);
}

TEST(BlockConstant, QuadraticClosedForm) {
  const auto h = fk_generating_function({1.0, 0.0});
  for (long n : {1L, 2L, 5L, 12L}) {
    const double ri = 0.1, rn = 0.15, d = 1.0 - ri - rn;
    EXPECT_NEAR(block_constant(h, unit_pair, n, ri, rn, direction::up).value, d * d / (2.0 * n), 1e-8) << n;
    EXPECT_NEAR(block_constant(h, unit_pair, n, ri, rn, direction::down).value, d * d / (2.0 * n), 1e-8) << n;
  }
}

TEST(BlockConstant, MonotoneInRadii) {
  const auto h = fk_generating_function({1.0, 1.0});
  double prev = inf;
  for (double r : {0.05, 0.15, 0.3, 0.45, 0.5 - 1e-9}) {
    const double v = block_constant(h, unit_pair, 8, r, r, direction::up).value;
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
  EXPECT_THROW(block_constant(h, unit_pair, 0, 0.1, 0.1, direction::up), invalid_parameter);
  EXPECT_THROW(block_constant(h, unit_pair, 3, 0.6, 0.1, direction::up), invalid_parameter);
}

TEST(RenormalizedAction, ZeroOnConstantAndBoundsOnTestSequence) {
  const auto h = fk_generating_function({1.0, 2.0});
  renormalized_action J(h, unit_pair);
  schedule flat{{0, 5, 10}, {0.1, 0.1, 0.1}, {end_state::u0, end_state::u0, end_state::u0}};
  configuration zero{-4, std::vector<double>(20, 0.0), end_state::u0, end_state::u0};
  EXPECT_EQ(compute_J(J, flat, zero).total, 0.0);

  const auto s = two_transitions();
  const double C = box_lipschitz(h, unit_pair);
  const auto y = J.test_sequence(s, -6, 24);
  const auto rep = compute_J(J, s, y);
  EXPECT_LE(rep.total, C * s.rho_sum());
  EXPECT_GE(rep.total, -2 * C * s.rho_sum());
  ASSERT_EQ(rep.per_block.size(), s.blocks() + 2);
  EXPECT_EQ(rep.per_block.front().index, -1);
  EXPECT_EQ(rep.per_block[1].kind, block_kind::transition_plus);
  EXPECT_EQ(rep.per_block[3].kind, block_kind::transition_minus);
  EXPECT_EQ(rep.per_site_residual.size(), y.values.size());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    auto z = y;
    for (long i = z.lo; i <= z.hi(); ++i) {
      bool constrained = false;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (s.k[j] == i) {
          constrained = true;
          z[i] = std::clamp(unit_pair.state(s.labels[j]) + (2 * u(rng) - 1) * s.rho[j], 0.0, 1.0);
        }
      if (!constrained) z[i] = std::clamp(z[i] + 0.2 * (u(rng) - 0.5), 0.0, 1.0);
    }
    EXPECT_GE(compute_J(J, s, z).total, -2 * C * s.rho_sum());
  }
}

TEST(RenormalizedAction, RejectsWindowViolation) {
  const auto h = fk_generating_function({1.0, 2.0});
  renormalized_action J(h, unit_pair);
  const auto s = two_transitions();
  auto y = J.test_sequence(s, -6, 24);
  y[6] = 0.5;
  EXPECT_THROW(compute_J(J, s, y), constraint_violation);
  configuration short_window{2, {0.0}, end_state::u0, end_state::u0};
  EXPECT_THROW(compute_J(J, s, short_window), invalid_parameter);
}
