#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "twist/minimize.hpp"

using namespace twist;

namespace {

// Heteroclinic values for FK(1, lambda), half window 200.
constexpr double c0_lambda1 = 0.476405031698;
constexpr double c0_lambda2 = 0.487790844961;

// FK with V = lambda (1 - cos 4 pi x): two minima per period.
generating_function double_well(double lam) {
  const double k = 4 * std::numbers::pi;
  generating_function h;
  h.eval = [=](double x, double y) { return 0.5 * ((x - y) * (x - y) + lam * (2 - std::cos(k * x) - std::cos(k * y))); };
  h.d1 = [=](double x, double y) { return (x - y) + 0.5 * lam * k * std::sin(k * x); };
  h.d2 = [=](double x, double y) { return (y - x) + 0.5 * lam * k * std::sin(k * y); };
  h.d12 = [](double, double) { return -1.0; };
  h.lipschitz_bound = 3.0 + lam * k / 2;
  h.twist_lower_bound = 1.0;
  h.symmetric = true;
  return h;
}

const neighboring_pair unit_pair{0.0, 1.0, 0.0};

}  // namespace

TEST(Segment, TrivialMinimizers) {
  const auto z = minimize_segment(fk_generating_function({1.0, 1.0}), 0.0, 0.0, 3, {-1.0, 2.0});
  for (double v : z.segment) EXPECT_NEAR(v, 0.0, 1e-12);
  for (double r : z.residuals) EXPECT_LT(r, 1e-12);
  EXPECT_NEAR(z.action, 0.0, 1e-15);
  const auto lin = minimize_segment(fk_generating_function({1.0, 0.0}), 0.0, 1.0, 3, {-1.0, 2.0});
  for (int i = 1; i <= 3; ++i) EXPECT_NEAR(lin.segment[i], 0.25 * i, 1e-10);
  EXPECT_NEAR(lin.action, 4 * 0.5 * 0.0625, 1e-12);
}

TEST(Segment, NoInteriorSites) {
  const auto h = fk_generating_function({1.0, 1.0});
  const auto r = minimize_segment(h, 0.0, 0.5, 0, {-1.0, 2.0});
  EXPECT_EQ(r.segment.size(), 2u);
  EXPECT_NEAR(r.action, 1.125, 1e-15);
}

TEST(Segment, MatchesExhaustiveGrid) {
  const auto h = fk_generating_function({1.0, 0.5});
  const auto r = minimize_segment(h, 0.1, 0.9, 2, {0.0, 1.0});
  double best = inf, a1 = 0, a2 = 0;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const double x = i / 40.0, y = j / 40.0;
      const double f = h(0.1, x) + h(x, y) + h(y, 0.9);
      if (f < best) best = f, a1 = x, a2 = y;
    }
  EXPECT_LE(r.action, best + 1e-12);
  EXPECT_LE(std::abs(r.segment[1] - a1), 0.025);
  EXPECT_LE(std::abs(r.segment[2] - a2), 0.025);
}

TEST(Segment, Preconditions) {
  const auto h = fk_generating_function({1.0, 1.0});
  EXPECT_THROW(minimize_segment(h, 0.0, 3.0, 2, {0.0, 1.0}), invalid_parameter);
  EXPECT_THROW(minimize_segment(h, 0.0, 1.0, -1, {0.0, 1.0}), invalid_parameter);
  minimize_options bad;
  bad.tol_grad = 0.0;
  EXPECT_THROW(minimize_segment(h, 0.0, 1.0, 2, {0.0, 1.0}, bad), invalid_parameter);
}

TEST(NeighboringPair, FrenkelKontorova) {
  const auto pr = find_neighboring_pair(fk_generating_function({1.0, 1.0}));
  EXPECT_NEAR(pr.u0, 0.0, 1e-10);
  EXPECT_NEAR(pr.u1, 1.0, 1e-10);
  EXPECT_NEAR(pr.c, 0.0, 1e-14);
}

TEST(NeighboringPair, DoubleWell) {
  const auto h = double_well(0.5);
  const auto pr = find_neighboring_pair(h);
  EXPECT_NEAR(pr.u0, 0.0, 1e-8);
  EXPECT_NEAR(pr.u1, 0.5, 1e-8);
  EXPECT_NEAR(h(pr.u0, pr.u0), h(pr.u1, pr.u1), 1e-12);
}

TEST(NeighboringPair, IntegrableIsDegenerate) {
  EXPECT_THROW(find_neighboring_pair(fk_generating_function({1.0, 0.0})), degenerate_foliation);
}

TEST(Heteroclinic, ShapeAndValue) {
  const auto h = fk_generating_function({1.0, 1.0});
  const auto up = heteroclinic_minimizer(h, unit_pair, direction::up, 100);
  int crossings = 0;
  for (std::size_t j = 0; j + 1 < up.x.size(); ++j) {
    EXPECT_LE(up.x[j], up.x[j + 1]);
    crossings += (up.x[j] < 0.5) != (up.x[j + 1] < 0.5);
  }
  EXPECT_EQ(crossings, 1);
  EXPECT_GT(up.value, 0.0);
  EXPECT_LT(up.max_residual, 1e-8);
}

TEST(Heteroclinic, FrozenValuesAndSymmetry) {
  const auto h1 = fk_generating_function({1.0, 1.0});
  const auto up = heteroclinic_minimizer(h1, unit_pair, direction::up, 200);
  const auto down = heteroclinic_minimizer(h1, unit_pair, direction::down, 200);
  EXPECT_NEAR(up.value, c0_lambda1, 1e-11);
  EXPECT_NEAR(up.value, down.value, 1e-8);
  EXPECT_GT(up.value + down.value, 1e-6);
  const auto up400 = heteroclinic_minimizer(h1, unit_pair, direction::up, 400);
  EXPECT_LT(std::abs(up.value - up400.value), 1e-6);
  const auto up2 = heteroclinic_minimizer(fk_generating_function({1.0, 2.0}), unit_pair, direction::up, 200);
  EXPECT_NEAR(up2.value, c0_lambda2, 1e-11);
}

TEST(Heteroclinic, ConfigurationTails) {
  const auto het = heteroclinic_minimizer(fk_generating_function({1.0, 1.0}), unit_pair, direction::down, 20);
  const auto x = het.config();
  EXPECT_EQ(std::get<end_state>(x.left_tail), end_state::u1);
  EXPECT_EQ(std::get<end_state>(x.right_tail), end_state::u0);
  EXPECT_EQ(x.lo, -20);
  EXPECT_THROW(heteroclinic_minimizer(fk_generating_function({1.0, 1.0}), unit_pair, direction::up, 2),
               invalid_parameter);
}

TEST(Phi, Values) {
  const auto h = fk_generating_function({1.0, 1.0});
  EXPECT_EQ(estimate_phi(h, unit_pair, 0.0, 2).upper, 0.0);
  const auto e = estimate_phi(h, unit_pair, 0.25, 6);
  EXPECT_GT(e.upper, 0.0);
  EXPECT_TRUE(e.lower_certified);
  EXPECT_LE(e.lower, e.upper + 1e-12);
  // loops of up to 3 sites on a 21-point grid, one site in the far region
  double brute = inf;
  const int P = 21;
  auto g = [&](int i) { return static_cast<double>(i) / (P - 1); };
  auto far = [&](double x) { return x >= 0.25 - 1e-12 && x <= 0.75 + 1e-12; };
  for (int a = 0; a < P; ++a) {
    if (!far(g(a))) continue;
    brute = std::min(brute, h(g(a), g(a)));
    for (int b = 0; b < P; ++b) {
      brute = std::min(brute, h(g(a), g(b)) + h(g(b), g(a)));
      for (int c = 0; c < P; ++c) brute = std::min(brute, h(g(a), g(b)) + h(g(b), g(c)) + h(g(c), g(a)));
    }
  }
  EXPECT_NEAR(e.upper, brute, 0.1 * brute);
  EXPECT_LE(estimate_phi(h, unit_pair, 0.1, 2).upper, estimate_phi(h, unit_pair, 0.3, 2).upper);
  EXPECT_THROW(estimate_phi(h, unit_pair, 0.6, 2), invalid_parameter);
}

TEST(Phi, LowerBoundHoldsForFarLoops) {
  const auto h = fk_generating_function({1.0, 1.0});
  const double delta = 0.25;
  const auto e = estimate_phi(h, unit_pair, delta, 2);
  for (int i = 0; i <= 50; ++i)
    for (int j = 0; j <= 50; ++j) {
      const double x = delta + 0.5 * i / 50, y = delta + 0.5 * j / 50;
      EXPECT_GE(h(x, y) + h(y, x), 2 * e.lower - 1e-12);
    }
}

TEST(Gap, FiberMinimumAtHeteroclinicSiteIsC0) {
  const auto h = fk_generating_function({1.0, 2.0});
  const auto het = heteroclinic_minimizer(h, unit_pair, direction::up, 64);
  const double x0 = het.x[64];  // site 0
  const double m = pinned_fiber_minimum(h, unit_pair, direction::up, x0, 64);
  EXPECT_NEAR(m, het.value, 1e-8);
  EXPECT_NEAR(pinned_fiber_minimum(h, unit_pair, direction::up, 1e-7, 64), het.value, 1e-6);
}

TEST(Gap, StrongPotentialHasGapsBothWays) {
  const auto h = fk_generating_function({1.0, 2.0});
  const auto g = detect_gap(h, unit_pair, 32, 48);
  ASSERT_TRUE(g.has_gap());
  EXPECT_GT(g.e0, 0.0);
  EXPECT_GT(g.e1, 0.0);
  EXPECT_NEAR(g.c0, g.c1, 1e-8);
  // strict interior bump
  double top = 0.0;
  for (const auto& f : g.up) top = std::max(top, f.m - g.c0);
  EXPECT_GT(top, g.up.front().m - g.c0);
  EXPECT_GT(top, g.up.back().m - g.c0);
  for (std::size_t j = 0; j < g.up.size(); ++j) EXPECT_NEAR(g.up[j].m, g.down[g.up.size() - 1 - j].m, 1e-8);
  EXPECT_THROW(detect_gap(h, unit_pair, 4, 48), invalid_parameter);
}

TEST(HeteroclinicWindow, LooseToleranceAndNesting) {
  const auto h = fk_generating_function({1.0, 1.0});
  const auto het = heteroclinic_minimizer(h, unit_pair, direction::up, 200);
  const auto w = approximate_heteroclinic_window(h, unit_pair, 2 * het.value);
  EXPECT_LE(w.n0, 8);
  EXPECT_LT(w.tail_bound, 2 * het.value);
  long prev = w.n0;
  for (double eps : {het.value, het.value / 2, het.value / 4, 1e-3}) {
    const auto v = approximate_heteroclinic_window(h, unit_pair, eps);
    EXPECT_GE(v.n0, prev);
    prev = v.n0;
    const auto& x = v.het.x;
    const long s = v.start - v.het.lo;
    for (long n = v.n0; s + n < static_cast<long>(x.size()); n += 3) {
      double sum = 0.0;
      for (long i = s; i < s + n; ++i) sum += h(x[i], x[i + 1]);
      EXPECT_LT(std::abs(sum - v.het.value), eps) << "eps " << eps << " n " << n;
    }
  }
  EXPECT_THROW(approximate_heteroclinic_window(h, unit_pair, 0.0), invalid_parameter);
}

TEST(Periodic, RotationZeroAndHalf) {
  const auto h = fk_generating_function({1.0, 0.3});
  const auto o = periodic_minimizer(h, 1, 0);
  EXPECT_NEAR(o.action, 0.0, 1e-12);
  const auto o2 = periodic_minimizer(h, 2, 1);
  EXPECT_EQ(o2.config.values.size(), 2u);
  double brute = inf;
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j <= 400; ++j) {
      const double a = i / 200.0, b = a - 0.5 + 2.0 * j / 400;
      brute = std::min(brute, h(a, b) + h(b, a + 1));
    }
  EXPECT_LE(o2.action, brute + 1e-12);
  EXPECT_GT(o2.action, brute - 1e-3);
  EXPECT_NEAR(o2.config.at(2, unit_pair), o2.config.values[0] + 1, 1e-15);
}
