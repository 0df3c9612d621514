#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "twist/core.hpp"

namespace twist {

/// One-step action h(xi, eta) with its partial derivatives.
/// eval, d1 and d2 are required. The second derivatives are optional and
/// fall back to centered differences of d1 and d2.
template <class Real>
struct basic_generating_function {
  using fn = std::function<Real(Real, Real)>;

  fn eval;
  fn d1;
  fn d2;
  fn d12;
  fn d11;
  fn d22;
  double lipschitz_bound = 0.0;
  double twist_lower_bound = 0.0;
  bool symmetric = false;
  std::string name;

  Real operator()(const Real& x, const Real& y) const { return eval(x, y); }

  Real mixed(const Real& x, const Real& y) const {
    if (d12) return d12(x, y);
    const Real s = fd_step(y);
    return (d1(x, y + s) - d1(x, y - s)) / (2 * s);
  }
  Real second_first(const Real& x, const Real& y) const {
    if (d11) return d11(x, y);
    const Real s = fd_step(x);
    return (d1(x + s, y) - d1(x - s, y)) / (2 * s);
  }
  Real second_second(const Real& x, const Real& y) const {
    if (d22) return d22(x, y);
    const Real s = fd_step(y);
    return (d2(x, y + s) - d2(x, y - s)) / (2 * s);
  }

  static Real fd_step(const Real& x) {
    using std::abs;
    using std::max;
    return Real(1e-6) * max(Real(1), Real(abs(x)));
  }
};

using generating_function = basic_generating_function<double>;

struct fk_params {
  double coupling = 1.0;
  double amplitude = 1.0;
};

/// Frenkel-Kontorova action 1/2 (C (x-y)^2 + V(x) + V(y)) with V(x) = lambda (1 - cos 2 pi x).
template <class Real = double>
basic_generating_function<Real> fk_generating_function(const fk_params& p) {
  if (!(p.coupling > 0.0)) throw invalid_parameter("fk: coupling must be positive");
  if (!(p.amplitude >= 0.0)) throw invalid_parameter("fk: amplitude must be nonnegative");
  const Real C = p.coupling;
  const Real lam = p.amplitude;
  const Real two_pi = 2 * detail::pi<Real>();
  auto V = [=](const Real& x) {
    using std::cos;
    return lam * (1 - cos(two_pi * x));
  };
  auto dV = [=](const Real& x) {
    using std::sin;
    return lam * two_pi * sin(two_pi * x);
  };
  auto ddV = [=](const Real& x) {
    using std::cos;
    return lam * two_pi * two_pi * cos(two_pi * x);
  };
  basic_generating_function<Real> h;
  h.eval = [=](const Real& x, const Real& y) { return (C * (x - y) * (x - y) + V(x) + V(y)) / 2; };
  h.d1 = [=](const Real& x, const Real& y) { return C * (x - y) + dV(x) / 2; };
  h.d2 = [=](const Real& x, const Real& y) { return C * (y - x) + dV(y) / 2; };
  h.d12 = [=](const Real&, const Real&) { return -C; };
  h.d11 = [=](const Real& x, const Real&) { return C + ddV(x) / 2; };
  h.d22 = [=](const Real&, const Real& y) { return C + ddV(y) / 2; };
  // |d1| <= C |x - y| + max|V'|/2 with |x - y| <= 3 on [u0-1, u1+1]^2 = [-1, 2]^2.
  h.lipschitz_bound = 3.0 * p.coupling + std::numbers::pi * p.amplitude;
  h.twist_lower_bound = p.coupling;
  h.symmetric = true;
  h.name = "frenkel-kontorova";
  return h;
}

/// Periodic cubic spline through equally spaced samples on [0, 1).
class periodic_spline {
 public:
  explicit periodic_spline(std::vector<double> samples) : y_(std::move(samples)) {
    const std::size_t n = y_.size();
    if (n < 4) throw invalid_parameter("periodic spline needs at least 4 samples");
    for (double v : y_)
      if (!std::isfinite(v)) throw invalid_parameter("periodic spline: non-finite sample");
    step_ = 1.0 / static_cast<double>(n);
    // Cyclic system M[j-1] + 4 M[j] + M[j+1] = 6 (y[j+1] - 2 y[j] + y[j-1]) / step^2,
    // solved with the Sherman-Morrison correction of the Thomas algorithm.
    std::vector<double> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double ym = y_[(j + n - 1) % n], yp = y_[(j + 1) % n];
      rhs[j] = 6.0 * (yp - 2.0 * y_[j] + ym) / (step_ * step_);
    }
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    auto solve = [&](std::vector<double> b) {
      std::vector<double> c(n), d(diag);
      c[0] = 1.0 / d[0];
      b[0] /= d[0];
      for (std::size_t j = 1; j < n; ++j) {
        const double m = d[j] - c[j - 1];
        c[j] = 1.0 / m;
        b[j] = (b[j] - b[j - 1]) / m;
      }
      for (std::size_t j = n - 1; j-- > 0;) b[j] -= c[j] * b[j + 1];
      return b;
    };
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = 1.0;
    const auto z = solve(rhs);
    const auto w = solve(u);
    const double fac = (z[0] + z[n - 1] / gamma) / (1.0 + w[0] + w[n - 1] / gamma);
    m_.resize(n);
    for (std::size_t j = 0; j < n; ++j) m_[j] = z[j] - fac * w[j];
  }

  double value(double x) const {
    auto [j, u] = locate(x);
    const double a = 1.0 - u;
    return a * y_[j] + u * y_[next(j)] +
           step_ * step_ / 6.0 * ((a * a * a - a) * m_[j] + (u * u * u - u) * m_[next(j)]);
  }
  double derivative(double x) const {
    auto [j, u] = locate(x);
    const double a = 1.0 - u;
    return (y_[next(j)] - y_[j]) / step_ +
           step_ / 6.0 * (-(3.0 * a * a - 1.0) * m_[j] + (3.0 * u * u - 1.0) * m_[next(j)]);
  }
  double second_derivative(double x) const {
    auto [j, u] = locate(x);
    return (1.0 - u) * m_[j] + u * m_[next(j)];
  }
  const std::vector<double>& samples() const { return y_; }

 private:
  std::pair<std::size_t, double> locate(double x) const {
    double f = x - std::floor(x);
    double t = f * static_cast<double>(y_.size());
    auto j = static_cast<std::size_t>(t);
    if (j >= y_.size()) j = y_.size() - 1;
    return {j, t - static_cast<double>(j)};
  }
  std::size_t next(std::size_t j) const { return j + 1 == y_.size() ? 0 : j + 1; }

  std::vector<double> y_;
  std::vector<double> m_;
  double step_ = 0.0;
};

/// Frenkel-Kontorova action with a tabulated periodic potential.
inline generating_function fk_tabulated_generating_function(double coupling, std::vector<double> samples) {
  if (!(coupling > 0.0)) throw invalid_parameter("fk-tabulated: coupling must be positive");
  auto V = std::make_shared<const periodic_spline>(std::move(samples));
  const double C = coupling;
  generating_function h;
  h.eval = [=](double x, double y) { return 0.5 * (C * (x - y) * (x - y) + V->value(x) + V->value(y)); };
  h.d1 = [=](double x, double y) { return C * (x - y) + 0.5 * V->derivative(x); };
  h.d2 = [=](double x, double y) { return C * (y - x) + 0.5 * V->derivative(y); };
  h.d12 = [=](double, double) { return -C; };
  h.d11 = [=](double x, double) { return C + 0.5 * V->second_derivative(x); };
  h.d22 = [=](double, double y) { return C + 0.5 * V->second_derivative(y); };
  double max_dv = 0.0;
  const int n = 4096;
  for (int j = 0; j < n; ++j) max_dv = std::max(max_dv, std::abs(V->derivative((j + 0.5) / n)));
  h.lipschitz_bound = 3.0 * C + 0.5 * max_dv;
  h.twist_lower_bound = C;
  h.symmetric = true;
  h.name = "fk-tabulated";
  return h;
}

// ---------------------------------------------------------------------------
// Hypothesis checks

struct hypothesis_check {
  std::string name;
  bool passed = true;
  double worst = 0.0;             // most adverse sampled quantity (violation when passed is false)
  std::vector<double> witness;    // sample point realizing `worst`
  std::string detail;
};

struct hypothesis_report {
  std::vector<hypothesis_check> checks;
  bool degenerate_diagonal = false;  // h(x,x) constant on the sampled strip
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const hypothesis_check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Samples the hypotheses on a grid_n x grid_n grid of xs x ys. A pass means
/// no violation was found on the grid.
inline hypothesis_report check_hypotheses(const generating_function& h, interval xs, interval ys, int grid_n) {
  if (grid_n < 3) throw invalid_parameter("check_hypotheses: grid_n must be at least 3");
  if (!(xs.hi > xs.lo) || !(ys.hi > ys.lo)) throw invalid_parameter("check_hypotheses: empty strip");
  const int n = grid_n;
  std::vector<double> gx(n), gy(n);
  for (int i = 0; i < n; ++i) {
    gx[i] = xs.lo + xs.width() * i / (n - 1);
    gy[i] = ys.lo + ys.width() * i / (n - 1);
  }
  std::vector<double> H(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H[i * n + j] = h(gx[i], gy[j]);
  auto at = [&](int i, int j) { return H[static_cast<std::size_t>(i) * n + j]; };

  hypothesis_report rep;

  hypothesis_check h1{"h1", true, 0.0, {}, "max |h(x+1,y+1) - h(x,y)|"};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(h(gx[i] + 1.0, gy[j] + 1.0) - at(i, j));
      if (d > h1.worst) {
        h1.worst = d;
        h1.witness = {gx[i], gy[j]};
      }
    }
  h1.passed = h1.worst <= 1e-12;
  rep.checks.push_back(h1);

  // Quadruple h(x,y) + h(X,Y) - h(x,Y) - h(X,y) for x < X, y < Y must be negative,
  // by at least twist_lower_bound (X - x)(Y - y).
  hypothesis_check h3{"h3", true, -inf, {}, "max of cross difference + delta*area (must stay <= 1e-10)"};
  const double delta = h.twist_lower_bound;
  for (int i = 0; i < n; ++i)
    for (int I = i + 1; I < n; ++I)
      for (int j = 0; j < n; ++j)
        for (int J = j + 1; J < n; ++J) {
          const double cross = at(i, j) + at(I, J) - at(i, J) - at(I, j);
          const double v = cross + delta * (gx[I] - gx[i]) * (gy[J] - gy[j]);
          if (v > h3.worst) {
            h3.worst = v;
            h3.witness = {gx[i], gx[I], gy[j], gy[J]};
          }
          if (!(cross < 0.0)) h3.passed = false;
        }
  if (h3.worst > 1e-10) h3.passed = false;
  rep.checks.push_back(h3);

  hypothesis_check h5{"h5", true, -inf, {}, "max of d12 + delta (must stay <= 1e-12)"};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = h.mixed(gx[i], gy[j]) + delta;
      if (v > h5.worst) {
        h5.worst = v;
        h5.witness = {gx[i], gy[j]};
      }
    }
  h5.passed = delta > 0.0 && h5.worst <= 1e-12;
  rep.checks.push_back(h5);

  hypothesis_check h2{"h2", true, inf, {}, "min increment of eta -> h(x, x + eta) along eta = 1, 2, 4, ..., 64"};
  for (int i = 0; i < n; ++i) {
    double prev = h(gx[i], gx[i] + 1.0);
    for (double eta = 2.0; eta <= 64.0; eta *= 2.0) {
      const double cur = h(gx[i], gx[i] + eta);
      if (cur - prev < h2.worst) {
        h2.worst = cur - prev;
        h2.witness = {gx[i], eta};
      }
      prev = cur;
    }
  }
  h2.passed = h2.worst > 0.0;
  rep.checks.push_back(h2);

  // theta x^2 / 2 - h(x, y) convex in x (and the same in y) via second differences.
  double theta = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      theta = std::max({theta, std::abs(h.second_first(gx[i], gy[j])), std::abs(h.second_second(gx[i], gy[j]))});
  theta += 1.0;
  hypothesis_check h6{"h6", true, inf, {}, "min second difference of theta x^2/2 - h"};
  h6.detail += " (theta = " + std::to_string(theta) + ")";
  const double sx = xs.width() / (n - 1), sy = ys.width() / (n - 1);
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d2h = at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j);
      const double v = theta * sx * sx - d2h;
      if (v < h6.worst) {
        h6.worst = v;
        h6.witness = {gx[i], gy[j], 0.0};
      }
    }
  for (int i = 0; i < n; ++i)
    for (int j = 1; j + 1 < n; ++j) {
      const double d2h = at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1);
      const double v = theta * sy * sy - d2h;
      if (v < h6.worst) {
        h6.worst = v;
        h6.witness = {gx[i], gy[j], 1.0};
      }
    }
  h6.passed = h6.worst >= -1e-10;
  rep.checks.push_back(h6);

  double dmin = inf, dmax = -inf;
  for (int i = 0; i < n; ++i) {
    const double v = h(gx[i], gx[i]);
    dmin = std::min(dmin, v);
    dmax = std::max(dmax, v);
  }
  rep.degenerate_diagonal = dmax - dmin <= 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Twist map

struct orbit_point {
  double x = 0.0;
  double y = 0.0;
};

namespace detail {

/// Root of a strictly decreasing function on [lo, hi] by Newton steps
/// safeguarded with bisection. Returns the root and the final |g|.
template <class G, class DG>
std::pair<double, double> decreasing_root(G g, DG dg, double lo, double hi, double tol, const char* what) {
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return {lo, 0.0};
  if (ghi == 0.0) return {hi, 0.0};
  if (!(glo > 0.0 && ghi < 0.0))
    throw bracket_error(std::string(what) + ": bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] does not contain a sign change");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double gx = g(x);
    if (std::abs(gx) <= tol) return {x, std::abs(gx)};
    if (gx > 0.0)
      lo = x;
    else
      hi = x;
    const double d = dg(x);
    double nx = (d < 0.0) ? x - gx / d : 0.5 * (lo + hi);
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (nx == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      const double gn = g(nx);
      return {nx, std::abs(gn)};
    }
    x = nx;
  }
  return {x, std::abs(g(x))};
}

}  // namespace detail

/// One step of the lifted twist map: solve d1(x, X) = -y for X, then Y = d2(x, X).
inline orbit_point twist_map_step(const generating_function& h, orbit_point p, interval bracket) {
  auto g = [&](double X) { return h.d1(p.x, X) + p.y; };
  auto dg = [&](double X) { return h.mixed(p.x, X); };
  const double X = detail::decreasing_root(g, dg, bracket.lo, bracket.hi, 1e-12, "twist_map_step").first;
  return {X, h.d2(p.x, X)};
}

/// Bracket centered on the rigid-rotation guess x + y / twist_lower_bound.
inline interval default_step_bracket(const generating_function& h, orbit_point p) {
  const double delta = h.twist_lower_bound > 0.0 ? h.twist_lower_bound : 1.0;
  const double guess = p.x + p.y / delta;
  const double r = 4.0 + 2.0 * h.lipschitz_bound / delta;
  return {guess - r, guess + r};
}

inline orbit_point twist_map_step(const generating_function& h, orbit_point p) {
  interval b = default_step_bracket(h, p);
  for (int grow = 0;; ++grow) {
    try {
      return twist_map_step(h, p, b);
    } catch (const bracket_error&) {
      if (grow >= 8) throw;
      const double w = b.width();
      b = {b.lo - w, b.hi + w};
    }
  }
}

/// Inverse step: given (X, Y) solve d2(x, X) = Y for x, then y = -d1(x, X).
inline orbit_point inverse_twist_map_step(const generating_function& h, orbit_point q, interval bracket) {
  auto g = [&](double x) { return h.d2(x, q.x) - q.y; };
  auto dg = [&](double x) { return h.mixed(x, q.x); };
  const double x = detail::decreasing_root(g, dg, bracket.lo, bracket.hi, 1e-12, "inverse_twist_map_step").first;
  return {x, -h.d1(x, q.x)};
}

inline orbit_point inverse_twist_map_step(const generating_function& h, orbit_point q) {
  const double delta = h.twist_lower_bound > 0.0 ? h.twist_lower_bound : 1.0;
  const double guess = q.x - q.y / delta;
  double r = 4.0 + 2.0 * h.lipschitz_bound / delta;
  for (int grow = 0;; ++grow) {
    try {
      return inverse_twist_map_step(h, q, {guess - r, guess + r});
    } catch (const bracket_error&) {
      if (grow >= 8) throw;
      r *= 3.0;
    }
  }
}

struct orbit {
  std::vector<orbit_point> points;
  double max_residual = 0.0;  // stationarity of (x_i) at interior points
};

/// n points starting at p (the start included). The x-sequence of an orbit
/// is a critical point of the action, which is checked sitewise.
inline orbit iterate_map(const generating_function& h, orbit_point p, long n) {
  if (n < 1 || n > 1000000) throw invalid_parameter("iterate_map: step count must lie in [1, 1e6]");
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw invalid_parameter("iterate_map: non-finite start");
  orbit o;
  o.points.reserve(static_cast<std::size_t>(n));
  o.points.push_back(p);
  for (long i = 1; i < n; ++i) {
    try {
      o.points.push_back(twist_map_step(h, o.points.back()));
    } catch (const bracket_error& e) {
      throw bracket_error("iterate_map: step " + std::to_string(i) + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i + 1 < o.points.size(); ++i) {
    const auto& a = o.points[i - 1];
    const auto& b = o.points[i];
    const auto& c = o.points[i + 1];
    o.max_residual = std::max(o.max_residual, std::abs(h.d2(a.x, b.x) + h.d1(b.x, c.x)));
  }
  return o;
}

// ---------------------------------------------------------------------------
// Conjunction

struct two_point_value {
  double value = 0.0;
  double d1 = std::numeric_limits<double>::quiet_NaN();  // derivative in the first argument
  double d2 = std::numeric_limits<double>::quiet_NaN();  // derivative in the second argument
  std::vector<double> inner;                             // minimizing interior points, left to right
};

/// A two-point function that also reports its minimizing interior points.
using two_point_fn = std::function<two_point_value(double, double)>;

inline two_point_fn as_two_point(const generating_function& h) {
  return [h](double x, double y) { return two_point_value{h(x, y), h.d1(x, y), h.d2(x, y), {}}; };
}

struct conjunction_options {
  int grid_points = 512;
  double xi_tol = 1e-10;
};

namespace detail {

inline double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// (h1 * h2)(x1, x2) = min over xi in domain of h1(x1, xi) + h2(xi, x2).
inline two_point_fn conjunction(two_point_fn h1, two_point_fn h2, interval domain, conjunction_options opt = {}) {
  if (!(domain.hi >= domain.lo) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi))
    throw invalid_parameter("conjunction: empty domain");
  if (opt.grid_points < 2) throw invalid_parameter("conjunction: grid_points must be at least 2");
  return [h1 = std::move(h1), h2 = std::move(h2), domain, opt](double x1, double x2) {
    struct sample {
      double xi;
      two_point_value a, b;
      double total() const { return a.value + b.value; }
      double slope() const { return a.d2 + b.d1; }
    };
    auto eval = [&](double xi) { return sample{xi, h1(x1, xi), h2(xi, x2)}; };
    const int G = opt.grid_points;
    const double step = domain.width() / (G - 1);
    int best = 0;
    double best_v = inf;
    for (int j = 0; j < G; ++j) {
      const double v = h1(x1, domain.lo + j * step).value + h2(domain.lo + j * step, x2).value;
      if (v < best_v) {
        best_v = v;
        best = j;
      }
    }
    const double a = domain.lo + std::max(0, best - 1) * step;
    const double b = domain.lo + std::min(G - 1, best + 1) * step;
    sample cand = eval(domain.lo + best * step);
    sample sa = eval(a), sb = eval(b);
    sample refined = cand;
    if (std::isfinite(sa.slope()) && std::isfinite(sb.slope())) {
      if (sa.slope() < 0.0 && sb.slope() > 0.0) {
        // root of the slope by regula falsi with Illinois damping
        double fa = sa.slope(), fb = sb.slope();
        double lo = a, hi = b;
        int side = 0;
        for (int it = 0; it < 200 && hi - lo > opt.xi_tol * 1e-3; ++it) {
          double m = (lo * fb - hi * fa) / (fb - fa);
          if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
          const sample sm = eval(m);
          const double fm = sm.slope();
          refined = sm;
          if (fm == 0.0) break;
          if (fm < 0.0) {
            lo = m;
            fa = fm;
            if (side == -1) fb *= 0.5;
            side = -1;
          } else {
            hi = m;
            fb = fm;
            if (side == 1) fa *= 0.5;
            side = 1;
          }
        }
      }
    } else if (b > a) {
      const double xi = detail::golden_min([&](double s) { return eval(s).total(); }, a, b, opt.xi_tol);
      refined = eval(xi);
    }
    for (const sample* s : {&sa, &sb, &cand})
      if (s->total() < refined.total()) refined = *s;
    two_point_value out;
    out.value = refined.total();
    out.d1 = refined.a.d1;  // envelope theorem
    out.d2 = refined.b.d2;
    out.inner = refined.a.inner;
    out.inner.push_back(refined.xi);
    out.inner.insert(out.inner.end(), refined.b.inner.begin(), refined.b.inner.end());
    return out;
  };
}

/// H(xi, xi') = h^{*q}(xi, xi' + p) together with the q-1 interior points.
inline two_point_fn rational_reduction(const generating_function& h, int q, long p, interval domain,
                                       conjunction_options opt = {}) {
  if (q < 1) throw invalid_parameter("rational_reduction: q must be positive");
  two_point_fn base = as_two_point(h);
  two_point_fn chain = base;
  for (int j = 1; j < q; ++j) chain = conjunction(base, chain, domain, opt);
  const double shift = static_cast<double>(p);
  return [chain, shift](double x, double y) { return chain(x, y + shift); };
}

/// Default inner domain for rational_reduction between points of [0, 1].
inline interval default_reduction_domain(long p) {
  return {std::min(0.0, static_cast<double>(p)) - 1.0, std::max(1.0, static_cast<double>(p)) + 1.0};
}

}  // namespace twist
