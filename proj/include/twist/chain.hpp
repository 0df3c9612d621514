#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "twist/core.hpp"
#include "twist/genfn.hpp"

namespace twist {

enum class solver_method { coordinate_newton, projected_gradient };

template <class Real>
struct basic_minimize_options {
  Real tol_grad = Real(1e-10);
  long max_sweeps = 100000;
  solver_method method = solver_method::coordinate_newton;
  int grid_seed_points = 33;
  unsigned threads = 1;
};

using minimize_options = basic_minimize_options<double>;

inline void validate(const minimize_options& o) {
  if (!(o.tol_grad > 0.0)) throw invalid_parameter("minimize options: tol_grad must be positive");
  if (o.max_sweeps < 1) throw invalid_parameter("minimize options: max_sweeps must be at least 1");
  if (o.grid_seed_points < 2) throw invalid_parameter("minimize options: grid_seed_points must be at least 2");
}

/// Chain x_0..x_{n-1} of free sites with box bounds. Open chains may be
/// attached to fixed anchor values on either side; a cyclic chain closes
/// with the pair (x_{n-1}, x_0).
template <class Real>
struct chain_spec {
  std::vector<Real> lower;
  std::vector<Real> upper;
  std::optional<Real> left;
  std::optional<Real> right;
  bool cyclic = false;
};

template <class Real>
struct chain_solution {
  std::vector<Real> x;
  Real value = 0;
  Real residual = 0;
  long sweeps = 0;
};

namespace detail {

template <class Real>
class chain_problem {
 public:
  chain_problem(const basic_generating_function<Real>& h, const chain_spec<Real>& s) : h_(h), s_(s) {}

  std::size_t size() const { return s_.lower.size(); }

  /// Objective and the sum of absolute terms (used as a rounding-noise scale).
  std::pair<Real, Real> value(const std::vector<Real>& x) const {
    using std::abs;
    Real f = 0, mag = 0;
    auto add = [&](const Real& a, const Real& b) {
      const Real t = h_(a, b);
      f += t;
      mag += abs(t);
    };
    const std::size_t n = size();
    if (s_.cyclic) {
      for (std::size_t i = 0; i < n; ++i) add(x[i], x[(i + 1) % n]);
      return {f, mag};
    }
    if (n == 0) {
      if (s_.left && s_.right) add(*s_.left, *s_.right);
      return {f, mag};
    }
    if (s_.left) add(*s_.left, x[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) add(x[i], x[i + 1]);
    if (s_.right) add(x[n - 1], *s_.right);
    return {f, mag};
  }

  void gradient(const std::vector<Real>& x, std::vector<Real>& g) const {
    const std::size_t n = size();
    g.assign(n, Real(0));
    if (s_.cyclic) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        g[i] += h_.d1(x[i], x[j]);
        g[j] += h_.d2(x[i], x[j]);
      }
      return;
    }
    if (s_.left) g[0] += h_.d2(*s_.left, x[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      g[i] += h_.d1(x[i], x[i + 1]);
      g[i + 1] += h_.d2(x[i], x[i + 1]);
    }
    if (s_.right) g[n - 1] += h_.d1(x[n - 1], *s_.right);
  }

  /// Tridiagonal Hessian of an open chain: diag[i], off[i] = H(i, i+1).
  void tridiagonal_hessian(const std::vector<Real>& x, std::vector<Real>& diag, std::vector<Real>& off) const {
    const std::size_t n = size();
    diag.assign(n, Real(0));
    off.assign(n > 0 ? n - 1 : 0, Real(0));
    if (s_.left) diag[0] += h_.second_second(*s_.left, x[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      diag[i] += h_.second_first(x[i], x[i + 1]);
      diag[i + 1] += h_.second_second(x[i], x[i + 1]);
      off[i] = h_.mixed(x[i], x[i + 1]);
    }
    if (s_.right) diag[n - 1] += h_.second_first(x[n - 1], *s_.right);
  }

  /// Dense Hessian (row-major) of a cyclic chain.
  void dense_hessian(const std::vector<Real>& x, std::vector<Real>& H) const {
    const std::size_t n = size();
    H.assign(n * n, Real(0));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      H[i * n + i] += h_.second_first(x[i], x[j]);
      H[j * n + j] += h_.second_second(x[i], x[j]);
      const Real m = h_.mixed(x[i], x[j]);
      H[i * n + j] += m;
      H[j * n + i] += m;
    }
  }

  const chain_spec<Real>& spec() const { return s_; }

 private:
  const basic_generating_function<Real>& h_;
  const chain_spec<Real>& s_;
};

/// Site is held at its bound when the gradient pushes it outward by more than
/// `slack` (outward gradients below the tolerance are rounding noise).
template <class Real>
bool held(const Real& x, const Real& g, const Real& lo, const Real& hi, const Real& slack = Real(0)) {
  if (!(lo < hi)) return true;
  return (x <= lo && g > slack) || (x >= hi && g < -slack);
}

template <class Real>
Real projected_residual(const std::vector<Real>& x, const std::vector<Real>& g, const chain_spec<Real>& s) {
  using std::abs;
  Real r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (held(x[i], g[i], s.lower[i], s.upper[i])) continue;
    if (abs(g[i]) > r) r = abs(g[i]);
  }
  return r;
}

/// Solve (T + mu I) d = rhs on the free sites of a tridiagonal T. Returns false
/// if the shifted matrix is not numerically positive definite.
template <class Real>
bool tridiagonal_solve(const std::vector<Real>& diag, const std::vector<Real>& off, const std::vector<char>& free,
                       const Real& mu, const std::vector<Real>& rhs, std::vector<Real>& d) {
  const std::size_t n = diag.size();
  std::vector<Real> D(n), L(n, Real(0));
  d.assign(n, Real(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (!free[i]) {
      D[i] = 1;
      continue;
    }
    Real di = diag[i] + mu;
    if (i > 0 && free[i - 1]) {
      L[i] = off[i - 1] / D[i - 1];
      di -= L[i] * off[i - 1];
    }
    if (!(di > Real(0))) return false;
    D[i] = di;
  }
  // forward, diagonal, backward substitution
  std::vector<Real> z(n, Real(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (!free[i]) continue;
    z[i] = rhs[i];
    if (i > 0 && free[i - 1]) z[i] -= L[i] * z[i - 1];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (free[i]) z[i] /= D[i];
  for (std::size_t i = n; i-- > 0;) {
    if (!free[i]) continue;
    d[i] = z[i];
    if (i + 1 < n && free[i + 1]) d[i] -= L[i + 1] * d[i + 1];
  }
  return true;
}

/// Dense Cholesky solve of (H + mu I) restricted to the free sites.
template <class Real>
bool dense_solve(const std::vector<Real>& H, std::size_t n, const std::vector<char>& free, const Real& mu,
                 const std::vector<Real>& rhs, std::vector<Real>& d) {
  using std::sqrt;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (free[i]) idx.push_back(i);
  const std::size_t m = idx.size();
  std::vector<Real> A(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) A[a * m + b] = H[idx[a] * n + idx[b]] + (a == b ? mu : Real(0));
  for (std::size_t j = 0; j < m; ++j) {
    Real s = A[j * m + j];
    for (std::size_t k = 0; k < j; ++k) s -= A[j * m + k] * A[j * m + k];
    if (!(s > Real(0))) return false;
    A[j * m + j] = sqrt(s);
    for (std::size_t i = j + 1; i < m; ++i) {
      Real t = A[i * m + j];
      for (std::size_t k = 0; k < j; ++k) t -= A[i * m + k] * A[j * m + k];
      A[i * m + j] = t / A[j * m + j];
    }
  }
  std::vector<Real> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    Real t = rhs[idx[i]];
    for (std::size_t k = 0; k < i; ++k) t -= A[i * m + k] * z[k];
    z[i] = t / A[i * m + i];
  }
  for (std::size_t i = m; i-- > 0;) {
    Real t = z[i];
    for (std::size_t k = i + 1; k < m; ++k) t -= A[k * m + i] * z[k];
    z[i] = t / A[i * m + i];
  }
  d.assign(n, Real(0));
  for (std::size_t i = 0; i < m; ++i) d[idx[i]] = z[i];
  return true;
}

template <class Real>
std::vector<double> to_doubles(const std::vector<Real>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

}  // namespace detail

/// Box-constrained minimization of a chain action by projected Newton steps on
/// the tridiagonal (or, for cyclic chains, dense) Hessian with a Levenberg
/// shift and projected Armijo search. Falls back to projected gradient steps
/// when the Newton direction fails the line search.
template <class Real>
chain_solution<Real> solve_chain(const basic_generating_function<Real>& h, const chain_spec<Real>& spec,
                                 std::vector<Real> x, const basic_minimize_options<Real>& opts) {
  using std::abs;
  using std::max;
  const std::size_t n = spec.lower.size();
  if (spec.upper.size() != n || x.size() != n) throw invalid_parameter("solve_chain: size mismatch");
  if (spec.cyclic && (spec.left || spec.right)) throw invalid_parameter("solve_chain: cyclic chain with anchors");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(spec.lower[i] <= spec.upper[i])) throw invalid_parameter("solve_chain: empty box at a site");
    x[i] = std::clamp(x[i], spec.lower[i], spec.upper[i]);
  }
  chain_solution<Real> sol;
  detail::chain_problem<Real> prob(h, spec);
  if (n == 0) {
    sol.x = x;
    sol.value = prob.value(x).first;
    return sol;
  }
  const Real eps = std::numeric_limits<Real>::epsilon();
  std::vector<Real> g, gt, diag, off, H, rhs(n), d, xt(n);
  std::vector<char> free(n);
  auto [f, mag] = prob.value(x);
  prob.gradient(x, g);
  Real res = detail::projected_residual(x, g, spec);
  const bool newton = opts.method == solver_method::coordinate_newton;
  Real pg_step = 1;
  // Outward gradients below this are rounding noise (e.g. sin(2 pi) != 0) and
  // must not freeze a site at its bound.
  const Real slack = Real(1e4) * eps * Real(1.0 + h.lipschitz_bound);

  for (long it = 0;; ++it) {
    sol.sweeps = it;
    if (res <= opts.tol_grad) break;
    if (it >= opts.max_sweeps)
      throw non_convergence("solve_chain: max_sweeps reached with residual " + std::to_string(detail::to_double(res)),
                            detail::to_doubles(x), detail::to_double(res));
    for (std::size_t i = 0; i < n; ++i) {
      free[i] = !detail::held(x[i], g[i], spec.lower[i], spec.upper[i], slack);
      rhs[i] = free[i] ? Real(-g[i]) : Real(0);
    }
    const Real noise = 64 * eps * (mag + abs(f) + 1);
    auto try_direction = [&](const std::vector<Real>& dir, Real t) -> bool {
      for (int ls = 0; ls < 60; ++ls, t /= 2) {
        Real slope = 0;
        for (std::size_t i = 0; i < n; ++i) {
          xt[i] = free[i] ? std::clamp(Real(x[i] + t * dir[i]), spec.lower[i], spec.upper[i]) : x[i];
          slope += g[i] * (xt[i] - x[i]);
        }
        if (xt == x) return false;
        auto [ft, magt] = prob.value(xt);
        bool accept = ft <= f + Real(1e-4) * slope;
        if (!accept && ft <= f + noise) {
          prob.gradient(xt, gt);
          accept = detail::projected_residual(xt, gt, spec) < res;
        }
        if (accept) {
          x.swap(xt);
          f = ft;
          mag = magt;
          prob.gradient(x, g);
          res = detail::projected_residual(x, g, spec);
          return true;
        }
      }
      return false;
    };

    bool moved = false;
    if (newton) {
      Real mu = 0;
      Real scale = 1;
      if (spec.cyclic) {
        prob.dense_hessian(x, H);
        for (std::size_t i = 0; i < n; ++i) scale = max(scale, Real(abs(H[i * n + i])));
      } else {
        prob.tridiagonal_hessian(x, diag, off);
        for (const auto& v : diag) scale = max(scale, Real(abs(v)));
      }
      bool ok = false;
      for (int attempt = 0; attempt < 80 && !ok; ++attempt) {
        ok = spec.cyclic ? detail::dense_solve(H, n, free, mu, rhs, d) : detail::tridiagonal_solve(diag, off, free, mu, rhs, d);
        if (!ok) mu = (mu == Real(0)) ? Real(1e-8) * scale : Real(mu * 4);
      }
      if (ok) moved = try_direction(d, Real(1));
    }
    if (!moved) {
      for (std::size_t i = 0; i < n; ++i) d[i] = rhs[i];
      d.resize(n);
      moved = try_direction(d, pg_step);
      if (moved && !newton) pg_step = std::min(Real(pg_step * 2), Real(1e6));
      if (!moved && !newton) pg_step = pg_step / 8;
    }
    if (!moved && newton) {
      throw non_convergence("solve_chain: line search stalled with residual " + std::to_string(detail::to_double(res)),
                            detail::to_doubles(x), detail::to_double(res));
    }
    if (!moved && pg_step < Real(1e-30))
      throw non_convergence("solve_chain: gradient steps stalled with residual " + std::to_string(detail::to_double(res)),
                            detail::to_doubles(x), detail::to_double(res));
  }
  sol.x = std::move(x);
  sol.value = f;
  sol.residual = res;
  return sol;
}

/// Stationarity residual |d2(x_{i-1}, x_i) + d1(x_i, x_{i+1})| at every site of a
/// full sequence (endpoints excluded; they are reported as 0).
template <class Real>
std::vector<Real> stationarity_residuals(const basic_generating_function<Real>& h, const std::vector<Real>& x) {
  using std::abs;
  std::vector<Real> r(x.size(), Real(0));
  for (std::size_t i = 1; i + 1 < x.size(); ++i) r[i] = abs(h.d2(x[i - 1], x[i]) + h.d1(x[i], x[i + 1]));
  return r;
}

}  // namespace twist
