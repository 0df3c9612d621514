#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "twist/action.hpp"
#include "twist/chain.hpp"
#include "twist/core.hpp"
#include "twist/genfn.hpp"

namespace twist {

namespace detail {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  const unsigned t = std::min<unsigned>(threads, static_cast<unsigned>(n));
  for (unsigned w = 0; w < t; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Lowest value wins; values within 1e-12 are ordered lexicographically.
template <class Real>
bool better_candidate(const Real& v, const std::vector<Real>& x, const Real& best_v, const std::vector<Real>& best_x) {
  using std::abs;
  if (best_x.empty()) return true;
  if (v < best_v - Real(1e-12)) return true;
  if (abs(v - best_v) <= Real(1e-12)) return x < best_x;
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Segments

struct segment_result {
  std::vector<double> segment;    // endpoints included
  std::vector<double> residuals;  // one per interior site
  double action = 0.0;
};

namespace detail {

/// Grid seeds for a small open chain: coordinatewise local minima of the
/// action on a G^n lattice, best first.
inline std::vector<std::vector<double>> grid_seeds(const generating_function& h, const chain_spec<double>& spec, int G,
                                                   std::size_t keep) {
  const std::size_t n = spec.lower.size();
  std::vector<std::vector<double>> axis(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < G; ++j)
      axis[i].push_back(spec.lower[i] + (spec.upper[i] - spec.lower[i]) * j / (G - 1));
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(G);
  std::vector<double> val(total);
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  detail::chain_problem<double> prob(h, spec);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t r = t;
    for (std::size_t i = n; i-- > 0;) {
      idx[i] = static_cast<int>(r % G);
      r /= G;
      x[i] = axis[i][idx[i]];
    }
    val[t] = prob.value(x).first;
  }
  std::vector<std::size_t> minima;
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n - 1; i-- > 0;) stride[i] = stride[i + 1] * G;
  for (std::size_t t = 0; t < total; ++t) {
    bool local = true;
    for (std::size_t i = 0; i < n && local; ++i) {
      const int c = static_cast<int>((t / stride[i]) % G);
      if (c > 0 && val[t - stride[i]] < val[t]) local = false;
      if (c + 1 < G && val[t + stride[i]] < val[t]) local = false;
    }
    if (local) minima.push_back(t);
  }
  std::stable_sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
  if (minima.size() > keep) minima.resize(keep);
  std::vector<std::vector<double>> out;
  for (std::size_t t : minima) {
    std::vector<double> s(n);
    std::size_t r = t;
    for (std::size_t i = n; i-- > 0;) {
      s[i] = axis[i][r % G];
      r /= G;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Fixed-endpoint minimal segment with n_interior box-constrained sites.
inline segment_result minimize_segment(const generating_function& h, double left, double right, int n_interior,
                                       interval box, const minimize_options& opts = {}) {
  validate(opts);
  if (n_interior < 0) throw invalid_parameter("minimize_segment: n_interior must be nonnegative");
  if (!box.contains(left) || !box.contains(right))
    throw invalid_parameter("minimize_segment: endpoints must lie in the box");
  const auto n = static_cast<std::size_t>(n_interior);
  chain_spec<double> spec;
  spec.lower.assign(n, box.lo);
  spec.upper.assign(n, box.hi);
  spec.left = left;
  spec.right = right;
  std::vector<std::vector<double>> seeds;
  std::vector<double> lin(n);
  for (std::size_t i = 0; i < n; ++i) lin[i] = left + (right - left) * static_cast<double>(i + 1) / (n + 1);
  seeds.push_back(lin);
  if (n >= 1 && n <= 4) {
    auto g = detail::grid_seeds(h, spec, opts.grid_seed_points, 16);
    seeds.insert(seeds.end(), g.begin(), g.end());
  }
  std::vector<double> best;
  double best_v = inf;
  std::optional<non_convergence> failure;
  for (auto& s : seeds) {
    try {
      auto sol = solve_chain(h, spec, s, opts);
      if (detail::better_candidate(sol.value, sol.x, best_v, best)) {
        best_v = sol.value;
        best = sol.x;
      }
    } catch (const non_convergence& e) {
      if (!failure) failure = e;
    }
  }
  if (best.empty() && n > 0) throw *failure;
  segment_result r;
  r.segment.push_back(left);
  r.segment.insert(r.segment.end(), best.begin(), best.end());
  r.segment.push_back(right);
  r.residuals.resize(n);
  const auto res = stationarity_residuals(h, r.segment);
  for (std::size_t i = 0; i < n; ++i) r.residuals[i] = res[i + 1];
  r.action = segment_action(h, r.segment);
  return r;
}

// ---------------------------------------------------------------------------
// Neighboring pair

struct pair_options {
  int grid = 4096;
  double flat_width = 0.01;  // a near-minimal cluster wider than this is a flat valley
};

inline neighboring_pair find_neighboring_pair(const generating_function& h, const pair_options& po = {}) {
  if (po.grid < 16) throw invalid_parameter("find_neighboring_pair: grid too small");
  const int G = po.grid;
  auto D = [&](double x) { return h(x, x); };
  auto dD = [&](double x) { return h.d1(x, x) + h.d2(x, x); };
  std::vector<double> v(G);
  for (int j = 0; j < G; ++j) v[j] = D(static_cast<double>(j) / G);
  const double vmin = *std::min_element(v.begin(), v.end());
  const double tol = 1e-8;
  // Clusters of near-minimal grid points, taken cyclically.
  std::vector<char> low(G);
  for (int j = 0; j < G; ++j) low[j] = v[j] <= vmin + tol;
  if (std::all_of(low.begin(), low.end(), [](char c) { return c; }))
    throw degenerate_foliation("find_neighboring_pair: h(x,x) is constant (continuum of periodic minimizers)");
  int start = 0;
  while (low[start]) ++start;  // a non-low point to begin the cyclic scan
  std::vector<double> mins;
  for (int t = 1; t <= G; ++t) {
    const int j = (start + t) % G;
    if (!low[j]) continue;
    int len = 0, best = j;
    while (low[(j + len) % G]) {
      if (v[(j + len) % G] < v[best]) best = (j + len) % G;
      ++len;
    }
    if (static_cast<double>(len) / G > po.flat_width)
      throw degenerate_foliation("find_neighboring_pair: flat valley of width " + std::to_string(double(len) / G));
    // refine on the slope of D in the cell around the best grid point
    const double c0 = static_cast<double>(best) / G;
    double a = c0 - 1.0 / G, b = c0 + 1.0 / G;
    double x = c0;
    if (dD(a) < 0.0 && dD(b) > 0.0) {
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double s = dD(m);
        x = m;
        if (s == 0.0) break;
        (s < 0.0 ? a : b) = m;
      }
    } else {
      x = detail::golden_min(D, a, b, 1e-14);
    }
    mins.push_back(x);
    t += len - 1;
  }
  std::sort(mins.begin(), mins.end());
  std::vector<double> uniq;
  for (double m : mins)
    if (uniq.empty() || m - uniq.back() > 1e-9) uniq.push_back(m);
  if (uniq.size() > 1 && uniq.front() + 1.0 - uniq.back() <= 1e-9) uniq.pop_back();
  for (double& m : uniq)
    if (m < -0.5 / G) m += 1.0;
  std::sort(uniq.begin(), uniq.end());
  // keep only global minimizers
  double c = inf;
  for (double m : uniq) c = std::min(c, D(m));
  std::vector<double> glob;
  for (double m : uniq)
    if (D(m) <= c + tol) glob.push_back(m);
  neighboring_pair pr;
  pr.u0 = glob.front();
  pr.u1 = glob.size() > 1 ? glob[1] : glob.front() + 1.0;
  pr.c = D(pr.u0);
  pr.period_check_resolution = G;
  validate_pair(h, pr);
  return pr;
}

// ---------------------------------------------------------------------------
// Lipschitz constant on the box [u0, u1]^2

inline double box_lipschitz(const generating_function& h, const neighboring_pair& pr, int samples = 257) {
  double L = 0.0;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      const double x = pr.u0 + (pr.u1 - pr.u0) * i / (samples - 1);
      const double y = pr.u0 + (pr.u1 - pr.u0) * j / (samples - 1);
      L = std::max({L, std::abs(h.d1(x, y)), std::abs(h.d2(x, y))});
    }
  return L;
}

// ---------------------------------------------------------------------------
// Heteroclinic minimizers

template <class Real>
struct basic_heteroclinic {
  direction dir = direction::up;
  long lo = 0;               // window is lo .. lo + x.size() - 1
  std::vector<Real> x;
  Real value = 0;            // truncated normalized action
  Real max_residual = 0;     // stationarity residual over the window
  bool strictly_monotone = false;
  bool strictly_interior = false;
  long boundary_sites = 0;   // sites equal to u0 or u1 (saturated in the working precision)

  configuration config() const {
    configuration c;
    c.lo = lo;
    c.values = detail::to_doubles(x);
    c.left_tail = start_state(dir);
    c.right_tail = final_state(dir);
    return c;
  }
};

using heteroclinic = basic_heteroclinic<double>;

/// Minimizes the truncated I over sites -N..N with u0/u1 anchors outside.
template <class Real>
basic_heteroclinic<Real> heteroclinic_minimizer(const basic_generating_function<Real>& h, const neighboring_pair& pr,
                                                direction dir, long half_window,
                                                const basic_minimize_options<Real>& opts = {}) {
  using std::tanh;
  if (half_window < 4) throw invalid_parameter("heteroclinic_minimizer: half_window must be at least 4");
  const long N = half_window;
  const std::size_t n = static_cast<std::size_t>(2 * N + 1);
  const Real u0 = Real(pr.u0), u1 = Real(pr.u1), c = h(u0, u0);
  const Real a = dir == direction::up ? u0 : u1, b = dir == direction::up ? u1 : u0;
  chain_spec<Real> spec;
  spec.lower.assign(n, u0);
  spec.upper.assign(n, u1);
  spec.left = a;
  spec.right = b;
  std::vector<std::vector<Real>> seeds(3, std::vector<Real>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const long i = static_cast<long>(j) - N;
    seeds[0][j] = i < 0 ? a : b;
    seeds[1][j] = i < 0 ? a : (i == 0 ? Real((a + b) / 2) : b);
    seeds[2][j] = a + (b - a) * (1 + tanh(Real(i) / 2)) / 2;
  }
  // Seeds are screened at a moderate tolerance, then the winner is polished.
  auto screen = opts;
  if (screen.tol_grad < Real(1e-10)) screen.tol_grad = Real(1e-10);
  std::vector<Real> best;
  Real best_v = 0;
  for (auto& s : seeds) {
    auto sol = solve_chain(h, spec, s, screen);
    if (detail::better_candidate(sol.value, sol.x, best_v, best)) {
      best_v = sol.value;
      best = std::move(sol.x);
    }
  }
  if (screen.tol_grad != opts.tol_grad) {
    auto sol = solve_chain(h, spec, best, opts);
    best_v = sol.value;
    best = std::move(sol.x);
  }
  basic_heteroclinic<Real> r;
  r.dir = dir;
  r.lo = -N;
  r.x = std::move(best);
  r.value = best_v - Real(static_cast<double>(n + 1)) * c;
  std::vector<Real> full;
  full.reserve(n + 2);
  full.push_back(a);
  full.insert(full.end(), r.x.begin(), r.x.end());
  full.push_back(b);
  const auto res = stationarity_residuals(h, full);
  r.max_residual = *std::max_element(res.begin(), res.end());
  r.strictly_monotone = true;
  r.strictly_interior = true;
  for (std::size_t j = 0; j + 1 < full.size(); ++j) {
    const bool ok = dir == direction::up ? full[j + 1] > full[j] : full[j + 1] < full[j];
    if (!ok) r.strictly_monotone = false;
  }
  for (const auto& v : r.x) {
    if (!(v > u0 && v < u1)) {
      r.strictly_interior = false;
      ++r.boundary_sites;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Loop bound phi

struct phi_estimate {
  double upper = 0.0;       // min over loops of length <= n_max with a delta-far site
  double lower = 0.0;       // see `lower_certified`
  int n_upper = 0;          // loop length attaining `upper`
  bool lower_certified = false;
  std::string caveat;
};

/// For symmetric h, (h3) gives h(x,y) - c >= (D(x) + D(y)) / 2 with
/// D(x) = h(x,x) - c, so every admissible loop has action at least min D over
/// the far region; the constant loop attains it. For other h the lower value
/// is the smallest per-site average over loops whose sites are all far.
inline phi_estimate estimate_phi(const generating_function& h, const neighboring_pair& pr, double delta, int n_max,
                                 const minimize_options& opts = {}) {
  const double half = 0.5 * (pr.u1 - pr.u0);
  if (!(delta >= 0.0) || delta > half) throw invalid_parameter("estimate_phi: delta must lie in [0, (u1-u0)/2]");
  if (n_max < 1) throw invalid_parameter("estimate_phi: n_max must be at least 1");
  phi_estimate r;
  r.caveat = "upper bound over loop lengths <= " + std::to_string(n_max);
  if (delta == 0.0) {
    r.lower_certified = true;
    r.n_upper = 1;
    return r;
  }
  const interval far{pr.u0 + delta, pr.u1 - delta};
  const interval box{pr.u0, pr.u1};
  const int P = 21;
  r.upper = inf;
  double best_v = far.lo;
  for (int n = 1; n <= n_max; ++n) {
    for (int j = 0; j < P; ++j) {
      const double v = far.lo + far.width() * j / (P - 1);
      const double s = minimize_segment(h, v, v, n - 1, box, opts).action - n * pr.c;
      if (s < r.upper) {
        r.upper = s;
        r.n_upper = n;
        best_v = v;
      }
    }
  }
  {
    const double step = far.width() / (P - 1);
    const int n = r.n_upper;
    auto f = [&](double v) { return minimize_segment(h, v, v, n - 1, box, opts).action - n * pr.c; };
    const double v = detail::golden_min(f, std::max(far.lo, best_v - step), std::min(far.hi, best_v + step), 1e-9);
    r.upper = std::min(r.upper, f(v));
  }
  auto D = [&](double x) { return h(x, x) - pr.c; };
  if (h.symmetric) {
    double m = inf, arg = far.lo;
    const int G = 1024;
    for (int j = 0; j < G; ++j) {
      const double x = far.lo + far.width() * j / (G - 1);
      if (D(x) < m) {
        m = D(x);
        arg = x;
      }
    }
    const double step = far.width() / (G - 1);
    const double x = detail::golden_min(D, std::max(far.lo, arg - step), std::min(far.hi, arg + step), 1e-13);
    r.lower = std::min(m, D(x));
    r.lower_certified = true;
  } else {
    r.lower = inf;
    chain_spec<double> spec;
    for (int n = 1; n <= std::min(n_max, 4); ++n) {
      spec.lower.assign(n, far.lo);
      spec.upper.assign(n, far.hi);
      spec.cyclic = true;
      for (auto& s : detail::grid_seeds(h, spec, 9, 4)) {
        auto sol = solve_chain(h, spec, s, opts);
        r.lower = std::min(r.lower, (sol.value - n * pr.c) / n);
      }
    }
    r.caveat += "; lower value is the least per-site loop average (not certified)";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gap detection

/// min of the truncated I over configurations in the direction's heteroclinic
/// class with site 0 pinned to x0; returned normalized by c.
inline double pinned_fiber_minimum(const generating_function& h, const neighboring_pair& pr, direction dir, double x0,
                                   long half_window, const minimize_options& opts = {}) {
  const double a = pr.state(start_state(dir)), b = pr.state(final_state(dir));
  const auto N = static_cast<std::size_t>(half_window);
  auto half = [&](bool left_side) {
    chain_spec<double> spec;
    spec.lower.assign(N, pr.u0);
    spec.upper.assign(N, pr.u1);
    spec.left = left_side ? a : x0;
    spec.right = left_side ? x0 : b;
    const double far = left_side ? a : b;
    std::vector<std::vector<double>> seeds;
    seeds.emplace_back(N, far);
    seeds.emplace_back(N, x0);
    std::vector<double> lin(N);
    for (std::size_t j = 0; j < N; ++j) {
      const double t = static_cast<double>(j + 1) / (N + 1);
      lin[j] = left_side ? a + (x0 - a) * t : x0 + (b - x0) * t;
    }
    seeds.push_back(lin);
    for (std::size_t s = 1; s <= 3 && s < N; ++s) {
      std::vector<double> st(N, far);
      for (std::size_t j = 0; j < s; ++j) st[left_side ? N - 1 - j : j] = x0;
      seeds.push_back(st);
    }
    double best = inf;
    std::vector<double> bx;
    for (auto& s : seeds) {
      auto sol = solve_chain(h, spec, s, opts);
      if (detail::better_candidate(sol.value, sol.x, best, bx)) {
        best = sol.value;
        bx = sol.x;
      }
    }
    return best - static_cast<double>(N + 1) * pr.c;
  };
  return half(true) + half(false);
}

struct fiber_sample {
  double x0 = 0.0;
  double m = 0.0;
};

struct gap_options {
  double margin = 1e-6;  // m(x0) - c must exceed this inside a gap interval
  double tol = 1e-8;     // m(x0) <= c + tol marks x0 as a heteroclinic fiber value
  unsigned threads = 1;
};

struct gap_report {
  std::vector<fiber_sample> up;    // m(x0) for the u0 -> u1 class
  std::vector<fiber_sample> down;  // m(x0) for the u1 -> u0 class
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<interval> gap_intervals_I0;
  std::vector<interval> gap_intervals_I1;
  std::vector<double> estimated_I0;
  std::vector<double> estimated_I1;
  double e0 = 0.0;
  double e1 = 0.0;
  double margin = 0.0;
  double tol = 0.0;
  long half_window = 0;
  bool has_gap() const { return !gap_intervals_I0.empty() && !gap_intervals_I1.empty(); }
};

inline gap_report detect_gap(const generating_function& h, const neighboring_pair& pr, int fiber_samples,
                             long half_window, const gap_options& go = {}, const minimize_options& opts = {}) {
  if (fiber_samples < 8) throw invalid_parameter("detect_gap: fiber_samples must be at least 8");
  if (half_window < 4) throw invalid_parameter("detect_gap: half_window must be at least 4");
  gap_report g;
  g.margin = go.margin;
  g.tol = go.tol;
  g.half_window = half_window;
  g.c0 = heteroclinic_minimizer(h, pr, direction::up, half_window, opts).value;
  g.c1 = heteroclinic_minimizer(h, pr, direction::down, half_window, opts).value;
  const auto M = static_cast<std::size_t>(fiber_samples);
  std::vector<double> mu(M), md(M);
  auto x0 = [&](std::size_t j) { return pr.u0 + (pr.u1 - pr.u0) * static_cast<double>(j + 1) / (M + 1); };
  detail::parallel_for(2 * M, go.threads, [&](std::size_t t) {
    const std::size_t j = t % M;
    if (t < M)
      mu[j] = pinned_fiber_minimum(h, pr, direction::up, x0(j), half_window, opts);
    else
      md[j] = pinned_fiber_minimum(h, pr, direction::down, x0(j), half_window, opts);
  });
  auto analyse = [&](const std::vector<double>& m, double c, std::vector<fiber_sample>& prof,
                     std::vector<interval>& gaps, std::vector<double>& in_I, double& e) {
    e = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      prof.push_back({x0(j), m[j]});
      if (m[j] <= c + go.tol) in_I.push_back(x0(j));
    }
    for (std::size_t j = 0; j < M;) {
      if (!(m[j] - c >= go.margin)) {
        ++j;
        continue;
      }
      std::size_t k = j;
      double low = m[j] - c;
      while (k + 1 < M && m[k + 1] - c >= go.margin) low = std::min(low, m[++k] - c);
      gaps.push_back({x0(j), x0(k)});
      e = std::max(e, low);
      j = k + 1;
    }
  };
  analyse(mu, g.c0, g.up, g.gap_intervals_I0, g.estimated_I0, g.e0);
  analyse(md, g.c1, g.down, g.gap_intervals_I1, g.estimated_I1, g.e1);
  return g;
}

// ---------------------------------------------------------------------------
// Finite heteroclinic windows

struct heteroclinic_window {
  long n0 = 0;                 // window length
  long start = 0;              // site of the heteroclinic playing the role of index 0
  double tail_bound = 0.0;     // C ((x_0 - u0) + (u1 - x_n0)) for the returned window
  double lipschitz = 0.0;
  heteroclinic het;
};

/// Grows the truncation until sites exist with C (x_s - u0) < eps / 2 and
/// C (u1 - x_{s+n0}) < eps / 2, which bounds every partial action
/// over [s, s+n] for n >= n0 within eps of the heteroclinic value.
inline heteroclinic_window approximate_heteroclinic_window(const generating_function& h, const neighboring_pair& pr,
                                                           double eps, direction dir = direction::up,
                                                           const minimize_options& opts = {}, long max_half = 4096) {
  if (!(eps > 0.0)) throw invalid_parameter("approximate_heteroclinic_window: epsilon must be positive");
  const double C = box_lipschitz(h, pr);
  const double a = pr.state(start_state(dir)), b = pr.state(final_state(dir));
  for (long N = 16; N <= max_half; N *= 2) {
    auto het = heteroclinic_minimizer(h, pr, dir, N, opts);
    const auto& x = het.x;
    const long n = static_cast<long>(x.size());
    long s = -1;
    for (long j = n - 1; j >= 0; --j)
      if (C * std::abs(x[j] - a) < 0.5 * eps) {
        s = j;
        break;
      }
    if (s < 0 || s == 0) continue;  // the start must be preceded by a genuine tail
    long e = -1;
    for (long j = s + 1; j < n; ++j)
      if (C * std::abs(b - x[j]) < 0.5 * eps) {
        e = j;
        break;
      }
    if (e < 0 || e == n - 1) continue;
    heteroclinic_window w;
    w.start = het.lo + s;
    w.n0 = e - s;
    w.tail_bound = C * (std::abs(x[s] - a) + std::abs(b - x[e]));
    w.lipschitz = C;
    w.het = std::move(het);
    return w;
  }
  throw non_convergence("approximate_heteroclinic_window: window growth cap exceeded", {}, inf);
}

// ---------------------------------------------------------------------------
// Periodic minimizers

struct periodic_orbit {
  int q = 1;
  long p = 0;
  configuration config;  // one period, x_q = x_0 + p, periodic tails
  double action = 0.0;   // action of one period
};

/// (q,p)-periodic minimal configuration: minimizes over x_0 in [0,1) the
/// fixed-endpoint segment from x_0 to x_0 + p with q - 1 interior sites.
inline periodic_orbit periodic_minimizer(const generating_function& h, int q, long p, const minimize_options& opts = {}) {
  if (q < 1) throw invalid_parameter("periodic_minimizer: q must be positive");
  const double P = static_cast<double>(p);
  auto seg = [&](double x0) {
    const interval box{std::min(x0, x0 + P) - 1.0, std::max(x0, x0 + P) + 1.0};
    return minimize_segment(h, x0, x0 + P, q - 1, box, opts);
  };
  const int G = 64;
  double best = inf, arg = 0.0;
  for (int j = 0; j < G; ++j) {
    const double v = seg(static_cast<double>(j) / G).action;
    if (v < best - 1e-12) {
      best = v;
      arg = static_cast<double>(j) / G;
    }
  }
  const double x0 = detail::golden_min([&](double t) { return seg(t).action; }, arg - 1.0 / G, arg + 1.0 / G, 1e-10);
  auto r = seg(x0);
  if (r.action > best) r = seg(arg);
  periodic_orbit o;
  o.q = q;
  o.p = p;
  o.action = r.action;
  o.config.lo = 0;
  o.config.values.assign(r.segment.begin(), r.segment.end() - 1);
  o.config.left_tail = periodic_lift{q, p};
  o.config.right_tail = periodic_lift{q, p};
  return o;
}

}  // namespace twist
