#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "twist/action.hpp"
#include "twist/chain.hpp"
#include "twist/core.hpp"
#include "twist/genfn.hpp"
#include "twist/minimize.hpp"

namespace twist {

/// Counts passages between the clearance collars of u0 and u1, tails included.
inline std::size_t count_transitions(const configuration& x, const neighboring_pair& pr, double clearance) {
  if (!(clearance > 0.0 && clearance < 0.5 * (pr.u1 - pr.u0)))
    throw invalid_parameter("count_transitions: clearance must lie in (0, (u1-u0)/2)");
  int state = -1;
  std::size_t count = 0;
  auto visit = [&](double v) {
    int s = -1;
    if (std::abs(v - pr.u0) < clearance) s = 0;
    if (std::abs(v - pr.u1) < clearance) s = 1;
    if (s < 0) return;
    if (state >= 0 && s != state) ++count;
    state = s;
  };
  if (is_constant(x.left_tail)) visit(pr.state(std::get<end_state>(x.left_tail)));
  for (double v : x.values) visit(v);
  if (is_constant(x.right_tail)) visit(pr.state(std::get<end_state>(x.right_tail)));
  return count;
}

// ---------------------------------------------------------------------------
// Schedule construction

struct pattern_spec {
  bool alternating = true;
  end_state first = end_state::u0;
  std::vector<end_state> labels;  // used when not alternating
};

struct schedule_blueprint {
  double epsilon = 0.05;
  std::size_t n_blocks = 1;  // number of transitions of an alternating pattern
  pattern_spec pattern;
  double safety = 0.9;       // fraction of each strict upper bound actually used
  double rho_decay = 1.0;    // rho_i = rho * rho_decay^|i - centre|
  int phi_n_max = 2;
  bool increasing_spacings = false;
  long max_sites = 10000000;  // cap on k.back(); the minimization window is about twice this
};

struct schedule_plan {
  schedule sched;
  double lipschitz = 0.0;
  double c_star = 0.0;
  double phi_lower = 0.0;
  std::vector<double> deltas;       // per schedule site
  std::vector<double> eps;          // per block (0 for interior blocks)
  std::vector<double> margins;      // per block (0 for interior blocks)
  std::vector<long> het_windows;    // per block (0 for interior blocks)
  std::vector<long> min_spacing;    // per block lower bound used
};

inline std::vector<end_state> blueprint_labels(const schedule_blueprint& bp) {
  if (bp.pattern.alternating) {
    if (bp.n_blocks < 1) throw invalid_parameter("blueprint: n_blocks must be at least 1");
    return alternating_labels(bp.n_blocks, bp.pattern.first);
  }
  if (bp.pattern.labels.size() < 2) throw invalid_parameter("blueprint: explicit pattern needs at least 2 labels");
  return bp.pattern.labels;
}

namespace detail {

inline bool in_any(const std::vector<interval>& gaps, double v) {
  return std::any_of(gaps.begin(), gaps.end(), [&](const interval& g) { return g.contains(v); });
}

/// Window boundary value of site i seen from a transition block in direction d.
inline double boundary_value(const neighboring_pair& pr, end_state label, double rho) {
  return label == end_state::u0 ? pr.u0 + rho : pr.u1 - rho;
}

}  // namespace detail

/// Checks the strict inequalities of a plan; returns the name of the first
/// violated one or an empty string.
inline std::string violated_inequality(const schedule_plan& p) {
  const auto& s = p.sched;
  const double C = p.lipschitz, cs = p.c_star;
  for (std::size_t b = 0; b < s.blocks(); ++b) {
    const double rr = s.rho[b] + s.rho[b + 1];
    if (!s.is_transition(b)) {
      if (!(rr < cs / (2 * C))) return "(p2) rho_i + rho_{i+1} < c*/(2C) at block " + std::to_string(b);
      if (!(2 * std::max(p.deltas[b], p.deltas[b + 1]) < cs / (2 * C) - rr))
        return "(d) 2 max(delta) < c*/(2C) - (rho_i + rho_{i+1}) at block " + std::to_string(b);
    } else {
      if (!(p.eps[b] + 2 * C * (p.deltas[b] + p.deltas[b + 1]) < p.margins[b] / 2))
        return "(e1) eps_i + 2C(delta_i + delta_{i+1}) < e_i/2 at block " + std::to_string(b);
      if (!(p.eps[b] / (2 * C) < std::min(p.deltas[b], p.deltas[b + 1])))
        return "(e2) eps_i/(2C) < min(delta) at block " + std::to_string(b);
      if (s.k[b + 1] - s.k[b] < p.het_windows[b]) return "(k1) spacing >= n_i at block " + std::to_string(b);
    }
  }
  return {};
}

/// Builds a finite schedule whose radii, visit tolerances and spacings satisfy
/// the construction inequalities for the given gap report.
inline schedule_plan build_schedule(const generating_function& h, const neighboring_pair& pr, const gap_report& gap,
                                    const schedule_blueprint& bp, const minimize_options& opts = {}) {
  if (!(bp.epsilon > 0.0)) throw invalid_parameter("blueprint: epsilon must be positive");
  if (!(bp.safety > 0.0 && bp.safety < 1.0)) throw invalid_parameter("blueprint: safety must lie in (0, 1)");
  if (!(bp.rho_decay > 0.0 && bp.rho_decay <= 1.0)) throw invalid_parameter("blueprint: rho_decay must lie in (0, 1]");
  const auto labels = blueprint_labels(bp);
  const std::size_t m = labels.size();
  {
    schedule probe{std::vector<long>(m), std::vector<double>(m, 0.25 * (pr.u1 - pr.u0)), labels};
    for (std::size_t i = 0; i < m; ++i) probe.k[i] = static_cast<long>(i);
    validate_schedule(probe, pr);
  }
  bool need_up = false, need_down = false;
  for (std::size_t b = 0; b + 1 < m; ++b) {
    if (labels[b] == labels[b + 1]) continue;
    (labels[b] == end_state::u0 ? need_up : need_down) = true;
  }
  if (need_up && gap.gap_intervals_I0.empty())
    throw precondition_error("gap condition fails: no gap interval for u0 -> u1 heteroclinics (I0 covers (u0,u1))");
  if (need_down && gap.gap_intervals_I1.empty())
    throw precondition_error("gap condition fails: no gap interval for u1 -> u0 heteroclinics (I1 covers (u0,u1))");

  schedule_plan plan;
  const double C = box_lipschitz(h, pr);
  const double cs = gap.c0 + gap.c1;
  if (!(cs > 0.0)) throw precondition_error("build_schedule: c* must be positive");
  plan.lipschitz = C;
  plan.c_star = cs;

  // Step 1: radii.
  const double cap = std::min({bp.epsilon, cs / (4 * C), 0.5 * (pr.u1 - pr.u0)});
  const double centre = 0.5 * static_cast<double>(m - 1);
  auto radii = [&](double rho) {
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = rho * std::pow(bp.rho_decay, std::abs(static_cast<double>(i) - centre));
    return r;
  };
  auto margins_for = [&](const std::vector<double>& r, std::vector<double>& out) {
    out.assign(m - 1, 0.0);
    for (std::size_t b = 0; b + 1 < m; ++b) {
      if (labels[b] == labels[b + 1]) continue;
      const direction d = labels[b] == end_state::u0 ? direction::up : direction::down;
      const auto& gaps = d == direction::up ? gap.gap_intervals_I0 : gap.gap_intervals_I1;
      const double c = d == direction::up ? gap.c0 : gap.c1;
      double e = inf;
      for (std::size_t i : {b, b + 1}) {
        const double v = detail::boundary_value(pr, labels[i], r[i]);
        if (!detail::in_any(gaps, v)) return false;
        e = std::min(e, pinned_fiber_minimum(h, pr, d, v, gap.half_window, opts) - c);
      }
      if (!(e >= gap.margin)) return false;
      out[b] = e;
    }
    return true;
  };
  std::vector<double> rho;
  bool found = false;
  for (int j = 0; j < 64 && !found; ++j) {
    rho = radii(bp.safety * cap * (1.0 - j / 64.0));
    found = margins_for(rho, plan.margins);
  }
  if (!found)
    throw construction_error("(p1) infeasible: no rho < epsilon = " + std::to_string(bp.epsilon) +
                             " puts the window boundaries inside the gap intervals");

  // Step 2: visit tolerances.
  double delta = inf;
  for (std::size_t b = 0; b + 1 < m; ++b) {
    if (labels[b] == labels[b + 1])
      delta = std::min(delta, 0.5 * (cs / (2 * C) - (rho[b] + rho[b + 1])));
    else
      delta = std::min(delta, plan.margins[b] / (10 * C));
  }
  delta *= bp.safety;
  if (!(delta > 0.0)) throw construction_error("(d) infeasible: no positive delta");
  plan.deltas.assign(m, delta);
  const auto phi = estimate_phi(h, pr, delta, bp.phi_n_max, opts);
  plan.phi_lower = phi.lower;
  if (!(phi.lower > 0.0)) throw construction_error("phi(delta) lower estimate is not positive");

  // Step 3: heteroclinic windows for the transition blocks; spacings.
  plan.eps.assign(m - 1, 0.0);
  plan.het_windows.assign(m - 1, 0);
  plan.min_spacing.assign(m - 1, 1);
  for (std::size_t b = 0; b + 1 < m; ++b) {
    if (labels[b] == labels[b + 1]) {
      const double need = (cs / 2 + C * (rho[b] + rho[b + 1])) / phi.lower;
      if (!(need <= static_cast<double>(bp.max_sites)))
        throw construction_error("interior spacing " + detail::fmt(need) + " exceeds max_sites: phi(delta) >= " +
                                 detail::fmt(phi.lower) + " at delta = " + detail::fmt(delta) +
                                 " is too small; the gap margins e0 = " + detail::fmt(gap.e0) +
                                 ", e1 = " + detail::fmt(gap.e1) + " are too thin for a computable schedule");
      plan.min_spacing[b] = std::max(1L, static_cast<long>(std::ceil(need)));
    } else {
      const direction d = labels[b] == end_state::u0 ? direction::up : direction::down;
      plan.eps[b] = C * delta;
      plan.het_windows[b] = approximate_heteroclinic_window(h, pr, plan.eps[b], d, opts).n0;
      plan.min_spacing[b] = std::max(1L, plan.het_windows[b]);
    }
  }

  // Step 4: indices.
  plan.sched.labels = labels;
  plan.sched.rho = rho;
  plan.sched.k.assign(m, 0);
  long prev = 0;
  for (std::size_t b = 0; b + 1 < m; ++b) {
    long sp = plan.min_spacing[b];
    if (bp.increasing_spacings && b > 0) sp = std::max(sp, prev + 1);
    plan.sched.k[b + 1] = plan.sched.k[b] + sp;
    prev = sp;
    if (plan.sched.k[b + 1] > bp.max_sites)
      throw construction_error("schedule length " + std::to_string(plan.sched.k[b + 1]) + " exceeds max_sites");
  }
  validate_schedule(plan.sched, pr);
  if (auto v = violated_inequality(plan); !v.empty()) throw construction_error("violated inequality " + v);
  return plan;
}

// ---------------------------------------------------------------------------
// Minimization of J

struct transition_result {
  configuration config;
  schedule sched;
  std::size_t transitions = 0;
  bool interior = false;
  std::vector<std::size_t> offending;  // schedule indices whose site touches its window boundary
  double max_residual = 0.0;
  double action_value = 0.0;
  action_report report;
  double surgery_gain = std::numeric_limits<double>::quiet_NaN();  // J(z) - J(x*) when not interior
};

namespace detail {

inline double surgery_diagnostic(const renormalized_action& J, const schedule& s, const configuration& x,
                                 std::size_t site, const minimize_options& opts) {
  const auto& pr = J.pair();
  std::size_t b = site < s.blocks() && s.is_transition(site) ? site : (site > 0 ? site - 1 : 0);
  if (b >= s.blocks() || !s.is_transition(b)) return std::numeric_limits<double>::quiet_NaN();
  const long len = s.k[b + 1] - s.k[b];
  const auto het = heteroclinic_minimizer(J.h(), pr, s.block_direction(b), std::max(4L, len), opts);
  configuration z = x;
  const long centre = s.k[b] + len / 2;
  for (long j = s.k[b]; j <= s.k[b + 1]; ++j) {
    const long src = j - centre;  // heteroclinic index; its jump sits near 0
    z[j] = src < het.lo ? pr.state(start_state(het.dir))
                        : src > het.lo + static_cast<long>(het.x.size()) - 1 ? pr.state(final_state(het.dir))
                                                                            : het.x[src - het.lo];
  }
  try {
    return J.compute(s, z).total - J.compute(s, x).total;
  } catch (const constraint_violation&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace detail

/// Minimizes J over configurations satisfying the window constraints of the
/// schedule, then checks that no constrained site touches its window boundary.
inline transition_result minimize_transition(const renormalized_action& J, const schedule& s,
                                             const minimize_options& opts = {}, long pad = -1) {
  const auto& pr = J.pair();
  const auto& h = J.h();
  validate_schedule(s, pr);
  if (pad < 0) pad = std::max(1L, s.max_block());
  if (pad < s.max_block()) throw invalid_parameter("minimize_transition: padding smaller than the largest block");
  const long lo = s.k.front() - pad, hi = s.k.back() + pad;
  configuration x0 = J.test_sequence(s, lo, hi);
  const std::size_t n = x0.values.size();
  chain_spec<double> spec;
  spec.lower.assign(n, pr.u0);
  spec.upper.assign(n, pr.u1);
  spec.left = pr.state(s.labels.front());
  spec.right = pr.state(s.labels.back());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto j = static_cast<std::size_t>(s.k[i] - lo);
    const double u = pr.state(s.labels[i]);
    spec.lower[j] = std::max(pr.u0, u - s.rho[i]);
    spec.upper[j] = std::min(pr.u1, u + s.rho[i]);
  }
  auto sol = solve_chain(h, spec, x0.values, opts);
  transition_result r;
  r.sched = s;
  r.config = x0;
  r.config.values = std::move(sol.x);
  r.report = J.compute(s, r.config);
  r.action_value = r.report.total;
  r.max_residual = *std::max_element(r.report.per_site_residual.begin(), r.report.per_site_residual.end());
  r.interior = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = std::abs(r.config[s.k[i]] - pr.state(s.labels[i]));
    if (!(d < s.rho[i] - 1e-12)) {
      r.interior = false;
      r.offending.push_back(i);
    }
  }
  double clearance = *std::min_element(s.rho.begin(), s.rho.end());
  r.transitions = count_transitions(r.config, pr, clearance);
  if (!r.interior) r.surgery_gain = detail::surgery_diagnostic(J, s, r.config, r.offending.front(), opts);
  return r;
}

inline transition_result minimize_transition(const generating_function& h, const neighboring_pair& pr,
                                             const schedule& s, const minimize_options& opts = {}) {
  renormalized_action J(h, pr, opts);
  return minimize_transition(J, s, opts);
}

/// Sitewise monotonicity of each transition block in its designed direction.
/// A step passes if it is strict or if both sites agree with the same end
/// state to within tol (differences below the working precision).
inline std::vector<std::size_t> non_monotone_blocks(const transition_result& r, const neighboring_pair& pr,
                                                    double tol = 1e-10) {
  std::vector<std::size_t> bad;
  const auto& s = r.sched;
  for (std::size_t b = 0; b < s.blocks(); ++b) {
    if (!s.is_transition(b)) continue;
    const bool up = s.block_direction(b) == direction::up;
    for (long j = s.k[b]; j < s.k[b + 1]; ++j) {
      const double a = r.config[j], c = r.config[j + 1];
      const bool strict = up ? c > a : c < a;
      const bool saturated = (std::abs(a - pr.u0) <= tol && std::abs(c - pr.u0) <= tol) ||
                             (std::abs(a - pr.u1) <= tol && std::abs(c - pr.u1) <= tol);
      if (!strict && !saturated) {
        bad.push_back(b);
        break;
      }
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Rational lifting

struct reduced_fixed_point_result {
  double y = 0.0;
  double value = 0.0;
  double residual = 0.0;  // |d1 H + d2 H| at (y, y)
};

/// Minimizer over [0, 1) of H(y, y): a constant stationary configuration of H.
inline reduced_fixed_point_result reduced_fixed_point(const two_point_fn& H, conjunction_options copt = {},
                                                      int grid = 64) {
  double best = inf, arg = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double y = static_cast<double>(j) / grid;
    const double v = H(y, y).value;
    if (v < best) best = v, arg = y;
  }
  const double w = 1.0 / grid;
  auto slope = [&](double t) {
    const auto v = H(t, t);
    return v.d1 + v.d2;
  };
  double lo = arg - w, hi = arg + w, y;
  if (slope(lo) < 0.0 && slope(hi) > 0.0) {
    for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    y = 0.5 * (lo + hi);
  } else {
    y = detail::golden_min([&](double t) { return H(t, t).value; }, lo, hi, copt.xi_tol);
  }
  const auto v = H(y, y);
  return {y, v.value, std::abs(v.d1 + v.d2)};
}

/// Expands a configuration of H = rational_reduction(h, q, p) into an
/// h-configuration with x_{iq} = y_i + i p. `y_pair` supplies the values of
/// y's constant tails. The result covers one extra H-step beyond each end of
/// y's window so a constant tail appears as a full period.
inline configuration lift_rational(const generating_function& h, int q, long p, const configuration& y,
                                   const neighboring_pair& y_pair, interval domain, double tol = 1e-8,
                                   conjunction_options copt = {}) {
  validate(y);
  if (q < 1) throw invalid_parameter("lift_rational: q must be positive");
  if (q == 1 && p == 0) return y;
  const auto H = rational_reduction(h, q, p, domain, copt);
  const long lo = y.lo - 2, hi = y.hi() + 2;
  std::vector<double> x;
  for (long i = lo; i < hi; ++i) {
    const double a = y.at(i, y_pair), b = y.at(i + 1, y_pair);
    const auto v = H(a, b);
    const double shift = static_cast<double>(i * p);
    x.push_back(a + shift);
    for (double t : v.inner) x.push_back(t + shift);
  }
  x.push_back(y.at(hi, y_pair) + static_cast<double>(hi * p));
  const auto res = stationarity_residuals(h, x);
  for (std::size_t j = 1; j + 1 < x.size(); ++j)
    if (res[j] > tol)
      throw lift_inconsistency("lift_rational: residual " + std::to_string(res[j]) + " at lifted site " +
                               std::to_string(lo * q + static_cast<long>(j)));
  configuration out;
  out.lo = (lo + 1) * q;
  out.values.assign(x.begin() + q, x.end() - q);
  auto tail = [&](const tail_spec& t) -> tail_spec {
    if (is_constant(t)) return periodic_lift{q, p};
    const auto& pl = std::get<periodic_lift>(t);
    return periodic_lift{pl.q * q, pl.p * q + p * pl.q};
  };
  out.left_tail = tail(y.left_tail);
  out.right_tail = tail(y.right_tail);
  return out;
}

// ---------------------------------------------------------------------------
// Schedule-indexed minimizers

struct distinctness_report {
  std::vector<transition_result> results;
  std::vector<std::vector<double>> sup_difference;  // at indices constrained in either schedule
  double clearance = 0.0;                           // min rho / 2
  bool all_distinct = true;                         // over pairs of different index sequences
  bool repeats_identical = true;                    // equal sequences give bit-identical configurations
};

inline schedule indexed_schedule(const schedule& base, const std::vector<long>& j) {
  if (j.empty() || j.front() != 0) throw invalid_parameter("index sequence must start at 0");
  if (j.size() > base.size()) throw invalid_parameter("index sequence longer than the base schedule");
  schedule s;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (i > 0 && !(j[i] > j[i - 1])) throw invalid_parameter("index sequence must be strictly increasing");
    if (j[i] < 0 || static_cast<std::size_t>(j[i]) >= base.size())
      throw invalid_parameter("index sequence entry outside the base schedule");
    s.k.push_back(base.k[static_cast<std::size_t>(j[i])]);
    s.rho.push_back(base.rho[i]);
    s.labels.push_back(base.labels[i]);
  }
  return s;
}

inline distinctness_report multi_schedule_distinctness(const renormalized_action& J, const schedule& base,
                                                       const std::vector<std::vector<long>>& sequences,
                                                       const minimize_options& opts = {}, unsigned threads = 1) {
  const auto& pr = J.pair();
  validate_schedule(base, pr);
  for (std::size_t i = 0; i + 2 < base.size(); ++i)
    if (!(base.k[i + 1] - base.k[i] < base.k[i + 2] - base.k[i + 1]))
      throw precondition_error("multi_schedule_distinctness: base spacings must be strictly increasing");
  std::vector<schedule> scheds;
  for (const auto& j : sequences) scheds.push_back(indexed_schedule(base, j));
  long pad = 0;
  for (const auto& s : scheds) pad = std::max(pad, s.max_block());
  distinctness_report rep;
  rep.results.resize(scheds.size());
  detail::parallel_for(scheds.size(), threads,
                       [&](std::size_t i) { rep.results[i] = minimize_transition(J, scheds[i], opts, pad); });
  rep.clearance = 0.5 * *std::min_element(base.rho.begin(), base.rho.end());
  const std::size_t n = scheds.size();
  rep.sup_difference.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      double d = 0.0;
      for (const auto* s : {&scheds[a], &scheds[b]})
        for (long k : s->k)
          d = std::max(d, std::abs(rep.results[a].config.at(k, pr) - rep.results[b].config.at(k, pr)));
      rep.sup_difference[a][b] = rep.sup_difference[b][a] = d;
      if (sequences[a] == sequences[b]) {
        if (rep.results[a].config.values != rep.results[b].config.values || rep.results[a].config.lo != rep.results[b].config.lo)
          rep.repeats_identical = false;
      } else if (!(d > rep.clearance)) {
        rep.all_distinct = false;
      }
    }
  return rep;
}

}  // namespace twist
