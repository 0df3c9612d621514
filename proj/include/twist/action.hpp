#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "twist/chain.hpp"
#include "twist/core.hpp"
#include "twist/genfn.hpp"

namespace twist {

struct periodic_lift {
  int q = 1;
  long p = 0;
  bool operator==(const periodic_lift&) const = default;
};

using tail_spec = std::variant<end_state, periodic_lift>;

inline bool is_constant(const tail_spec& t) { return std::holds_alternative<end_state>(t); }

/// Two adjacent (1,0)-periodic minimizers and the minimal diagonal value c.
struct neighboring_pair {
  double u0 = 0.0;
  double u1 = 1.0;
  double c = 0.0;
  int period_check_resolution = 4096;

  double state(end_state s) const { return s == end_state::u0 ? u0 : u1; }
};

/// Throws precondition_error if the pair invariants fail for h.
inline void validate_pair(const generating_function& h, const neighboring_pair& pr) {
  if (!(pr.u0 < pr.u1)) throw precondition_error("neighboring pair: u0 < u1 required");
  for (double u : {pr.u0, pr.u1}) {
    if (std::abs(h.d1(u, u) + h.d2(u, u)) > 1e-10)
      throw precondition_error("neighboring pair: " + std::to_string(u) + " is not stationary");
    if (std::abs(h(u, u) - pr.c) > 1e-10)
      throw precondition_error("neighboring pair: h(u,u) differs from c at " + std::to_string(u));
  }
  const int n = std::max(pr.period_check_resolution, 2);
  for (int j = 1; j < n; ++j) {
    const double x = pr.u0 + (pr.u1 - pr.u0) * j / n;
    if (h(x, x) <= pr.c + 1e-12)
      throw precondition_error("neighboring pair: another periodic minimizer near " + std::to_string(x));
  }
}

/// Finite window of a bi-infinite configuration plus tail descriptions.
struct configuration {
  long lo = 0;
  std::vector<double> values;
  tail_spec left_tail = end_state::u0;
  tail_spec right_tail = end_state::u0;

  long hi() const { return lo + static_cast<long>(values.size()) - 1; }
  bool covers(long i) const { return i >= lo && i <= hi(); }
  double& operator[](long i) { return values[static_cast<std::size_t>(i - lo)]; }
  double operator[](long i) const { return values[static_cast<std::size_t>(i - lo)]; }

  /// Value at any index, extending the window through its tails.
  double at(long i, const neighboring_pair& pr) const {
    if (covers(i)) return (*this)[i];
    const bool left = i < lo;
    const tail_spec& t = left ? left_tail : right_tail;
    if (auto s = std::get_if<end_state>(&t)) return pr.state(*s);
    const auto& pl = std::get<periodic_lift>(t);
    const long q = pl.q;
    const long n = static_cast<long>(values.size());
    if (n < q) throw domain_error("configuration: periodic tail needs a window of at least q sites");
    long m;  // number of periods to shift back into the window
    if (left)
      m = (lo - i + q - 1) / q;
    else
      m = -((i - hi() + q - 1) / q);
    return (*this)[i + m * q] - static_cast<double>(m * pl.p);
  }
};

inline void validate(const configuration& x) {
  if (x.values.empty()) throw invalid_parameter("configuration: empty window");
  for (double v : x.values)
    if (!std::isfinite(v)) throw invalid_parameter("configuration: non-finite value");
  for (const tail_spec* t : {&x.left_tail, &x.right_tail})
    if (auto pl = std::get_if<periodic_lift>(t); pl && pl->q < 1)
      throw invalid_parameter("configuration: periodic tail needs q >= 1");
}

/// Values within [u0 - 1, u1 + 1].
inline void validate_in_strip(const configuration& x, const neighboring_pair& pr) {
  validate(x);
  for (long i = x.lo; i <= x.hi(); ++i)
    if (x[i] < pr.u0 - 1.0 || x[i] > pr.u1 + 1.0)
      throw domain_error("configuration: value outside the strip at site " + std::to_string(i));
}

/// Window constraints: k strictly increasing with k[0] = 0, radii rho and labels.
struct schedule {
  std::vector<long> k;
  std::vector<double> rho;
  std::vector<end_state> labels;

  std::size_t size() const { return k.size(); }
  std::size_t blocks() const { return k.empty() ? 0 : k.size() - 1; }
  bool is_transition(std::size_t i) const { return labels[i] != labels[i + 1]; }
  direction block_direction(std::size_t i) const {
    return labels[i] == end_state::u0 ? direction::up : direction::down;
  }
  std::size_t transition_count() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i + 1 < size(); ++i) t += is_transition(i);
    return t;
  }
  long max_block() const {
    long m = 0;
    for (std::size_t i = 0; i + 1 < size(); ++i) m = std::max(m, k[i + 1] - k[i]);
    return m;
  }
  double rho_sum() const {
    double s = 0.0;
    for (double r : rho) s += r;
    return s;
  }
};

inline void validate_schedule(const schedule& s, const neighboring_pair& pr) {
  if (s.k.empty()) throw invalid_parameter("schedule: empty");
  if (s.rho.size() != s.k.size() || s.labels.size() != s.k.size())
    throw invalid_parameter("schedule: k, rho and labels must have equal length");
  if (s.k[0] != 0) throw invalid_parameter("schedule: k[0] must be 0");
  for (std::size_t i = 0; i + 1 < s.k.size(); ++i)
    if (!(s.k[i] < s.k[i + 1])) throw invalid_parameter("schedule: k must be strictly increasing");
  const double half = 0.5 * (pr.u1 - pr.u0);
  for (double r : s.rho)
    if (!(r > 0.0 && r < half)) throw invalid_parameter("schedule: rho must lie in (0, (u1-u0)/2)");
  for (std::size_t i = 1; i + 1 < s.labels.size(); ++i)
    if (s.labels[i - 1] == s.labels[i + 1] && s.labels[i] != s.labels[i - 1])
      throw invalid_parameter("schedule: isolated label at index " + std::to_string(i));
}

/// Alternating pattern u0,u0,u1,u1,u0,u0,... with the given number of transitions.
inline std::vector<end_state> alternating_labels(std::size_t transitions, end_state first = end_state::u0) {
  std::vector<end_state> out;
  end_state cur = first;
  for (std::size_t t = 0; t <= transitions; ++t) {
    out.push_back(cur);
    out.push_back(cur);
    cur = cur == end_state::u0 ? end_state::u1 : end_state::u0;
  }
  return out;
}

enum class block_kind { interior, transition_plus, transition_minus };

inline const char* to_string(block_kind k) {
  switch (k) {
    case block_kind::interior:
      return "interior";
    case block_kind::transition_plus:
      return "transition-plus";
    default:
      return "transition-minus";
  }
}

struct block_term {
  long index = 0;  // -1 and blocks() denote the two tails
  double value = 0.0;
  block_kind kind = block_kind::interior;
};

struct action_report {
  double total = 0.0;
  std::vector<block_term> per_block;
  long residual_lo = 0;
  std::vector<double> per_site_residual;
};

// ---------------------------------------------------------------------------

inline double segment_action(const generating_function& h, const std::vector<double>& seg) {
  if (seg.size() < 2) throw invalid_parameter("segment_action: a segment needs at least 2 points");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < seg.size(); ++i) s += h(seg[i], seg[i + 1]);
  return s;
}

inline double normalized_term_a(const generating_function& h, const neighboring_pair& pr, double x, double y) {
  return h(x, y) - pr.c;
}

/// Normalized action I. Returns +infinity when a tail is a lift with p != 0.
inline double compute_I(const generating_function& h, const neighboring_pair& pr, const configuration& x) {
  for (const tail_spec* t : {&x.left_tail, &x.right_tail}) {
    if (is_constant(*t)) continue;
    const auto& pl = std::get<periodic_lift>(*t);
    if (pl.p != 0) return inf;
    throw domain_error("compute_I: periodic tails with p = 0 are outside the normalization");
  }
  validate(x);
  double s = 0.0;
  for (long i = x.lo - 1; i <= x.hi(); ++i) s += normalized_term_a(h, pr, x.at(i, pr), x.at(i + 1, pr));
  return s;
}

struct block_constant_value {
  double value = 0.0;
  std::vector<double> segment;  // spacing + 1 points
};

/// Minimum of the block action over segments leaving the rho_i window of the
/// start state and ending in the rho_next window of the final state.
inline block_constant_value block_constant(const generating_function& h, const neighboring_pair& pr, long spacing,
                                           double rho_i, double rho_next, direction dir,
                                           const minimize_options& opts = {}) {
  if (spacing < 1) throw invalid_parameter("block_constant: spacing must be at least 1");
  const double half = 0.5 * (pr.u1 - pr.u0);
  if (!(rho_i > 0.0 && rho_i < half && rho_next > 0.0 && rho_next < half))
    throw invalid_parameter("block_constant: rho outside (0, (u1-u0)/2)");
  const std::size_t n = static_cast<std::size_t>(spacing) + 1;
  chain_spec<double> spec;
  spec.lower.assign(n, pr.u0);
  spec.upper.assign(n, pr.u1);
  const double a = pr.state(start_state(dir)), b = pr.state(final_state(dir));
  if (dir == direction::up) {
    spec.upper.front() = pr.u0 + rho_i;
    spec.lower.back() = pr.u1 - rho_next;
  } else {
    spec.lower.front() = pr.u1 - rho_i;
    spec.upper.back() = pr.u0 + rho_next;
  }
  std::vector<std::vector<double>> seeds;
  auto step_seed = [&](std::size_t jump) {
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = j <= jump ? a : b;
    return s;
  };
  const std::size_t m = n - 1;
  if (m <= 64) {
    for (std::size_t j = 0; j < m; ++j) seeds.push_back(step_seed(j));
  } else {
    for (std::size_t j : {std::size_t{0}, std::size_t{1}, std::size_t{2}, m / 2 - 1, m / 2, m - 3, m - 2, m - 1})
      seeds.push_back(step_seed(j));
  }
  {
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(m);
    seeds.push_back(s);
  }
  block_constant_value best{inf, {}};
  for (auto& s : seeds) {
    auto sol = solve_chain(h, spec, std::move(s), opts);
    const bool better = sol.value < best.value - 1e-12 ||
                        (std::abs(sol.value - best.value) <= 1e-12 && sol.x < best.segment);
    if (better) {
      best.value = sol.value;
      best.segment = std::move(sol.x);
    }
  }
  return best;
}

/// Renormalized action with memoized block constants.
class renormalized_action {
 public:
  renormalized_action(generating_function h, neighboring_pair pr, minimize_options opts = {})
      : h_(std::move(h)), pr_(pr), opts_(opts) {}

  const generating_function& h() const { return h_; }
  const neighboring_pair& pair() const { return pr_; }

  block_constant_value block(long spacing, double rho_i, double rho_next, direction dir) const {
    const key k{spacing, rho_i, rho_next, dir};
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache_.find(k); it != cache_.end()) return it->second;
    }
    auto v = block_constant(h_, pr_, spacing, rho_i, rho_next, dir, opts_);
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(k, std::move(v)).first->second;
  }

  /// Block constant of transition block i of a schedule.
  block_constant_value block(const schedule& s, std::size_t i) const {
    return block(s.k[i + 1] - s.k[i], s.rho[i], s.rho[i + 1], s.block_direction(i));
  }

  /// The test sequence: plateaus at the labeled states joined by block-constant minimizers.
  configuration test_sequence(const schedule& s, long lo, long hi) const {
    if (lo > s.k.front() || hi < s.k.back()) throw invalid_parameter("test_sequence: window must cover the schedule");
    configuration x;
    x.lo = lo;
    x.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    x.left_tail = s.labels.front();
    x.right_tail = s.labels.back();
    for (long i = lo; i < s.k.front(); ++i) x[i] = pr_.state(s.labels.front());
    for (long i = s.k.back(); i <= hi; ++i) x[i] = pr_.state(s.labels.back());
    for (std::size_t b = 0; b < s.blocks(); ++b) {
      if (s.is_transition(b)) {
        const auto seg = block(s, b).segment;
        for (std::size_t j = 0; j < seg.size(); ++j) x[s.k[b] + static_cast<long>(j)] = seg[j];
      } else {
        const double v = pr_.state(s.labels[b]);
        const bool left_free = b == 0 || !s.is_transition(b - 1);
        for (long j = s.k[b] + (left_free ? 0 : 1); j < s.k[b + 1]; ++j) x[j] = v;
        const bool right_free = b + 1 >= s.blocks() || !s.is_transition(b + 1);
        if (right_free) x[s.k[b + 1]] = v;
      }
    }
    return x;
  }

  /// J and its block decomposition. Tails contribute their normalized sums
  /// as blocks -1 (left of k_0) and blocks() (right of k_m).
  action_report compute(const schedule& s, const configuration& x) const {
    validate(x);
    if (!is_constant(x.left_tail) || !is_constant(x.right_tail))
      throw domain_error("compute_J: tails must be constant");
    if (!x.covers(s.k.front()) || !x.covers(s.k.back()))
      throw invalid_parameter("compute_J: window does not cover the schedule");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double d = std::abs(x[s.k[i]] - pr_.state(s.labels[i]));
      if (d > s.rho[i] + 1e-12) throw constraint_violation("compute_J: window constraint violated", s.k[i]);
    }
    action_report rep;
    auto a = [&](long j) { return h_(x.at(j, pr_), x.at(j + 1, pr_)) - pr_.c; };
    double left = 0.0;
    for (long j = x.lo - 1; j < s.k.front(); ++j) left += a(j);
    rep.per_block.push_back({-1, left, block_kind::interior});
    for (std::size_t b = 0; b < s.blocks(); ++b) {
      double sum = 0.0;
      for (long j = s.k[b]; j < s.k[b + 1]; ++j) sum += h_(x[j], x[j + 1]);
      block_term t{static_cast<long>(b), 0.0, block_kind::interior};
      if (s.is_transition(b)) {
        t.kind = s.block_direction(b) == direction::up ? block_kind::transition_plus : block_kind::transition_minus;
        t.value = sum - block(s, b).value;
      } else {
        t.value = sum - static_cast<double>(s.k[b + 1] - s.k[b]) * pr_.c;
      }
      rep.per_block.push_back(t);
    }
    double right = 0.0;
    for (long j = s.k.back(); j <= x.hi(); ++j) right += a(j);
    rep.per_block.push_back({static_cast<long>(s.blocks()), right, block_kind::interior});
    for (const auto& t : rep.per_block) rep.total += t.value;
    rep.residual_lo = x.lo;
    rep.per_site_residual.resize(x.values.size());
    for (long i = x.lo; i <= x.hi(); ++i)
      rep.per_site_residual[static_cast<std::size_t>(i - x.lo)] =
          std::abs(h_.d2(x.at(i - 1, pr_), x[i]) + h_.d1(x[i], x.at(i + 1, pr_)));
    return rep;
  }

 private:
  using key = std::tuple<long, double, double, direction>;
  generating_function h_;
  neighboring_pair pr_;
  minimize_options opts_;
  mutable std::mutex mu_;
  mutable std::map<key, block_constant_value> cache_;
};

inline action_report compute_J(const renormalized_action& J, const schedule& s, const configuration& x) {
  return J.compute(s, x);
}

struct rotation_estimate {
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
};

/// Difference quotients over the last `window` sites at each end of the window.
inline rotation_estimate estimate_rotation_number(const configuration& x, long window) {
  rotation_estimate r;
  const long n = static_cast<long>(x.values.size());
  if (n < 2) return r;
  const long w = std::clamp(window, 1L, n - 1);
  r.alpha_plus = (x[x.hi()] - x[x.hi() - w]) / static_cast<double>(w);
  r.alpha_minus = (x[x.lo + w] - x[x.lo]) / static_cast<double>(w);
  return r;
}

/// Exact values from the tails when both are constant (0) or periodic lifts
/// (p/q); otherwise the finite-window estimate.
inline rotation_estimate rotation_number(const configuration& x, long window) {
  auto exact = [](const tail_spec& t) {
    if (is_constant(t)) return 0.0;
    const auto& pl = std::get<periodic_lift>(t);
    return static_cast<double>(pl.p) / pl.q;
  };
  if (is_constant(x.left_tail) == is_constant(x.right_tail)) return {exact(x.right_tail), exact(x.left_tail)};
  return estimate_rotation_number(x, window);
}

}  // namespace twist
