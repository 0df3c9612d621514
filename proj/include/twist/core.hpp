#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace twist {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class invalid_parameter : public error {
 public:
  using error::error;
};

/// A one-dimensional root search had no sign change on its bracket.
class bracket_error : public error {
 public:
  using error::error;
};

/// Input outside the set on which a quantity is defined.
class domain_error : public error {
 public:
  using error::error;
};

/// A configuration does not satisfy the window constraints it is tested against.
class constraint_violation : public error {
 public:
  constraint_violation(const std::string& what, long index)
      : error(what + " (site " + std::to_string(index) + ")"), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

/// An iterative solver stopped before reaching its tolerance.
/// The best iterate found is kept for diagnostics.
class non_convergence : public error {
 public:
  non_convergence(const std::string& what, std::vector<double> best, double residual)
      : error(what), best_(std::move(best)), residual_(residual) {}
  const std::vector<double>& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> best_;
  double residual_;
};

/// The minimizer set of h(x,x) is not a discrete lattice.
class degenerate_foliation : public error {
 public:
  using error::error;
};

/// A required structural assumption (for example a nonempty gap) does not hold.
class precondition_error : public error {
 public:
  using error::error;
};

/// A schedule could not be built so that the required inequalities hold.
class construction_error : public error {
 public:
  using error::error;
};

class lift_inconsistency : public error {
 public:
  using error::error;
};

struct interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

enum class end_state { u0, u1 };

/// up: from u0 at -infinity to u1 at +infinity; down: the reverse.
enum class direction { up, down };

inline const char* to_string(end_state s) { return s == end_state::u0 ? "u0" : "u1"; }
inline const char* to_string(direction d) { return d == direction::up ? "up" : "down"; }

inline end_state start_state(direction d) { return d == direction::up ? end_state::u0 : end_state::u1; }
inline end_state final_state(direction d) { return d == direction::up ? end_state::u1 : end_state::u0; }

inline constexpr double inf = std::numeric_limits<double>::infinity();

namespace detail {

template <class Real>
const Real& pi() {
  using std::acos;
  static const Real value = acos(Real(-1));
  return value;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class T>
double to_double(const T& x) {
  return static_cast<double>(x);
}

}  // namespace detail
}  // namespace twist
