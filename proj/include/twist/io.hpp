#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twist/action.hpp"
#include "twist/genfn.hpp"
#include "twist/minimize.hpp"
#include "twist/transition.hpp"

namespace twist::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Models

inline double require_number(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw invalid_parameter(std::string(where) + ": missing \"" + key + "\"");
  if (!j.at(key).is_number()) throw invalid_parameter(std::string(where) + ": \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

inline generating_function parse_model(const json& j) {
  if (!j.is_object() || !j.contains("model") || !j.at("model").is_string())
    throw invalid_parameter("model: expected an object with a \"model\" name");
  const auto name = j.at("model").get<std::string>();
  if (name == "frenkel-kontorova") {
    fk_params p;
    p.coupling = require_number(j, "coupling", "model");
    p.amplitude = require_number(j, "amplitude", "model");
    return fk_generating_function(p);
  }
  if (name == "fk-tabulated") {
    const double c = require_number(j, "coupling", "model");
    if (!j.contains("samples") || !j.at("samples").is_array())
      throw invalid_parameter("model: \"samples\" must be an array of numbers");
    std::vector<double> s;
    for (const auto& v : j.at("samples")) {
      if (!v.is_number()) throw invalid_parameter("model: \"samples\" must be an array of numbers");
      s.push_back(v.get<double>());
    }
    return fk_tabulated_generating_function(c, std::move(s));
  }
  throw invalid_parameter("model: unknown model \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Configurations

inline json to_json(const tail_spec& t) {
  if (auto s = std::get_if<end_state>(&t)) return to_string(*s);
  const auto& pl = std::get<periodic_lift>(t);
  return json{{"periodic", {pl.q, pl.p}}};
}

inline tail_spec tail_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "u0") return end_state::u0;
    if (s == "u1") return end_state::u1;
  } else if (j.is_object() && j.contains("periodic") && j.at("periodic").is_array() && j.at("periodic").size() == 2) {
    return periodic_lift{j.at("periodic")[0].get<int>(), j.at("periodic")[1].get<long>()};
  }
  throw invalid_parameter("configuration: tail must be \"u0\", \"u1\" or {\"periodic\":[q,p]}");
}

inline json to_json(const configuration& x) {
  return json{{"lo", x.lo}, {"values", x.values}, {"left_tail", to_json(x.left_tail)},
              {"right_tail", to_json(x.right_tail)}};
}

inline configuration configuration_from_json(const json& j) {
  configuration x;
  try {
    x.lo = j.at("lo").get<long>();
    x.values = j.at("values").get<std::vector<double>>();
    x.left_tail = tail_from_json(j.at("left_tail"));
    x.right_tail = tail_from_json(j.at("right_tail"));
  } catch (const json::exception& e) {
    throw invalid_parameter(std::string("configuration: ") + e.what());
  }
  validate(x);
  return x;
}

inline json to_json(const neighboring_pair& pr) { return json{{"u0", pr.u0}, {"u1", pr.u1}, {"c", pr.c}}; }

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const hypothesis_report& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"status", c.passed ? "pass" : "fail"}, {"worst", c.worst},
                      {"witness", c.witness}, {"detail", c.detail}});
  return json{{"checks", checks}, {"degenerate_diagonal", r.degenerate_diagonal}, {"all_passed", r.all_passed()}};
}

inline json to_json(const action_report& r) {
  json blocks = json::array();
  for (const auto& b : r.per_block) blocks.push_back({{"index", b.index}, {"kind", to_string(b.kind)}, {"value", b.value}});
  return json{{"total", r.total}, {"per_block", blocks}, {"residual_lo", r.residual_lo},
              {"per_site_residual", r.per_site_residual}};
}

inline json to_json(const std::vector<interval>& v) {
  json a = json::array();
  for (const auto& i : v) a.push_back({i.lo, i.hi});
  return a;
}

inline json to_json(const gap_report& g) {
  auto profile = [](const std::vector<fiber_sample>& s) {
    json a = json::array();
    for (const auto& f : s) a.push_back({f.x0, f.m});
    return a;
  };
  return json{{"c0", g.c0},
              {"c1", g.c1},
              {"e0", g.e0},
              {"e1", g.e1},
              {"margin", g.margin},
              {"tol", g.tol},
              {"half_window", g.half_window},
              {"has_gap", g.has_gap()},
              {"gap_intervals_I0", to_json(g.gap_intervals_I0)},
              {"gap_intervals_I1", to_json(g.gap_intervals_I1)},
              {"estimated_I0", g.estimated_I0},
              {"estimated_I1", g.estimated_I1},
              {"profile_up", profile(g.up)},
              {"profile_down", profile(g.down)}};
}

inline json to_json(const schedule& s) {
  std::vector<std::string> labels;
  for (auto l : s.labels) labels.emplace_back(to_string(l));
  return json{{"k", s.k}, {"rho", s.rho}, {"labels", labels}};
}

inline json to_json(const schedule_plan& p) {
  return json{{"schedule", to_json(p.sched)}, {"lipschitz", p.lipschitz},   {"c_star", p.c_star},
              {"phi_lower", p.phi_lower},     {"deltas", p.deltas},         {"eps", p.eps},
              {"margins", p.margins},         {"het_windows", p.het_windows}, {"min_spacing", p.min_spacing}};
}

inline json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const transition_result& r) {
  return json{{"schedule", to_json(r.sched)},
              {"interior", r.interior},
              {"offending", r.offending},
              {"transitions", r.transitions},
              {"max_residual", r.max_residual},
              {"action_value", r.action_value},
              {"surgery_gain", nullable(r.surgery_gain)},
              {"report", to_json(r.report)},
              {"configuration", to_json(r.config)}};
}

// ---------------------------------------------------------------------------
// CSV

/// 17 significant digits, enough to round-trip a double.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class csv_writer {
 public:
  explicit csv_writer(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      os_ << (first ? "" : ",") << c;
      first = false;
    }
    os_ << '\n';
  }

  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(v), first = false), ...);
    os_ << '\n';
  }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ostream& os_;
};

/// Site index, value, constrained flag and label for a transition result.
inline void write_csv(std::ostream& os, const transition_result& r) {
  csv_writer w(os);
  w.header({"site", "value", "constrained", "label"});
  const auto& s = r.sched;
  for (long i = r.config.lo; i <= r.config.hi(); ++i) {
    std::string label;
    int constrained = 0;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.k[j] == i) {
        constrained = 1;
        label = to_string(s.labels[j]);
      }
    w.row(i, r.config[i], constrained, label);
  }
}

/// Two columns (x0, constrained_min) per direction.
inline void write_csv(std::ostream& os, const gap_report& g) {
  csv_writer w(os);
  w.header({"direction", "x0", "constrained_min"});
  for (const auto& f : g.up) w.row("up", f.x0, f.m);
  for (const auto& f : g.down) w.row("down", f.x0, f.m);
}

inline void write_csv(std::ostream& os, const configuration& x) {
  csv_writer w(os);
  w.header({"site", "value"});
  for (long i = x.lo; i <= x.hi(); ++i) w.row(i, x[i]);
}

inline void write_csv(std::ostream& os, const action_report& r) {
  csv_writer w(os);
  w.header({"block", "kind", "value"});
  for (const auto& b : r.per_block) w.row(b.index, std::string(to_string(b.kind)), b.value);
}

}  // namespace twist::io
