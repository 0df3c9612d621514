// twist: command-line front end for the twist map library.
//
//   twist --config run.json [--output out.json] [--format json|csv]
//         [--threads N] [--tol T] [--seed S]
//
// Exit codes: 0 ok, 1 other runtime error, 2 validation, 3 non-convergence,
// 4 hypothesis failure, 5 precondition (e.g. no gap).

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twist/io.hpp"
#include "twist/twist.hpp"

namespace {

using twist::io::json;

constexpr const char* version = "0.1.0";

enum exit_code { ok = 0, runtime_failure = 1, validation = 2, no_convergence = 3, hypothesis = 4, precondition = 5 };

struct hypothesis_failure : twist::error {
  using error::error;
};

/// Reads command parameters and rejects keys that were never consumed.
class params {
 public:
  explicit params(json j) : j_(std::move(j)) {
    if (!j_.is_object()) throw twist::invalid_parameter("params: expected an object");
  }

  double number(const std::string& key, double def) {
    if (!take(key)) return def;
    if (!j_.at(key).is_number()) throw twist::invalid_parameter("params: \"" + key + "\" must be a number");
    return j_.at(key).get<double>();
  }
  double number(const std::string& key) {
    if (!j_.contains(key)) throw twist::invalid_parameter("params: missing \"" + key + "\"");
    return number(key, 0.0);
  }
  long integer(const std::string& key, long def) {
    if (!take(key)) return def;
    if (!j_.at(key).is_number_integer()) throw twist::invalid_parameter("params: \"" + key + "\" must be an integer");
    return j_.at(key).get<long>();
  }
  long integer(const std::string& key) {
    if (!j_.contains(key)) throw twist::invalid_parameter("params: missing \"" + key + "\"");
    return integer(key, 0);
  }
  std::string string(const std::string& key, const std::string& def) {
    if (!take(key)) return def;
    if (!j_.at(key).is_string()) throw twist::invalid_parameter("params: \"" + key + "\" must be a string");
    return j_.at(key).get<std::string>();
  }
  twist::interval range(const std::string& key, twist::interval def) {
    if (!take(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw twist::invalid_parameter("params: \"" + key + "\" must be [lo, hi]");
    return {v[0].get<double>(), v[1].get<double>()};
  }
  const json* raw(const std::string& key) { return take(key) ? &j_.at(key) : nullptr; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw twist::invalid_parameter("params: unknown key \"" + k + "\"");
  }

 private:
  bool take(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  json j_;
  std::set<std::string> used_;
};

struct context {
  twist::generating_function h;
  twist::minimize_options opts;
  unsigned threads = 1;
};

struct outcome {
  json result;
  std::function<void(std::ostream&)> csv;
};

using command_fn = std::function<std::function<outcome()>(params&, context&)>;

long positive(long v, const char* what) {
  if (v < 1) throw twist::invalid_parameter(std::string("params: \"") + what + "\" must be positive");
  return v;
}

twist::direction parse_direction(const std::string& s) {
  if (s == "up") return twist::direction::up;
  if (s == "down") return twist::direction::down;
  throw twist::invalid_parameter("params: direction must be \"up\" or \"down\"");
}

twist::end_state parse_state(const std::string& s) {
  if (s == "u0") return twist::end_state::u0;
  if (s == "u1") return twist::end_state::u1;
  throw twist::invalid_parameter("params: state must be \"u0\" or \"u1\"");
}

// ---------------------------------------------------------------------------
// Commands. Each reads and validates its parameters, then returns the work.

std::function<outcome()> cmd_check_h(params& p, context& ctx) {
  const auto xs = p.range("xs", {-0.5, 1.5});
  const auto ys = p.range("ys", {-0.5, 1.5});
  const int n = static_cast<int>(p.integer("grid", 21));
  p.finish();
  if (n < 3) throw twist::invalid_parameter("params: grid must be at least 3");
  return [=, &ctx] {
    const auto rep = twist::check_hypotheses(ctx.h, xs, ys, n);
    outcome o{twist::io::to_json(rep), [rep](std::ostream& os) {
                twist::io::csv_writer w(os);
                w.header({"name", "status", "worst"});
                for (const auto& c : rep.checks) w.row(c.name, std::string(c.passed ? "pass" : "fail"), c.worst);
              }};
    return o;
  };
}

std::function<outcome()> cmd_periodic(params& p, context& ctx) {
  const long q = positive(p.integer("q"), "q");
  const long pp = p.integer("p");
  p.finish();
  return [=, &ctx] {
    const auto orb = twist::periodic_minimizer(ctx.h, static_cast<int>(q), pp, ctx.opts);
    json r{{"q", orb.q}, {"p", orb.p}, {"action", orb.action}, {"configuration", twist::io::to_json(orb.config)}};
    return outcome{r, [orb](std::ostream& os) { twist::io::write_csv(os, orb.config); }};
  };
}

std::function<outcome()> cmd_map_iterate(params& p, context& ctx) {
  const twist::orbit_point start{p.number("x"), p.number("y")};
  const long n = p.integer("steps", 100);
  const double tol = p.number("stationarity_tol", 1e-8);
  p.finish();
  if (n < 1 || n > 1000000) throw twist::invalid_parameter("params: steps must lie in [1, 1e6]");
  return [=, &ctx] {
    const auto orb = twist::iterate_map(ctx.h, start, n);
    if (!(orb.max_residual <= tol))
      throw twist::non_convergence("map-iterate: orbit fails the stationarity check", {}, orb.max_residual);
    json rows = json::array();
    for (std::size_t i = 0; i < orb.points.size(); ++i) rows.push_back({i, orb.points[i].x, orb.points[i].y});
    json r{{"steps", n}, {"max_residual", orb.max_residual}, {"stationary", true}, {"rows", rows}};
    return outcome{r, [orb](std::ostream& os) {
                     twist::io::csv_writer w(os);
                     w.header({"i", "x", "y"});
                     for (std::size_t i = 0; i < orb.points.size(); ++i) w.row(i, orb.points[i].x, orb.points[i].y);
                   }};
  };
}

std::function<outcome()> cmd_heteroclinic(params& p, context& ctx) {
  const auto dir = parse_direction(p.string("direction", "up"));
  const long N = p.integer("half_window", 200);
  p.finish();
  if (N < 4) throw twist::invalid_parameter("params: half_window must be at least 4");
  return [=, &ctx] {
    const auto pr = twist::find_neighboring_pair(ctx.h);
    const auto het = twist::heteroclinic_minimizer(ctx.h, pr, dir, N, ctx.opts);
    const auto x = het.config();
    json r{{"pair", twist::io::to_json(pr)},
           {"direction", twist::to_string(dir)},
           {"value", het.value},
           {"max_residual", het.max_residual},
           {"strictly_monotone", het.strictly_monotone},
           {"strictly_interior", het.strictly_interior},
           {"boundary_sites", het.boundary_sites},
           {"configuration", twist::io::to_json(x)}};
    return outcome{r, [x](std::ostream& os) { twist::io::write_csv(os, x); }};
  };
}

struct gap_params {
  int samples = 64;
  long half_window = 64;
  twist::gap_options go;
};

gap_params read_gap(params& p) {
  gap_params g;
  g.samples = static_cast<int>(p.integer("fiber_samples", 64));
  g.half_window = p.integer("half_window", 64);
  g.go.margin = p.number("margin", 1e-6);
  g.go.tol = p.number("gap_tol", 1e-8);
  if (g.samples < 8) throw twist::invalid_parameter("params: fiber_samples must be at least 8");
  if (g.half_window < 4) throw twist::invalid_parameter("params: half_window must be at least 4");
  if (!(g.go.margin > 0.0) || !(g.go.tol > 0.0)) throw twist::invalid_parameter("params: margin and gap_tol must be positive");
  return g;
}

std::function<outcome()> cmd_gap(params& p, context& ctx) {
  auto g = read_gap(p);
  p.finish();
  return [=, &ctx]() mutable {
    g.go.threads = ctx.threads;
    const auto pr = twist::find_neighboring_pair(ctx.h);
    const auto rep = twist::detect_gap(ctx.h, pr, g.samples, g.half_window, g.go, ctx.opts);
    json r{{"pair", twist::io::to_json(pr)}, {"gap", twist::io::to_json(rep)}};
    return outcome{r, [rep](std::ostream& os) { twist::io::write_csv(os, rep); }};
  };
}

std::function<outcome()> cmd_phi(params& p, context& ctx) {
  const double delta = p.number("delta", 0.25);
  const int n_max = static_cast<int>(p.integer("n_max", 2));
  p.finish();
  if (!(delta > 0.0)) throw twist::invalid_parameter("params: delta must be positive");
  if (n_max < 1) throw twist::invalid_parameter("params: n_max must be positive");
  return [=, &ctx] {
    const auto pr = twist::find_neighboring_pair(ctx.h);
    const auto e = twist::estimate_phi(ctx.h, pr, delta, n_max, ctx.opts);
    json r{{"pair", twist::io::to_json(pr)}, {"delta", delta},         {"upper", e.upper},
           {"lower", e.lower},               {"n_upper", e.n_upper},   {"lower_certified", e.lower_certified},
           {"caveat", e.caveat}};
    return outcome{r, [e, delta](std::ostream& os) {
                     twist::io::csv_writer w(os);
                     w.header({"delta", "upper", "lower"});
                     w.row(delta, e.upper, e.lower);
                   }};
  };
}

twist::schedule_blueprint read_blueprint(params& p) {
  twist::schedule_blueprint bp;
  bp.epsilon = p.number("epsilon", bp.epsilon);
  bp.n_blocks = static_cast<std::size_t>(positive(p.integer("transitions", 1), "transitions"));
  bp.pattern.first = parse_state(p.string("first", "u0"));
  bp.safety = p.number("safety", bp.safety);
  bp.rho_decay = p.number("rho_decay", bp.rho_decay);
  bp.phi_n_max = static_cast<int>(p.integer("phi_n_max", bp.phi_n_max));
  bp.max_sites = p.integer("max_sites", bp.max_sites);
  if (!(bp.epsilon > 0.0)) throw twist::invalid_parameter("params: epsilon must be positive");
  if (!(bp.safety > 0.0 && bp.safety < 1.0)) throw twist::invalid_parameter("params: safety must lie in (0, 1)");
  if (!(bp.rho_decay > 0.0 && bp.rho_decay <= 1.0)) throw twist::invalid_parameter("params: rho_decay must lie in (0, 1]");
  if (bp.max_sites < 1) throw twist::invalid_parameter("params: max_sites must be positive");
  return bp;
}

twist::schedule read_schedule(const json& j) {
  twist::schedule s;
  try {
    s.k = j.at("k").get<std::vector<long>>();
    s.rho = j.at("rho").get<std::vector<double>>();
    for (const auto& l : j.at("labels")) s.labels.push_back(parse_state(l.get<std::string>()));
  } catch (const json::exception& e) {
    throw twist::invalid_parameter(std::string("params: schedule: ") + e.what());
  }
  return s;
}

std::function<outcome()> cmd_transition(params& p, context& ctx) {
  const json* explicit_schedule = p.raw("schedule");
  std::optional<twist::schedule> fixed;
  if (explicit_schedule) fixed = read_schedule(*explicit_schedule);
  auto g = read_gap(p);
  const auto bp = read_blueprint(p);
  p.finish();
  return [=, &ctx]() mutable {
    g.go.threads = ctx.threads;
    const auto pr = twist::find_neighboring_pair(ctx.h);
    json r{{"pair", twist::io::to_json(pr)}};
    twist::schedule s;
    if (fixed) {
      twist::validate_schedule(*fixed, pr);
      s = *fixed;
    } else {
      const auto gap = twist::detect_gap(ctx.h, pr, g.samples, g.half_window, g.go, ctx.opts);
      r["gap"] = twist::io::to_json(gap);
      const auto plan = twist::build_schedule(ctx.h, pr, gap, bp, ctx.opts);
      r["plan"] = twist::io::to_json(plan);
      s = plan.sched;
    }
    const auto res = twist::minimize_transition(ctx.h, pr, s, ctx.opts);
    r["result"] = twist::io::to_json(res);
    return outcome{r, [res](std::ostream& os) { twist::io::write_csv(os, res); }};
  };
}

std::function<outcome()> cmd_rational(params& p, context& ctx) {
  const long q = positive(p.integer("q"), "q");
  const long pp = p.integer("p");
  twist::conjunction_options copt;
  copt.grid_points = static_cast<int>(p.integer("grid_points", copt.grid_points));
  const long periods = positive(p.integer("periods", 8), "periods");
  const double tol = p.number("stationarity_tol", 1e-8);
  p.finish();
  if (copt.grid_points < 2) throw twist::invalid_parameter("params: grid_points must be at least 2");
  return [=, &ctx] {
    const auto dom = twist::default_reduction_domain(pp);
    const auto H = twist::rational_reduction(ctx.h, static_cast<int>(q), pp, dom, copt);
    const auto fp = twist::reduced_fixed_point(H, copt);
    twist::configuration y;
    y.lo = 0;
    y.values.assign(static_cast<std::size_t>(periods), fp.y);
    const twist::neighboring_pair yp{fp.y, fp.y + 1.0, fp.value};
    const auto x = twist::lift_rational(ctx.h, static_cast<int>(q), pp, y, yp, dom, tol, copt);
    double res = 0.0;
    for (double v : twist::stationarity_residuals(ctx.h, x.values)) res = std::max(res, v);
    const long window = static_cast<long>(x.values.size()) - 1;
    const auto rot = twist::estimate_rotation_number(x, window);
    json r{{"q", q},
           {"p", pp},
           {"reduced_fixed_point", fp.y},
           {"reduced_value", fp.value},
           {"reduced_residual", fp.residual},
           {"max_residual", res},
           {"window", window},
           {"rotation_estimate", rot.alpha_plus},
           {"configuration", twist::io::to_json(x)}};
    return outcome{r, [x](std::ostream& os) { twist::io::write_csv(os, x); }};
  };
}

std::function<outcome()> cmd_distinctness(params& p, context& ctx) {
  std::vector<std::vector<long>> seqs = {{0, 1, 2, 3, 4, 5}, {0, 2, 3, 4, 5, 6}, {0, 1, 2, 4, 5, 6}, {0, 1, 2, 3, 4, 5}};
  if (const json* j = p.raw("sequences")) {
    try {
      seqs = j->get<std::vector<std::vector<long>>>();
    } catch (const json::exception& e) {
      throw twist::invalid_parameter(std::string("params: sequences: ") + e.what());
    }
  }
  auto g = read_gap(p);
  auto bp = read_blueprint(p);
  p.finish();
  bp.increasing_spacings = true;
  std::size_t need = 0;
  for (const auto& s : seqs) {
    if (s.empty()) throw twist::invalid_parameter("params: empty index sequence");
    need = std::max(need, static_cast<std::size_t>(std::max(0L, s.back())) + 1);
  }
  while (2 * (bp.n_blocks + 1) < need) ++bp.n_blocks;
  return [=, &ctx]() mutable {
    g.go.threads = ctx.threads;
    const auto pr = twist::find_neighboring_pair(ctx.h);
    const auto gap = twist::detect_gap(ctx.h, pr, g.samples, g.half_window, g.go, ctx.opts);
    const auto plan = twist::build_schedule(ctx.h, pr, gap, bp, ctx.opts);
    twist::renormalized_action J(ctx.h, pr, ctx.opts);
    const auto rep = twist::multi_schedule_distinctness(J, plan.sched, seqs, ctx.opts, ctx.threads);
    json results = json::array();
    for (const auto& res : rep.results) results.push_back(twist::io::to_json(res));
    json r{{"pair", twist::io::to_json(pr)},
           {"plan", twist::io::to_json(plan)},
           {"sequences", seqs},
           {"clearance", rep.clearance},
           {"sup_difference", rep.sup_difference},
           {"all_distinct", rep.all_distinct},
           {"repeats_identical", rep.repeats_identical},
           {"results", results}};
    return outcome{r, [rep](std::ostream& os) {
                     twist::io::csv_writer w(os);
                     w.header({"sequence", "site", "value"});
                     for (std::size_t i = 0; i < rep.results.size(); ++i) {
                       const auto& x = rep.results[i].config;
                       for (long s = x.lo; s <= x.hi(); ++s) w.row(i, s, x[s]);
                     }
                   }};
  };
}

const std::map<std::string, command_fn>& commands() {
  static const std::map<std::string, command_fn> m = {
      {"check-h", cmd_check_h},       {"periodic", cmd_periodic}, {"map-iterate", cmd_map_iterate},
      {"heteroclinic", cmd_heteroclinic}, {"gap", cmd_gap},       {"phi", cmd_phi},
      {"transition", cmd_transition}, {"rational", cmd_rational}, {"distinctness", cmd_distinctness}};
  return m;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw twist::invalid_parameter("config " + path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open output file " + path);
  out << text;
  if (!out) throw std::ios_base::failure("write failed for " + path);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational computations for monotone twist maps"};
  std::string config_path, output_path, format, manifest_path;
  unsigned threads = 0;
  double tol = 0.0;
  long seed = 0;
  app.add_option("--config", config_path, "Experiment configuration (JSON)")->required();
  app.add_option("--output", output_path, "Result file (default: stdout)");
  app.add_option("--format", format, "Result format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", threads, "Worker threads for independent work")->check(CLI::Range(1u, 256u));
  app.add_option("--tol", tol, "Stationarity tolerance of the chain solver")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Recorded in the manifest; every computation is deterministic");
  app.add_option("--manifest", manifest_path, "Run manifest (default: <output>.manifest.json)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : validation;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  json config;
  int status = ok;
  std::string message;
  try {
    config = read_json_file(config_path);
    if (!config.is_object()) throw twist::invalid_parameter("config: expected an object");
    for (const auto& [k, v] : config.items())
      if (k != "model" && k != "command" && k != "params" && k != "output" && k != "threads" && k != "tol" &&
          k != "seed")
        throw twist::invalid_parameter("config: unknown key \"" + k + "\"");
    if (!config.contains("command") || !config["command"].is_string())
      throw twist::invalid_parameter("config: missing \"command\"");
    const auto name = config["command"].get<std::string>();
    const auto it = commands().find(name);
    if (it == commands().end()) throw twist::invalid_parameter("config: unknown command \"" + name + "\"");
    if (!config.contains("model")) throw twist::invalid_parameter("config: missing \"model\"");

    if (config.contains("output")) {
      const auto& o = config["output"];
      if (!o.is_object()) throw twist::invalid_parameter("config: \"output\" must be an object");
      if (output_path.empty() && o.contains("path")) output_path = o["path"].get<std::string>();
      if (format.empty() && o.contains("format")) format = o["format"].get<std::string>();
    }
    if (format.empty()) format = "json";
    if (format != "json" && format != "csv") throw twist::invalid_parameter("config: format must be json or csv");
    if (threads == 0) threads = config.contains("threads") ? config["threads"].get<unsigned>() : 1u;
    if (threads < 1) throw twist::invalid_parameter("config: threads must be positive");
    if (tol == 0.0 && config.contains("tol")) tol = config["tol"].get<double>();
    if (!app.count("--seed") && config.contains("seed")) seed = config["seed"].get<long>();

    context ctx{twist::io::parse_model(config["model"]), {}, threads};
    if (tol != 0.0) ctx.opts.tol_grad = tol;
    ctx.opts.threads = threads;
    twist::validate(ctx.opts);
    params p(config.contains("params") ? config["params"] : json::object());
    auto work = it->second(p, ctx);

    const outcome out = work();
    std::ostringstream text;
    if (format == "csv")
      out.csv(text);
    else
      text << out.result.dump(2) << '\n';
    if (output_path.empty())
      std::cout << text.str();
    else
      write_file(output_path, text.str());
    if (name == "check-h" && !out.result["all_passed"].get<bool>())
      throw hypothesis_failure("check-h: at least one hypothesis check failed");
  } catch (const hypothesis_failure& e) {
    status = hypothesis, message = e.what();
  } catch (const twist::invalid_parameter& e) {
    status = validation, message = e.what();
  } catch (const json::exception& e) {
    status = validation, message = std::string("config: ") + e.what();
  } catch (const twist::non_convergence& e) {
    status = no_convergence, message = e.what();
  } catch (const twist::precondition_error& e) {
    status = precondition, message = e.what();
  } catch (const twist::construction_error& e) {
    status = precondition, message = e.what();
  } catch (const twist::degenerate_foliation& e) {
    status = precondition, message = e.what();
  } catch (const std::exception& e) {
    status = runtime_failure, message = e.what();
  }
  if (status != ok) std::cerr << "twist: " << message << '\n';

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (manifest_path.empty() && !output_path.empty()) manifest_path = output_path + ".manifest.json";
  if (!manifest_path.empty()) {
    json m{{"tool", "twist"},
           {"version", version},
           {"libraries", {{"cli11", CLI11_VERSION},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
           {"compiler", __VERSION__},
           {"config_path", config_path},
           {"input", config},
           {"output", output_path},
           {"format", format},
           {"threads", threads},
           {"tol", tol},
           {"seed", seed},
           {"exit_status", status},
           {"message", message},
           {"started_utc", started},
           {"wall_time_s", wall}};
    try {
      write_file(manifest_path, m.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "twist: " << e.what() << '\n';
      if (status == ok) status = runtime_failure;
    }
  }
  return status;
}
