#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "telegraph/analytic_law.hpp"
#include "telegraph/mean_velocity.hpp"
#include "telegraph/monte_carlo.hpp"
#include "telegraph/validation.hpp"

namespace telegraph::cli {

/// Bad flags or parameter combinations; the front-end exits with status 2.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// "name:key=value,key=value" split into its parts.
struct Spec {
  std::string name;
  std::map<std::string, double> args;

  double get(const std::string& key) const {
    auto it = args.find(key);
    if (it == args.end()) throw usage_error("'" + name + "' needs " + key + "=");
    return it->second;
  }
};

inline double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double x;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw usage_error("bad number for " + what + ": '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(x)) throw usage_error("bad number for " + what + ": '" + s + "'");
  return x;
}

inline Spec parse_spec(const std::string& text, const std::vector<std::string>& allowed) {
  Spec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw usage_error("expected key=value in '" + text + "'");
    const std::string key = item.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw usage_error("unknown key '" + key + "' in '" + text + "'");
    if (!spec.args.emplace(key, parse_number(item.substr(eq + 1), key)).second)
      throw usage_error("repeated key '" + key + "' in '" + text + "'");
  }
  return spec;
}

/// bernoulli:p=.. or polya:b=..,r=..,A=..
inline TrialScheme parse_scheme(const std::string& text) {
  const Spec s = parse_spec(text, {"p", "b", "r", "A"});
  try {
    if (s.name == "bernoulli" && s.args.size() == 1) return TrialScheme::bernoulli(s.get("p"));
    if (s.name == "polya" && s.args.size() == 3) return TrialScheme::polya(s.get("b"), s.get("r"), s.get("A"));
  } catch (const domain_error& e) {
    throw usage_error(e.what());
  }
  throw usage_error("scheme must be bernoulli:p=.. or polya:b=..,r=..,A=..; got '" + text + "'");
}

/// linexp / gammaexp / exp with lambda= and mu=; gammaexp takes b, r, A from the Polya scheme.
inline IntertimeModel parse_intertimes(const std::string& text, const TrialScheme& scheme) {
  const Spec s = parse_spec(text, {"lambda", "mu"});
  try {
    if (s.name == "linexp") return IntertimeModel::linear_rate(s.get("lambda"), s.get("mu"));
    if (s.name == "exp") return IntertimeModel::homogeneous(s.get("lambda"), s.get("mu"));
    if (s.name == "gammaexp") {
      if (!scheme.is_polya()) throw usage_error("gammaexp intertimes need a polya scheme (the Gamma shapes are b/A+1, r/A+1)");
      const auto& u = scheme.as_polya();
      return IntertimeModel::gamma_then_exp(u.b, u.r, u.A, s.get("lambda"), s.get("mu"));
    }
  } catch (const domain_error& e) {
    throw usage_error(e.what());
  }
  throw usage_error("intertimes must be linexp:, gammaexp: or exp:lambda=..,mu=..; got '" + text + "'");
}

struct RunConfig {
  std::string command;
  std::vector<std::string> schemes{"bernoulli:p=0.5"};
  std::string intertimes = "linexp:lambda=1,mu=1";
  double c = 1.0, v = 1.0, t = 1.0;
  unsigned grid = 200;
  unsigned bins = 50;
  std::uint64_t paths = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string format = "csv";
  std::string out;
  std::string method = "auto";
  std::string initial = "c";
  std::vector<double> times;
  std::uint64_t mc_paths = 0;
  unsigned trace = 0;
  std::string trace_out;
  bool negative_control = false;

  MotionParams motion() const { return {c, v}; }

  void validate() const {
    if (schemes.empty()) throw usage_error("at least one --scheme is needed");
    for (const auto& s : schemes) parse_intertimes(intertimes, parse_scheme(s));
    if (!(c > 0 && v > 0)) throw usage_error("--c and --v must be positive");
    if (!(t > 0)) throw usage_error("--t must be positive");
    for (double x : times)
      if (!(x > 0)) throw usage_error("--times entries must be positive");
    if (grid < 1 || bins < 1) throw usage_error("--grid and --bins must be at least 1");
    if (paths < 2) throw usage_error("--paths must be at least 2");
    if (format != "csv" && format != "json") throw usage_error("--format must be csv or json");
    if (method != "auto" && method != "closed" && method != "series") throw usage_error("--method must be auto, closed or series");
    if (initial != "c" && initial != "-v") throw usage_error("--initial must be c or -v");
    if (schemes.size() > 1 && out.empty()) throw usage_error("several --scheme values need --out DIR");
    if (trace > 0 && format == "json" && trace_out.empty()) throw usage_error("--trace with --format json needs --trace-out");
  }

  /// Command line that reproduces this run.
  std::string echo(const std::string& scheme) const {
    std::ostringstream os;
    os << "telegraph " << command << " --scheme " << scheme << " --intertimes " << intertimes << " --c " << fmt(c)
       << " --v " << fmt(v);
    if (command == "meanvel") {
      os << " --initial " << initial << " --times ";
      const auto& ts = times.empty() ? std::vector<double>{t} : times;
      for (std::size_t i = 0; i < ts.size(); ++i) os << (i ? "," : "") << fmt(ts[i]);
      os << " --mc-paths " << mc_paths;
    } else {
      os << " --t " << fmt(t);
    }
    if (command == "law") os << " --grid " << grid << " --method " << method;
    if (command == "simulate" || command == "validate") os << " --paths " << paths << " --bins " << bins;
    if (command == "simulate" && trace > 0) os << " --trace " << trace;
    if (command == "validate" && negative_control) os << " --negative-control";
    if (command != "law") os << " --seed " << seed;
    os << " --format " << format;
    return os.str();
  }
};

inline Direction parse_initial(const std::string& s) { return s == "-v" ? Direction::backward : Direction::forward; }

/// File name for one member of a sweep: ':' and ',' become '_'.
inline std::string sweep_file(const std::string& command, const std::string& scheme, const std::string& ext) {
  std::string s = scheme;
  for (char& ch : s)
    if (ch == ':' || ch == ',') ch = '_';
  return command + "_" + s + "." + ext;
}

inline ProcessLaw select_law(const RunConfig& cfg, const TrialScheme& scheme, const IntertimeModel& model) {
  const MotionParams m = cfg.motion();
  if (cfg.method == "series") return law_general(scheme, model, m, cfg.t);
  const bool closed = (!scheme.is_polya() && std::holds_alternative<LinearRateExponential>(model.variant()) &&
                       scheme.as_bernoulli().p < 1.0) ||
                      (scheme.is_polya() && std::holds_alternative<GammaThenExponential>(model.variant()));
  if (cfg.method == "closed" && !closed)
    throw usage_error("--method closed needs bernoulli (p < 1) with linexp, or polya with gammaexp");
  return make_law(scheme, model, m, cfg.t);
}

/// Conditional atom mass, NaN when the initial velocity has probability 0.
inline double atom_given_or_nan(const ProcessLaw& law, Direction y) {
  const double w = y == Direction::forward ? law.weight_c() : 1.0 - law.weight_c();
  return w > 0 ? law.atom_given(y) : NAN;
}

/// Density table and atom rows of S_t at grid midpoints.
inline void cmd_law_one(const RunConfig& cfg, const std::string& scheme_text, std::ostream& os) {
  const TrialScheme scheme = parse_scheme(scheme_text);
  const IntertimeModel model = parse_intertimes(cfg.intertimes, scheme);
  const ProcessLaw law = select_law(cfg, scheme, model);
  const double lo = law.lower(), hi = law.upper(), h = (hi - lo) / cfg.grid;
  struct Row {
    std::string kind;
    double x, p, pc, pv;
  };
  std::vector<Row> rows;
  rows.push_back({"atom", lo, law.atoms().minus, 0.0, atom_given_or_nan(law, Direction::backward)});
  for (unsigned i = 0; i < cfg.grid; ++i) {
    const double x = lo + (i + 0.5) * h;
    const DensityParts parts = law.parts(x);
    const double p = law.density(x);
    rows.push_back({"density", x, p, law.weight_c() > 0 ? parts.given_c() : NAN,
                    law.weight_c() < 1 ? parts.given_minus_v() : NAN});
  }
  rows.push_back({"atom", hi, law.atoms().plus, atom_given_or_nan(law, Direction::forward), 0.0});

  if (cfg.format == "json") {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["config"] = cfg.echo(scheme_text);
    j["t"] = cfg.t;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"kind", r.kind}, {"x", r.x}, {"p", num(r.p)}, {"p_given_c", num(r.pc)},
                           {"p_given_minus_v", num(r.pv)}});
    os << j.dump(2) << '\n';
    return;
  }
  os << "# " << cfg.echo(scheme_text) << '\n' << "kind,x,p,p_given_c,p_given_minus_v\n";
  for (const auto& r : rows)
    os << r.kind << ',' << fmt(r.x) << ',' << fmt(r.p) << ',' << fmt(r.pc) << ',' << fmt(r.pv) << '\n';
}

/// Histogram dump (and optional path traces) from a Monte Carlo run.
inline void cmd_simulate_one(const RunConfig& cfg, const std::string& scheme_text, std::ostream& os,
                             std::ostream* trace_os) {
  const TrialScheme scheme = parse_scheme(scheme_text);
  const IntertimeModel model = parse_intertimes(cfg.intertimes, scheme);
  const MotionParams m = cfg.motion();
  const auto emp = estimate_law(scheme, model, m, cfg.t, cfg.paths, cfg.bins, cfg.seed, cfg.workers);
  const double lo = -m.v * cfg.t, hi = m.c * cfg.t;
  if (cfg.format == "json") {
    nlohmann::json j;
    j["config"] = cfg.echo(scheme_text);
    j["n_paths"] = emp.n_paths;
    j["atom_minus"] = {{"x", lo}, {"count", emp.atom_minus}, {"freq", emp.atom_minus_freq()}};
    j["atom_plus"] = {{"x", hi}, {"count", emp.atom_plus}, {"freq", emp.atom_plus_freq()}};
    j["bins"] = nlohmann::json::array();
    for (std::size_t i = 0; i < emp.counts.size(); ++i)
      j["bins"].push_back({{"lo", emp.edges[i]}, {"hi", emp.edges[i + 1]}, {"count", emp.counts[i]},
                           {"freq", emp.bin_freq(i)}, {"density", emp.density(i)}, {"std_err", emp.std_err(i)}});
    os << j.dump(2) << '\n';
  } else {
    os << "# " << cfg.echo(scheme_text) << '\n' << "kind,x_lo,x_hi,count,freq,density,std_err\n";
    os << "atom," << fmt(lo) << ',' << fmt(lo) << ',' << emp.atom_minus << ',' << fmt(emp.atom_minus_freq()) << ",,\n";
    for (std::size_t i = 0; i < emp.counts.size(); ++i)
      os << "bin," << fmt(emp.edges[i]) << ',' << fmt(emp.edges[i + 1]) << ',' << emp.counts[i] << ','
         << fmt(emp.bin_freq(i)) << ',' << fmt(emp.density(i)) << ',' << fmt(emp.std_err(i)) << '\n';
    os << "atom," << fmt(hi) << ',' << fmt(hi) << ',' << emp.atom_plus << ',' << fmt(emp.atom_plus_freq()) << ",,\n";
  }
  if (cfg.trace == 0) return;
  std::ostream& ts = trace_os ? *trace_os : os;
  if (!trace_os) ts << "# trace\n";
  ts << "path,event,k,time,velocity,position\n";
  for (unsigned i = 0; i < cfg.trace; ++i) {
    // the same streams as the first paths of the histogram
    auto rng = RandomStream(cfg.seed, i);
    const auto path = simulate_path(scheme, model, m, cfg.t, rng);
    for (std::size_t k = 0; k < path.epochs.size(); ++k)
      ts << i << ",epoch," << k << ',' << fmt(path.epochs[k]) << ',' << fmt(m.velocity(path.velocities[k])) << ','
         << fmt(path.positions[k]) << '\n';
    ts << i << ",end," << path.switches << ',' << fmt(cfg.t) << ',' << fmt(m.velocity(path.final_velocity)) << ','
       << fmt(path.final_position) << '\n';
  }
}

/// Default validation suite; returns false if any check failed.
inline bool cmd_validate_one(const RunConfig& cfg, const std::string& scheme_text, std::ostream& os) {
  const TrialScheme scheme = parse_scheme(scheme_text);
  const IntertimeModel model = parse_intertimes(cfg.intertimes, scheme);
  SuiteOptions opt;
  opt.n_paths = cfg.paths;
  opt.bins = cfg.bins;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.negative_control = cfg.negative_control;
  const auto rep = default_suite(scheme, model, cfg.motion(), cfg.t, opt);
  if (cfg.format == "json") {
    auto j = rep.to_json();
    j["config"] = cfg.echo(scheme_text);
    os << j.dump(2) << '\n';
  } else {
    os << "# " << cfg.echo(scheme_text) << '\n' << rep.summary();
  }
  return rep.ok();
}

/// E[V_t | V_0 = initial] over --times, with an optional Monte Carlo column.
inline void cmd_meanvel_one(const RunConfig& cfg, const std::string& scheme_text, std::ostream& os) {
  const TrialScheme scheme = parse_scheme(scheme_text);
  const IntertimeModel model = parse_intertimes(cfg.intertimes, scheme);
  const MotionParams m = cfg.motion();
  const Direction y = parse_initial(cfg.initial);
  const auto ts = cfg.times.empty() ? std::vector<double>{cfg.t} : cfg.times;
  nlohmann::json rows = nlohmann::json::array();
  if (cfg.format == "csv") os << "# " << cfg.echo(scheme_text) << '\n' << "t,initial,mean_velocity,shells,mc_mean,mc_std_err\n";
  for (double t : ts) {
    const auto mv = mean_velocity(scheme, model, m, t, y);
    double mc_mean = NAN, mc_se = NAN;
    if (cfg.mc_paths >= 2) {
      const auto mc = estimate_mean_velocity(scheme, model, m, t, cfg.mc_paths, y, cfg.seed, cfg.workers);
      mc_mean = mc.mean;
      mc_se = mc.std_err;
    }
    if (cfg.format == "csv") {
      os << fmt(t) << ',' << cfg.initial << ',' << fmt(mv.value) << ',' << mv.shells << ',';
      if (cfg.mc_paths >= 2) os << fmt(mc_mean) << ',' << fmt(mc_se);
      else os << ',';
      os << '\n';
    } else {
      nlohmann::json r{{"t", t}, {"initial", cfg.initial}, {"mean_velocity", mv.value}, {"shells", mv.shells}};
      if (cfg.mc_paths >= 2) {
        r["mc_mean"] = mc_mean;
        r["mc_std_err"] = mc_se;
      }
      rows.push_back(r);
    }
  }
  if (cfg.format == "json") os << nlohmann::json{{"config", cfg.echo(scheme_text)}, {"rows", rows}}.dump(2) << '\n';
}

/// Runs cfg.command for every scheme. Output goes to `os`, or to one file per
/// scheme under cfg.out when several schemes are given. Returns the exit status.
inline int run(const RunConfig& cfg, std::ostream& os) {
  cfg.validate();
  const bool sweep = cfg.schemes.size() > 1;
  if (sweep) std::filesystem::create_directories(cfg.out);
  std::ofstream trace_file;
  if (!cfg.trace_out.empty()) {
    trace_file.open(cfg.trace_out);
    if (!trace_file) throw usage_error("cannot open " + cfg.trace_out);
  }
  bool ok = true;
  for (const auto& scheme : cfg.schemes) {
    std::ofstream file;
    std::ostream* target = &os;
    if (!cfg.out.empty()) {
      const std::string path =
          sweep ? (std::filesystem::path(cfg.out) / sweep_file(cfg.command, scheme, cfg.format)).string() : cfg.out;
      file.open(path);
      if (!file) throw usage_error("cannot open " + path);
      target = &file;
    }
    if (cfg.command == "law") {
      cmd_law_one(cfg, scheme, *target);
    } else if (cfg.command == "simulate") {
      cmd_simulate_one(cfg, scheme, *target, trace_file.is_open() ? &trace_file : nullptr);
    } else if (cfg.command == "validate") {
      const bool passed = cmd_validate_one(cfg, scheme, *target);
      if (target != &os) os << (passed ? "PASS " : "FAIL ") << scheme << '\n';
      ok = ok && passed;
    } else if (cfg.command == "meanvel") {
      cmd_meanvel_one(cfg, scheme, *target);
    } else {
      throw usage_error("unknown command '" + cfg.command + "'");
    }
  }
  return ok ? 0 : 1;
}

}  // namespace telegraph::cli
