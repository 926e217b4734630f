#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "telegraph/analytic_law.hpp"
#include "telegraph/errors.hpp"
#include "telegraph/mean_velocity.hpp"
#include "telegraph/monte_carlo.hpp"
#include "telegraph/quadrature.hpp"
#include "telegraph/special_functions.hpp"
#include "telegraph/trial_schemes.hpp"

namespace telegraph {

/// One conformance check. provenance names where the target comes from
/// (closed-form, series, quadrature, enumeration, simulation).
struct Check {
  std::string name;
  double target = 0.0;
  double estimate = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string provenance;
  std::string rationale;
  std::string detail;
};

inline void to_json(nlohmann::json& j, const Check& c) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  j = nlohmann::json{{"name", c.name},
                     {"target", num(c.target)},
                     {"estimate", num(c.estimate)},
                     {"tolerance", num(c.tolerance)},
                     {"passed", c.passed},
                     {"provenance", c.provenance},
                     {"rationale", c.rationale}};
  if (!c.detail.empty()) j["detail"] = c.detail;
}

struct ValidationReport {
  std::vector<Check> checks;

  void add(Check c) { checks.push_back(std::move(c)); }
  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.passed; }));
  }
  std::size_t failed() const { return checks.size() - passed(); }
  bool ok() const { return failed() == 0; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["checks"] = checks;
    j["summary"] = {{"passed", passed()}, {"failed", failed()}};
    return j;
  }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
      os << (c.passed ? "PASS " : "FAIL ") << c.name << ": estimate " << c.estimate << " target " << c.target
         << " tol " << c.tolerance;
      if (!c.detail.empty()) os << " (" << c.detail << ")";
      os << '\n';
    }
    os << passed() << " passed, " << failed() << " failed\n";
    return os.str();
  }
};

namespace detail {

// Integral of the density over (a, b) inside the support; the interval is cut
// so that endpoint singularities of the Polya density stay at piece ends.
inline double integrate_density(const std::function<double(double)>& f, double a, double b) {
  const QuadratureOptions opt{1e-10, 1e-10, 20000};
  const int pieces = 8;
  double s = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + (b - a) * i / pieces, hi = i + 1 == pieces ? b : a + (b - a) * (i + 1) / pieces;
    s += integrate(f, lo, hi, opt).value;
  }
  return s;
}

}  // namespace detail

/// Atoms plus the integral of the density, unconditioned and given each initial velocity.
inline std::vector<Check> check_normalization(const ProcessLaw& law, double tol = 1e-6) {
  std::vector<Check> out;
  const double lo = law.lower(), hi = law.upper();
  auto run = [&](const std::string& name, double atoms, const std::function<double(double)>& f) {
    Check c{name, 1.0, NAN, tol, false, "quadrature",
            "atoms + adaptive Gauss-Kronrod integral; quadrature error is below 1e-9", ""};
    try {
      c.estimate = atoms + detail::integrate_density(f, lo, hi);
      c.passed = std::abs(c.estimate - 1.0) <= tol;
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  };
  run("normalization", law.atoms().plus + law.atoms().minus, [&](double x) { return law.density(x); });
  if (law.weight_c() > 0)
    run("normalization | c", law.atom_given(Direction::forward),
        [&](double x) { return law.density_given(Direction::forward, x); });
  if (law.weight_c() < 1)
    run("normalization | -v", law.atom_given(Direction::backward),
        [&](double x) { return law.density_given(Direction::backward, x); });
  return out;
}

/// Details of an empirical versus analytic comparison.
struct EmpiricalComparison {
  double z_plus = 0.0, z_minus = 0.0;  // atom frequency deviations in binomial sigmas
  std::size_t bins_outside = 0;         // bins beyond 3 sigma
  std::size_t n_bins = 0;
  double chi2 = 0.0;
  unsigned df = 0;
  double p_value = 1.0;
  bool atoms_ok = false, bins_ok = false, chi2_ok = false;
  bool passed() const { return atoms_ok && bins_ok && chi2_ok; }
};

inline constexpr double kSigmaBand = 3.0;
inline constexpr double kBinBudget = 0.05;
inline constexpr double kMinPValue = 1e-3;

inline EmpiricalComparison compare_empirical(const EmpiricalLaw& emp, const ProcessLaw& law) {
  detail::require(emp.edges.size() == emp.counts.size() + 1 && !emp.counts.empty(), "compare_empirical: empty histogram");
  const double n = static_cast<double>(emp.n_paths);
  EmpiricalComparison r;
  auto z = [&](double freq, double p) {
    const double se = std::sqrt(p * (1.0 - p) / n);
    if (se == 0.0) return freq == p ? 0.0 : INFINITY;
    return std::abs(freq - p) / se;
  };
  const Atoms atoms = law.atoms();
  r.z_plus = z(emp.atom_plus_freq(), atoms.plus);
  r.z_minus = z(emp.atom_minus_freq(), atoms.minus);
  r.atoms_ok = r.z_plus <= kSigmaBand && r.z_minus <= kSigmaBand;

  // expected cell probabilities: atoms, then each bin by quadrature
  std::vector<double> expected{atoms.minus};
  std::vector<double> observed{static_cast<double>(emp.atom_minus)};
  r.n_bins = emp.counts.size();
  auto f = [&](double x) { return law.density(x); };
  for (std::size_t i = 0; i < r.n_bins; ++i) {
    const double pb = integrate(f, emp.edges[i], emp.edges[i + 1], {1e-12, 1e-9, 4000}).value;
    if (z(emp.bin_freq(i), pb) > kSigmaBand) ++r.bins_outside;
    expected.push_back(pb);
    observed.push_back(static_cast<double>(emp.counts[i]));
  }
  expected.push_back(atoms.plus);
  observed.push_back(static_cast<double>(emp.atom_plus));
  r.bins_ok = r.bins_outside <= static_cast<std::size_t>(kBinBudget * r.n_bins);

  // chi-square after merging neighbours until each cell expects at least 5 paths
  std::vector<double> e_cells, o_cells;
  double e_acc = 0.0, o_acc = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    e_acc += expected[i] * n;
    o_acc += observed[i];
    if (e_acc >= 5.0) {
      e_cells.push_back(e_acc);
      o_cells.push_back(o_acc);
      e_acc = o_acc = 0.0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (e_cells.empty()) {
      e_cells.push_back(0.0);
      o_cells.push_back(0.0);
    }
    e_cells.back() += e_acc;
    o_cells.back() += o_acc;
  }
  for (std::size_t i = 0; i < e_cells.size(); ++i) {
    if (e_cells[i] > 0) {
      r.chi2 += (o_cells[i] - e_cells[i]) * (o_cells[i] - e_cells[i]) / e_cells[i];
    } else if (o_cells[i] > 0) {
      r.chi2 = INFINITY;
    }
  }
  r.df = e_cells.size() > 1 ? static_cast<unsigned>(e_cells.size() - 1) : 0;
  if (r.df == 0)
    r.p_value = 1.0;
  else
    r.p_value = std::isfinite(r.chi2) ? gamma_sf(0.5 * r.df, 0.5, r.chi2) : 0.0;
  r.chi2_ok = r.p_value >= kMinPValue;
  return r;
}

/// Atom z-tests, binned density bands and a chi-square summary in one check.
inline Check check_empirical_vs_analytic(const EmpiricalLaw& emp, const ProcessLaw& law,
                                         const std::string& name = "empirical vs analytic") {
  const auto r = compare_empirical(emp, law);
  std::ostringstream d;
  d << "atom z " << r.z_plus << "/" << r.z_minus << ", bins outside 3 sigma " << r.bins_outside << "/" << r.n_bins
    << ", chi2 " << r.chi2 << " df " << r.df << " p " << r.p_value;
  return Check{name,
               kMinPValue,
               r.p_value,
               kBinBudget,
               r.passed(),
               "closed-form",
               "3 sigma atom bands, at most 5% of bins beyond 3 sigma, chi-square p >= 0.001",
               d.str()};
}

/// Largest error of the count formulas against enumeration of all trial sequences.
struct EnumerationResult {
  double max_error = 0.0;
  double max_sum_error = 0.0;
  unsigned k_max = 0;
};

inline EnumerationResult enumerate_counts(const TrialScheme& scheme, unsigned k_max = 10) {
  detail::require(k_max >= 1 && k_max <= 24, "enumerate_counts: k_max must lie in 1..24");
  EnumerationResult res;
  res.k_max = k_max;
  for (Direction y : {Direction::forward, Direction::backward}) {
    if (scheme.initial_probability(y) == 0.0) continue;
    for (unsigned k = 1; k <= k_max; ++k) {
      // count[j] = P{N_{k-1} = j}, joint[z][j] = P{N_{k-1} = j, Z_k = z}, given Z_0 = y
      std::vector<double> count(k, 0.0), joint[2] = {std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
      const TrialState start = TrialState::start(scheme).advanced(y == Direction::forward ? 1 : 0);
      // depth-first over X_2, ..., X_{k+1}
      std::function<void(const TrialState&, unsigned, unsigned, double)> walk = [&](const TrialState& st, unsigned drawn,
                                                                                  unsigned succ, double prob) {
        if (prob == 0.0) return;
        const double p = next_success_prob(st);
        if (drawn == k - 1) {
          count[succ] += prob;
          joint[0][succ] += prob * p;
          joint[1][succ] += prob * (1.0 - p);
          return;
        }
        walk(st.advanced(1), drawn + 1, succ + 1, prob * p);
        walk(st.advanced(0), drawn + 1, succ, prob * (1.0 - p));
      };
      walk(start, 0, 0, 1.0);
      const auto cd = count_dist(scheme, k, y);
      double total = 0.0;
      for (unsigned j = 0; j < k; ++j) {
        res.max_error = std::max(res.max_error, std::abs(cd.pmf[j] - count[j]));
        const double jf = joint_count_velocity(scheme, k, j, y, Direction::forward);
        const double jb = joint_count_velocity(scheme, k, j, y, Direction::backward);
        res.max_error = std::max({res.max_error, std::abs(jf - joint[0][j]), std::abs(jb - joint[1][j])});
        // conditional law of Z_k given N_{k-1}
        if (count[j] > 1e-300)
          res.max_error = std::max({res.max_error, std::abs(jf / cd.pmf[j] - joint[0][j] / count[j]),
                                    std::abs(jb / cd.pmf[j] - joint[1][j] / count[j])});
        total += jf + jb;
      }
      res.max_sum_error = std::max(res.max_sum_error, std::abs(total - 1.0));
    }
  }
  return res;
}

inline Check check_enumeration(const TrialScheme& scheme, unsigned k_max = 10, double tol = 1e-12) {
  const auto r = enumerate_counts(scheme, k_max);
  const double err = std::max(r.max_error, r.max_sum_error);
  return Check{"enumeration k<=" + std::to_string(k_max),
               0.0,
               err,
               tol,
               err <= tol,
               "enumeration",
               "exhaustive sum over 2^k trial sequences; only rounding separates the two",
               ""};
}

/// MC versus analytic conditional mean velocity, 3 sigma band.
inline Check check_mean_velocity(double analytic, const MeanEstimate& mc, const std::string& name,
                                 const std::string& provenance) {
  const double tol = kSigmaBand * mc.std_err;
  return Check{name, analytic, mc.mean, tol, std::abs(mc.mean - analytic) <= tol, provenance,
               "3 binomial standard errors of the Monte Carlo mean", ""};
}

/// Conditional mean velocity by the closed form for the family, or the general series.
inline MeanVelocity mean_velocity(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m,
                                  double t, Direction initial) {
  const auto* lin = std::get_if<LinearRateExponential>(&model.variant());
  if (lin && !scheme.is_polya() && scheme.as_bernoulli().p < 1.0)
    return mean_velocity_damped(scheme.as_bernoulli().p, lin->lambda, lin->mu, m, t, initial);
  const auto* gam = std::get_if<GammaThenExponential>(&model.variant());
  if (gam && scheme.is_polya()) {
    const auto& u = scheme.as_polya();
    if (u.b == gam->b && u.r == gam->r && u.A == gam->A)
      return mean_velocity_polya(u.b, u.r, u.A, gam->lambda, gam->mu, m, t, initial);
  }
  return mean_velocity_general(scheme, model, m, t, initial);
}

/// Trial scheme with a deliberately wrong parameter, for negative controls.
inline TrialScheme mismatched(const TrialScheme& s) {
  if (!s.is_polya()) {
    const double p = s.as_bernoulli().p;
    return TrialScheme::bernoulli(p <= 0.5 ? p + 0.2 : p - 0.2);
  }
  const auto& u = s.as_polya();
  return TrialScheme::polya(3.0 * u.b + u.r, u.r, u.A);
}

struct SuiteOptions {
  std::uint64_t n_paths = 200000;
  unsigned bins = 50;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool negative_control = false;
};

/// Default suite for one configuration: enumeration, normalization, Monte Carlo
/// versus the law and conditional mean velocity versus Monte Carlo.
inline ValidationReport default_suite(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m,
                                      double t, const SuiteOptions& opt = {}) {
  ValidationReport rep;
  rep.add(check_enumeration(scheme));
  const ProcessLaw law = make_law(scheme, model, m, t);
  for (auto& c : check_normalization(law)) rep.add(std::move(c));
  const TrialScheme simulated = opt.negative_control ? mismatched(scheme) : scheme;
  const auto emp = estimate_law(simulated, model, m, t, opt.n_paths, opt.bins, opt.seed, opt.workers);
  rep.add(check_empirical_vs_analytic(emp, law, opt.negative_control ? "empirical vs analytic (negative control)"
                                                                     : "empirical vs analytic"));
  for (Direction y : {Direction::forward, Direction::backward}) {
    if (scheme.initial_probability(y) == 0.0) continue;
    const auto mv = mean_velocity(scheme, model, m, t, y);
    const auto mc = estimate_mean_velocity(simulated, model, m, t, opt.n_paths, y, opt.seed + 1, opt.workers);
    rep.add(check_mean_velocity(mv.value, mc, "mean velocity | " + std::string(to_string(y)), "series"));
  }
  return rep;
}

}  // namespace telegraph
