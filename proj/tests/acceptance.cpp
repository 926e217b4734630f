// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "telegraph/telegraph.hpp"

using namespace telegraph;

namespace {

// Tolerances and budgets, one block per criterion.
constexpr double kEnumTol = 1e-12;
constexpr double kEnumSeconds = 10;

constexpr double kKummerTol = 1e-10;
constexpr double kKernelTol = 1e-8;
constexpr double kOneTwoTol = 1e-12;  // relative to max(1, |value|)

constexpr double kNormTol = 1e-6;
constexpr double kNormSeconds = 60;

constexpr double kSeriesTol = 1e-6;
constexpr double kSeriesSeconds = 300;

constexpr double kStationarySup = 1e-4;
constexpr double kVarianceTol = 1e-6;

constexpr std::uint64_t kPaths = 1000000;
constexpr unsigned kBins = 50;
constexpr double kMonteCarloSeconds = 120;

constexpr double kMeanVelTol = 1e-6;

constexpr double kEdge = 1e-9;
constexpr double kEdgeRelTol = 1e-6;

const MotionParams kUnit{1, 1};

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

bool report(int id, const std::string& title, const std::function<Outcome()>& body, double budget = 0) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget > 0) o.require(secs < budget, "runtime " + num(secs) + " s over " + num(budget) + " s");
  std::printf("Criterion %d: %s  %s  [%.1f s] %s\n", id, o.passed ? "PASS" : "FAIL", title.c_str(), secs,
              o.detail.c_str());
  std::fflush(stdout);
  return o.passed;
}

Outcome criterion1() {
  Outcome o;
  double worst = 0;
  for (const auto& s : {TrialScheme::bernoulli(0.37), TrialScheme::bernoulli(0.5), TrialScheme::polya(2, 3, 1.5),
                        TrialScheme::polya(1, 1, 1), TrialScheme::polya(0.4, 2.5, 0.6)}) {
    const auto r = enumerate_counts(s, 10);
    worst = std::max({worst, r.max_error, r.max_sum_error});
  }
  o.require(worst <= kEnumTol, "max error " + num(worst));
  o.detail = "max |formula - enumeration| = " + num(worst) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion2() {
  Outcome o;
  double kummer = 0;
  for (double a : {0.5, 1.0, 2.0, 3.5})
    for (double b : {0.5, 1.0, 2.0, 3.5})
      for (double z = -20; z <= 20; z += 0.25) {
        const double f = kummer_1f1(a, b, z);
        kummer = std::max(kummer, std::abs(f - std::exp(z) * kummer_1f1(b - a, b, -z)) / std::max(1.0, std::abs(f)));
      }
  o.require(kummer <= kKummerTol, "Kummer residual " + num(kummer));

  double g_err = 0;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double alpha : {0.5, 1.0, 2.5})
    for (double beta : {0.5, 1.0, 2.5})
      for (double mu : {0.5, 1.0, 3.0})
        for (double lambda : {0.5, 1.0, 3.0})
          for (double t : {0.1, 1.0, 5.0}) {
            auto f = [&](double y) { return gamma_cdf(alpha, mu, t - y) * gamma_pdf(beta, lambda, y); };
            const double ref = ts.integrate(f, 0.0, t);
            g_err = std::max(g_err, std::abs(conv_gamma_cdf_G(alpha, mu, beta, lambda, t) - ref));
          }
  o.require(g_err <= kKernelTol, "G error " + num(g_err));

  double h_err = 0;
  for (double alpha : {-2.0, 0.0, 1.0, 3.0})
    for (double beta : {-2.0, 0.0, 1.0, 3.0})
      for (double t : {0.1, 1.0, 5.0}) {
        auto f = [&](double y) {
          const double u = t - y;
          return u * hyp1f1_one_two(alpha * u) * std::exp(-alpha * u - beta * y);
        };
        const double ref = integrate(f, 0.0, t, {1e-14, 1e-13, 4000}).value;
        h_err = std::max(h_err, std::abs(kernel_H(alpha, beta, t) - ref) / std::max(1.0, std::abs(ref)));
      }
  o.require(h_err <= kKernelTol, "H error " + num(h_err));

  double one_two = 0;
  for (double z = -30; z <= 30; z += 1.0 / 64) {
    const double ref = z == 0 ? 1.0 : std::expm1(z) / z;
    one_two = std::max(one_two, std::abs(kummer_1f1(1, 2, z) - ref) / std::max(1.0, std::abs(ref)));
  }
  o.require(one_two <= kOneTwoTol, "1F1(1;2;z) error " + num(one_two));
  o.detail = "Kummer " + num(kummer) + ", G " + num(g_err) + ", H " + num(h_err) + ", 1F1(1;2) " + num(one_two) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion3() {
  Outcome o;
  int damped = 0, polya = 0;
  double worst = 0;
  auto run = [&](const ProcessLaw& law, const std::string& label) {
    for (const auto& c : check_normalization(law, kNormTol)) {
      worst = std::max(worst, std::abs(c.estimate - 1.0));
      o.require(c.passed, label + " " + c.name + " " + num(c.estimate) + " " + c.detail);
    }
  };
  // t = 1 and t = 10 with mu in {1, 2} and p in {0.1, ..., 0.9}; then mu up to 4
  for (double t : {1.0, 10.0})
    for (double mu : {1.0, 2.0})
      for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        run(law_damped(p, 1, mu, kUnit, t), "damped");
        ++damped;
      }
  for (double p : {0.1, 0.2, 0.4, 0.5})
    for (double mu : {3.0, 4.0}) {
      run(law_damped(p, 1, mu, kUnit, p == 0.2 || p == 0.4 ? 1.0 : 10.0), "damped");
      ++damped;
    }
  // A = 2 sweeps at t = 1 and t = 10, then r = 1 with A in {0.4, 0.6, 0.8, 1}
  for (double t : {1.0, 10.0})
    for (double b : {1.0, 2.0})
      for (double r : {1.0, 2.0, 3.0, 4.0}) {
        run(law_polya(b, r, 2, 1, 1, kUnit, t), "polya");
        ++polya;
      }
  for (double b : {1.0, 2.0})
    for (double A : {0.4, 0.6, 0.8, 1.0}) {
      run(law_polya(b, 1, A, 1, 1, kUnit, 1), "polya");
      ++polya;
    }
  o.require(damped >= 12 && polya >= 8, "too few parameter sets");
  o.detail = std::to_string(damped) + " damped + " + std::to_string(polya) + " Polya sets, max |mass - 1| = " +
             num(worst) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion4() {
  Outcome o;
  double worst = 0;
  auto compare = [&](const TrialScheme& s, const IntertimeModel& m, const ProcessLaw& law, const std::string& label) {
    for (int i = 1; i <= 21; ++i) {
      const double x = -1 + 2.0 * i / 22;
      const auto series = density_general_series(s, m, kUnit, x, 1, 200);
      const auto closed = law.parts(x);
      const double w = law.weight_c();
      const double errs[3] = {std::abs(series.parts.mixed(w) - law.density(x)),
                              std::abs(series.parts.given_c() - closed.given_c()),
                              std::abs(series.parts.given_minus_v() - closed.given_minus_v())};
      for (double e : errs) worst = std::max(worst, e);
      o.require(series.converged, label + " series did not converge at x=" + num(x));
      o.require(std::max({errs[0], errs[1], errs[2]}) <= kSeriesTol, label + " x=" + num(x));
    }
  };
  for (auto [p, mu] : {std::pair{0.3, 1.0}, std::pair{0.1, 2.0}, std::pair{0.7, 1.5}})
    compare(TrialScheme::bernoulli(p), IntertimeModel::linear_rate(1, mu), law_damped(p, 1, mu, kUnit, 1),
            "damped p=" + num(p));
  for (auto [b, r, A] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{1.0, 3.0, 2.0}, std::tuple{2.0, 1.0, 0.6}})
    compare(TrialScheme::polya(b, r, A), IntertimeModel::gamma_then_exp(b, r, A, 1, 1), law_polya(b, r, A, 1, 1, kUnit, 1),
            "polya b=" + num(b) + " r=" + num(r) + " A=" + num(A));
  o.detail = "3 damped + 3 Polya sets on 21 points, max error " + num(worst) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion5() {
  Outcome o;
  double worst = 0;
  for (double p : {0.3, 0.5, 0.7}) {
    double sup = 0;
    // the logistic closed form and the mixture of conditional pieces are separate formulas
    for (int i = 1; i < 8000; ++i) {
      const double x = -40 + 0.01 * i;
      const double target = stationary_damped(p, 1, 1, kUnit, x);
      sup = std::max({sup, std::abs(density_damped(p, 1, 1, kUnit, x, 40) - target),
                      std::abs(density_damped_parts(p, 1, 1, kUnit, x, 40).mixed(p) - target)});
    }
    worst = std::max(worst, sup);
    o.require(sup <= kStationarySup, "p=" + num(p) + " sup " + num(sup));
  }
  // logistic scale s = v/mu = 1
  const double s = 1.0;
  auto f = [](double x) { return stationary_damped(0.5, 1, 1, kUnit, x); };
  double var = 0, mean = 0;
  for (int i = -80; i < 80; ++i) {
    var += integrate([&](double x) { return x * x * f(x); }, i, i + 1.0, {1e-14, 1e-13, 4000}).value;
    mean += integrate([&](double x) { return x * f(x); }, i, i + 1.0, {1e-14, 1e-13, 4000}).value;
  }
  const double target = M_PI * M_PI * s * s / 3;
  o.require(std::abs(var - target) <= kVarianceTol, "variance " + num(var));
  // the location s log(p/(1-p)) is exactly 0 at p = 1/2, so the density is exactly symmetric
  bool symmetric = std::log(0.5 / (1 - 0.5)) == 0.0;
  for (double x = 0.05; x < 10; x += 0.05) symmetric = symmetric && f(x) == f(-x);
  o.require(symmetric, "p = 1/2 location not exactly 0");
  o.detail = "sup " + num(worst) + ", variance error " + num(std::abs(var - target)) + ", mean " + num(mean) +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::string summary;
  auto run = [&](const TrialScheme& simulated, const IntertimeModel& m, const ProcessLaw& law, double t,
                 std::uint64_t seed, bool expect_pass, const std::string& label) {
    const auto emp = estimate_law(simulated, m, kUnit, t, kPaths, kBins, seed);
    const auto r = compare_empirical(emp, law);
    o.require(r.passed() == expect_pass, label + (expect_pass ? " failed" : " negative control passed"));
    summary += label + ": z " + num(r.z_plus) + "/" + num(r.z_minus) + ", bins out " + std::to_string(r.bins_outside) +
               ", p " + num(r.p_value) + (r.passed() ? " pass" : " fail") + "; ";
  };
  const auto lin = IntertimeModel::linear_rate(1, 1);
  run(TrialScheme::bernoulli(0.3), lin, law_damped(0.3, 1, 1, kUnit, 1), 1, 20261016, true, "damped");
  const auto gam = IntertimeModel::gamma_then_exp(1, 2, 2, 1, 1);
  run(TrialScheme::polya(1, 2, 2), gam, law_polya(1, 2, 2, 1, 1, kUnit, 1), 1, 20261017, true, "polya");
  run(TrialScheme::bernoulli(0.5), lin, law_damped(0.3, 1, 1, kUnit, 1), 1, 20261018, false, "p 0.5 vs 0.3");
  o.detail = summary + o.detail;
  return o;
}

Outcome criterion7() {
  Outcome o;
  double formula_gap = 0, worst_z = 0;
  std::uint64_t seed = 7000;
  auto mc_check = [&](double analytic, const MeanEstimate& mc, const std::string& label) {
    const double z = std::abs(mc.mean - analytic) / mc.std_err;
    worst_z = std::max(worst_z, z);
    o.require(z <= 3.0, label + " z=" + num(z));
  };
  struct Point {
    double p, lambda, mu, t;
  };
  std::vector<Point> lattice{{0.4, 1, 1, 0.5}, {0.4, 1, 1, 1}, {0.4, 1, 1, 2}};
  for (double p : {0.3, 0.6})
    for (auto [l, m] : {std::pair{1.0, 1.0}, std::pair{1.0, 1.5}, std::pair{1.5, 1.0}})
      for (double t : {0.5, 1.0}) lattice.push_back({p, l, m, t});
  for (const auto& pt : lattice) {
    const auto scheme = TrialScheme::bernoulli(pt.p);
    const auto model = IntertimeModel::linear_rate(pt.lambda, pt.mu);
    const double closed = mean_velocity_damped(pt.p, pt.lambda, pt.mu, kUnit, pt.t).value;
    const double general = mean_velocity_general(scheme, model, kUnit, pt.t).value;
    formula_gap = std::max(formula_gap, std::abs(closed - general));
    o.require(std::abs(closed - general) <= kMeanVelTol, "closed vs general at t=" + num(pt.t));
    const auto mc = estimate_mean_velocity(scheme, model, kUnit, pt.t, kPaths, Direction::forward, ++seed);
    mc_check(closed, mc, "damped p=" + num(pt.p) + " t=" + num(pt.t));
  }
  for (auto [b, r, A] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{1.0, 2.0, 2.0}}) {
    const auto model = IntertimeModel::gamma_then_exp(b, r, A, 1, 1);
    for (Direction y : {Direction::forward, Direction::backward}) {
      const double a = mean_velocity_polya(b, r, A, 1, 1, kUnit, 1, y).value;
      const auto mc = estimate_mean_velocity(TrialScheme::polya(b, r, A), model, kUnit, 1, kPaths, y, ++seed);
      mc_check(a, mc, "polya b=" + num(b) + " r=" + num(r));
    }
  }
  // i.i.d. periods: E[S_t] = t E[Z_0]
  const auto iid = IntertimeModel::homogeneous(1.3, 1.3);
  const MotionParams m{2, 1};
  for (const auto& s : {TrialScheme::bernoulli(0.3), TrialScheme::polya(1, 2, 1)}) {
    const double a = mean_position_iid_check(s, iid, m, 3).analytic;
    const auto mc = estimate_mean_position(s, iid, m, 3, kPaths, ++seed);
    mc_check(a, mc, "E[S_t] iid");
  }
  o.detail = std::to_string(lattice.size()) + " lattice points, closed vs general max gap " + num(formula_gap) +
             ", worst MC z " + num(worst_z) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome criterion8() {
  Outcome o;
  double worst = 0;
  auto check = [&](double value, double limit, const std::string& label) {
    const double rel = std::abs(value - limit) / limit;
    worst = std::max(worst, rel);
    o.require(rel <= kEdgeRelTol, label + " rel " + num(rel));
  };
  for (double p : {0.1, 0.3, 0.5, 0.9})
    for (double mu : {1.0, 2.0})
      for (double t : {1.0, 10.0}) {
        const auto [lo, hi] = endpoint_limits_damped(p, 1, mu, kUnit, t);
        const double xl = -(1 - kEdge) * t, xh = (1 - kEdge) * t;
        check(density_damped(p, 1, mu, kUnit, xl, t), lo, "damped lower");
        check(density_damped(p, 1, mu, kUnit, xh, t), hi, "damped upper");
        check(density_damped_parts(p, 1, mu, kUnit, xl, t).mixed(p), lo, "damped lower (parts)");
        check(density_damped_parts(p, 1, mu, kUnit, xh, t).mixed(p), hi, "damped upper (parts)");
      }
  // b/A and r/A at least 1, where the density reaches the limit linearly in the distance
  for (auto [b, r, A] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{2.0, 3.0, 1.0}, std::tuple{1.0, 1.0, 0.4},
                         std::tuple{2.0, 4.0, 2.0}})
    for (double t : {1.0, 10.0}) {
      const auto [lo, hi] = endpoint_limits_polya(b, r, A, 1, 1, kUnit, t);
      check(density_polya(b, r, A, 1, 1, kUnit, -(1 - kEdge) * t, t), lo, "polya lower");
      check(density_polya(b, r, A, 1, 1, kUnit, (1 - kEdge) * t, t), hi, "polya upper");
    }
  o.detail = "max relative gap " + num(worst) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  bool ok = true;
  ok &= report(1, "count laws equal enumeration (k <= 10)", criterion1, kEnumSeconds);
  ok &= report(2, "special-function identities", criterion2);
  ok &= report(3, "normalization of damped and Polya laws", criterion3, kNormSeconds);
  ok &= report(4, "series density equals closed forms", criterion4, kSeriesSeconds);
  ok &= report(5, "logistic stationary law", criterion5);
  ok &= report(6, "Monte Carlo conformance", criterion6, kMonteCarloSeconds);
  ok &= report(7, "mean velocity", criterion7);
  ok &= report(8, "endpoint limits", criterion8);
  return ok ? 0 : 1;
}
