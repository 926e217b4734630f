#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "telegraph/errors.hpp"
#include "telegraph/intertimes.hpp"
#include "telegraph/motion.hpp"
#include "telegraph/quadrature.hpp"
#include "telegraph/special_functions.hpp"
#include "telegraph/trial_schemes.hpp"

namespace telegraph {

/// Point masses of S_t at ct (plus) and -vt (minus).
struct Atoms {
  double plus = 0.0;
  double minus = 0.0;
};

/// Densities split by initial velocity (c or -v) and by the velocity at time t
/// (f: forward, b: backward).
struct DensityParts {
  double f_c = 0.0, b_c = 0.0;
  double f_v = 0.0, b_v = 0.0;

  double given_c() const { return f_c + b_c; }
  double given_minus_v() const { return f_v + b_v; }
  double given(Direction y) const { return y == Direction::forward ? given_c() : given_minus_v(); }
  double mixed(double weight_c) const { return weight_c * given_c() + (1.0 - weight_c) * given_minus_v(); }
};

/// Law of S_t at a fixed t: atoms plus a density on the open support.
class ProcessLaw {
 public:
  using PartsFn = std::function<DensityParts(double)>;
  using DensityFn = std::function<double(double)>;

  ProcessLaw(double t, MotionParams motion, double weight_c, Atoms atoms, PartsFn parts,
             DensityFn total = {})
      : t_(t), motion_(motion), weight_c_(weight_c), atoms_(atoms), parts_(std::move(parts)),
        total_(std::move(total)) {}

  double t() const { return t_; }
  const MotionParams& motion() const { return motion_; }
  double weight_c() const { return weight_c_; }
  const Atoms& atoms() const { return atoms_; }
  double lower() const { return -motion_.v * t_; }
  double upper() const { return motion_.c * t_; }

  /// P{S_t = y t | V_0 = y}.
  double atom_given(Direction y) const {
    return y == Direction::forward ? atoms_.plus / weight_c_ : atoms_.minus / (1.0 - weight_c_);
  }

  DensityParts parts(double x) const {
    check_support(x);
    return parts_(x);
  }
  double density(double x) const {
    check_support(x);
    return total_ ? total_(x) : parts_(x).mixed(weight_c_);
  }
  double density_given(Direction y, double x) const { return parts(x).given(y); }

 private:
  void check_support(double x) const {
    if (!(x > lower() && x < upper()))
      throw domain_error("density: x outside the open support (-vt, ct); query atoms separately");
  }

  double t_;
  MotionParams motion_;
  double weight_c_;
  Atoms atoms_;
  PartsFn parts_;
  DensityFn total_;
};

namespace detail {

inline double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// e^u / (1 + e^u)^2 without overflow.
inline double logistic_kernel(double u) {
  const double e = std::exp(-std::abs(u));
  return e / ((1.0 + e) * (1.0 + e));
}

inline void check_time(double t, bool strict) {
  require(strict ? t > 0 : t >= 0, strict ? "t must be positive" : "t must be nonnegative");
}

inline void check_open_support(const MotionParams& m, double x, double t) {
  if (!(x > -m.v * t && x < m.c * t)) throw domain_error("x outside the open support (-vt, ct)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Damped Bernoulli case: U_k ~ Exp(lambda k), D_k ~ Exp(mu k).

inline Atoms atoms_damped(double p, double lambda, double mu, double t) {
  detail::require(p > 0 && p <= 1, "atoms_damped: p must lie in (0, 1]");
  detail::require(lambda > 0 && mu > 0, "atoms_damped: rates must be positive");
  detail::check_time(t, false);
  const double el = std::exp(-lambda * t);
  const double em = std::exp(-mu * t);
  const double q = 1.0 - p;
  return {p * el / (q + p * el), q * em / (p + q * em)};
}

namespace detail {

struct ForwardBackward {
  double f;
  double b;
};

// f(x,t|c) and b(x,t|c) at tau in log-sum-exp form.
inline ForwardBackward damped_given_c(double p, double lambda, double mu, double cv, double tau, double t) {
  const double lp = std::log(p), lq = std::log1p(-p);
  const double L = log_add_exp(lp + mu * t, lq + (lambda + mu) * tau);
  const double f = std::exp(lp + lq + std::log(mu) + mu * (t + tau) + std::log(std::expm1(lambda * tau)) - 2 * L);
  const double b = std::exp(lq + std::log(lambda) + (lambda + mu) * tau + log_add_exp(lp + mu * t, lq + mu * tau) - 2 * L);
  return {f / cv, b / cv};
}

inline void check_damped(double p, double lambda, double mu, const MotionParams& m) {
  require(p > 0 && p < 1, "damped density: p must lie in (0, 1)");
  require(lambda > 0 && mu > 0, "damped density: rates must be positive");
  m.validate();
}

}  // namespace detail

/// Conditional pieces of the damped density at x.
inline DensityParts density_damped_parts(double p, double lambda, double mu, const MotionParams& m, double x,
                                         double t) {
  detail::check_damped(p, lambda, mu, m);
  detail::check_time(t, true);
  detail::check_open_support(m, x, t);
  const double cv = m.c + m.v;
  const double tau = tau_star(m, x, t);
  const auto c = detail::damped_given_c(p, lambda, mu, cv, tau, t);
  // backward start is the forward start with directions exchanged
  const auto v = detail::damped_given_c(1.0 - p, mu, lambda, cv, t - tau, t);
  return {c.f, c.b, v.b, v.f};
}

/// p(x,t) in the damped case (logistic-type closed form).
inline double density_damped(double p, double lambda, double mu, const MotionParams& m, double x, double t) {
  detail::check_damped(p, lambda, mu, m);
  detail::check_time(t, true);
  detail::check_open_support(m, x, t);
  const double s = (m.c + m.v) / (lambda + mu);
  const double u = std::log(p / (1.0 - p)) + (mu - m.v / s) * t - x / s;
  return detail::logistic_kernel(u) / s;
}

/// Limits of p(x,t) as x -> -vt (first) and x -> ct (second), damped case.
inline std::pair<double, double> endpoint_limits_damped(double p, double lambda, double mu, const MotionParams& m,
                                                        double t) {
  detail::check_damped(p, lambda, mu, m);
  const double s = (m.c + m.v) / (lambda + mu);
  const double lo = std::log(p / (1.0 - p));
  return {detail::logistic_kernel(lo + mu * t) / s, detail::logistic_kernel(lo - lambda * t) / s};
}

/// Logistic density with location m and scale s.
inline double logistic_density(double x, double m, double s) { return detail::logistic_kernel((x - m) / s) / s; }

/// Stationary density of the damped case; exists only when lambda v == mu c.
inline double stationary_damped(double p, double lambda, double mu, const MotionParams& m, double x) {
  detail::check_damped(p, lambda, mu, m);
  const double lv = lambda * m.v, mc = mu * m.c;
  if (std::abs(lv - mc) > 1e-12 * std::max(lv, mc))
    throw no_stationary_law("stationary_damped: lambda*v != mu*c, the density tends to 0");
  const double s = m.v / mu;
  return logistic_density(x, s * std::log(p / (1.0 - p)), s);
}

inline ProcessLaw law_damped(double p, double lambda, double mu, const MotionParams& m, double t) {
  detail::check_damped(p, lambda, mu, m);
  detail::check_time(t, true);
  return ProcessLaw(
      t, m, p, atoms_damped(p, lambda, mu, t),
      [=](double x) { return density_damped_parts(p, lambda, mu, m, x, t); },
      [=](double x) { return density_damped(p, lambda, mu, m, x, t); });
}

// ---------------------------------------------------------------------------
// Polya case: U_1 ~ Gamma(b/A+1, lambda), D_1 ~ Gamma(r/A+1, mu), later periods exponential.

namespace detail {

inline void check_polya(double b, double r, double A, double lambda, double mu) {
  require(b > 0 && r > 0 && A > 0, "polya: b, r, A must be positive");
  require(lambda > 0 && mu > 0, "polya: rates must be positive");
}

// log sum_{n>=1} (z1^n - z2^n) / ((z1 - z2) (beta)_{n+1}), z1 > z2 > 0.
inline double polya_log_eta_sum(double beta, double z1, double z2, const SeriesControl& ctrl) {
  double e = 1.0 / (beta * (beta + 1.0));
  double g = z2 * e;
  Scaled sum{e, 0.0};
  for (std::size_t n = 1; n < ctrl.max_terms; ++n) {
    const double denom = beta + n + 1.0;
    const double e_next = (z1 * e + g) / denom;
    g = z2 * g / denom;
    e = e_next;
    sum.mantissa += e;
    if (sum.mantissa > kRescale) {
      sum.mantissa /= kRescale;
      e /= kRescale;
      g /= kRescale;
      sum.log_scale += kLogRescale;
    }
    const double ratio = (z1 + z2) / (denom + 1.0);
    if (ratio < 1.0 && e * ratio / (1.0 - ratio) <= ctrl.rel_tol * sum.mantissa) return log_abs(sum);
  }
  throw truncation_error("polya density series", 1.0, ctrl.max_terms);
}

// f(x,t|c), b(x,t|c) at tau for the Polya case.
inline ForwardBackward polya_given_c(double b, double r, double A, double lambda, double mu, double cv, double tau,
                                     double t, const SeriesControl& ctrl) {
  const double a = b / A, rho = r / A, beta = (b + A + r) / A;
  const double lt = lambda * tau, ms = mu * (t - tau);
  const double first =
      std::exp(std::log(r * lambda / (cv * A)) + (a - 1.0) * std::log(lt) - lt - lgamma_pos(a + 1.0) +
               log_hyp1f1_one_minus_one(beta, lt, ctrl)) *
      gamma_sf(rho + 1.0, mu, t - tau);
  const double log_xi = -lt - ms + (a + 1.0) * std::log(lt) + rho * std::log(ms) - std::log(cv) -
                        lgamma_pos(a + 1.0) - lgamma_pos(rho);
  // xi * eta / (t - tau) = xi * mu * S with eta = (z1 - z2) S
  const double log_core = log_xi + std::log(mu) + polya_log_eta_sum(beta, lt + ms, lt, ctrl);
  const double f = std::exp(log_core);
  const double tail = std::exp(log_core + std::log(t - tau) - std::log(tau));
  return {f, first + tail};
}

}  // namespace detail

inline Atoms atoms_polya(double b, double r, double A, double lambda, double mu, double t,
                         const SeriesControl& ctrl = {}) {
  detail::check_polya(b, r, A, lambda, mu);
  detail::check_time(t, false);
  const double wc = b / (b + r), wv = r / (b + r);
  if (t == 0.0) return {wc, wv};
  const double beta = (b + A + r) / A;
  auto side = [&](double w, double shape_ratio, double rate) {
    const double z = rate * t;
    return w * gamma_sf(shape_ratio + 1.0, rate, t) +
           std::exp(std::log(w) + shape_ratio * std::log(z) - z - detail::lgamma_pos(shape_ratio + 1.0) +
                    log_hyp1f1_one_minus_one(beta, z, ctrl));
  };
  return {side(wc, b / A, lambda), side(wv, r / A, mu)};
}

inline DensityParts density_polya_parts(double b, double r, double A, double lambda, double mu,
                                        const MotionParams& m, double x, double t, const SeriesControl& ctrl = {}) {
  detail::check_polya(b, r, A, lambda, mu);
  m.validate();
  detail::check_time(t, true);
  detail::check_open_support(m, x, t);
  const double cv = m.c + m.v;
  const double tau = tau_star(m, x, t);
  const auto c = detail::polya_given_c(b, r, A, lambda, mu, cv, tau, t, ctrl);
  const auto v = detail::polya_given_c(r, b, A, mu, lambda, cv, t - tau, t, ctrl);
  return {c.f, c.b, v.b, v.f};
}

inline double density_polya(double b, double r, double A, double lambda, double mu, const MotionParams& m, double x,
                            double t, const SeriesControl& ctrl = {}) {
  return density_polya_parts(b, r, A, lambda, mu, m, x, t, ctrl).mixed(b / (b + r));
}

/// Limits of p(x,t) as x -> -vt (first) and x -> ct (second), Polya case.
inline std::pair<double, double> endpoint_limits_polya(double b, double r, double A, double lambda, double mu,
                                                       const MotionParams& m, double t,
                                                       const SeriesControl& ctrl = {}) {
  detail::check_polya(b, r, A, lambda, mu);
  detail::check_time(t, true);
  const double beta = (b + A + r) / A;
  const double pre = std::log(b * r / ((b + r) * (m.c + m.v) * A));
  auto side = [&](double shape_ratio, double rate) {
    const double z = rate * t;
    return std::exp(pre + std::log(rate) + (shape_ratio - 1.0) * std::log(z) - z -
                    detail::lgamma_pos(shape_ratio + 1.0) + log_hyp1f1_one_minus_one(beta, z, ctrl));
  };
  return {side(r / A, mu), side(b / A, lambda)};
}

inline ProcessLaw law_polya(double b, double r, double A, double lambda, double mu, const MotionParams& m, double t,
                            const SeriesControl& ctrl = {}) {
  detail::check_polya(b, r, A, lambda, mu);
  m.validate();
  detail::check_time(t, true);
  return ProcessLaw(t, m, b / (b + r), atoms_polya(b, r, A, lambda, mu, t, ctrl),
                    [=](double x) { return density_polya_parts(b, r, A, lambda, mu, m, x, t, ctrl); });
}

// ---------------------------------------------------------------------------
// General scheme and intertimes: truncated series over the number of epochs.

/// Atom masses from the series over k of P{Z_0 = y, first k trials repeat y} times
/// P{exactly k periods of direction y fit in t}.
inline Atoms atoms_general(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m, double t,
                           const SeriesControl& ctrl = {}) {
  ctrl.validate();
  m.validate();
  detail::check_time(t, true);
  auto side = [&](Direction y) {
    const double w0 = scheme.initial_probability(y);
    double sum = w0 * partial_sum_increment(model, y, 0, t);
    for (unsigned k = 1; k < ctrl.max_terms; ++k) {
      const unsigned j = y == Direction::forward ? k - 1 : 0;
      const double w = w0 * joint_count_velocity(scheme, k, j, y, y);
      sum += w * partial_sum_increment(model, y, k, t);
      // weights are nonincreasing and the remaining increments add up to F^(k+1)(t)
      if (w * partial_sum_cdf(model, y, k + 1, t) <= ctrl.rel_tol * sum) return sum;
    }
    throw truncation_error("atoms_general", 1.0, ctrl.max_terms);
  };
  return {side(Direction::forward), side(Direction::backward)};
}

/// Series density with a truncation diagnostic.
struct SeriesDensity {
  DensityParts parts;
  double last_shell = 0.0;  // largest relative contribution among the final three shells
  unsigned shells = 0;
  bool converged = false;
};

/// Density of S_t from the epoch-count series. Inner convolution integrals
/// P{U^(n) <= s < U^(n+1)} are computed by adaptive quadrature.
inline SeriesDensity density_general_series(const TrialScheme& scheme, const IntertimeModel& model,
                                            const MotionParams& m, double x, double t, unsigned k_max = 200,
                                            const SeriesControl& ctrl = {1e-12, 10000},
                                            const QuadratureOptions& quad = {1e-14, 1e-11, 4000}) {
  m.validate();
  ctrl.validate();
  detail::check_time(t, true);
  detail::check_open_support(m, x, t);
  detail::require(k_max >= 1, "density_general_series: k_max must be at least 1");
  const double cv = m.c + m.v;
  const double eps = 1e-13 * t;
  const double tau = std::clamp(tau_star(m, x, t), eps, t - eps);
  const double span[2] = {tau, t - tau};  // time spent forward, backward

  // inner[d][n] = P{n complete periods of direction d, the (n+1)-th still running, within span[d]}
  std::vector<double> inner[2];
  std::vector<double> point[2];  // point[d][n] = density of the n-period sum at span[d]
  auto dir_index = [](Direction d) { return d == Direction::forward ? 0 : 1; };
  auto inner_at = [&](Direction d, unsigned n) {
    auto& cache = inner[dir_index(d)];
    const double s = span[dir_index(d)];
    while (cache.size() <= n) {
      const unsigned q = static_cast<unsigned>(cache.size());
      if (q == 0) {
        cache.push_back(intertime_tail(model, d, 1, s));
      } else {
        auto g = [&](double u) { return partial_sum_density(model, d, q, u) * intertime_tail(model, d, q + 1, s - u); };
        cache.push_back(integrate(g, 0.0, s, quad).value);
      }
    }
    return cache[n];
  };
  auto point_at = [&](Direction d, unsigned n) {
    auto& cache = point[dir_index(d)];
    while (cache.size() <= n) {
      const unsigned q = static_cast<unsigned>(cache.size());
      cache.push_back(q == 0 ? 0.0 : partial_sum_density(model, d, q, span[dir_index(d)]));
    }
    return cache[n];
  };

  SeriesDensity out;
  double f[2] = {0, 0}, b[2] = {0, 0};
  int quiet = 0;
  for (unsigned k = 1; k <= k_max; ++k) {
    double shell_rel = 0.0;
    for (Direction y : {Direction::forward, Direction::backward}) {
      const int yi = dir_index(y);
      double df = 0.0, db = 0.0;
      for (unsigned j = 0; j < k; ++j) {
        const unsigned nf = (y == Direction::forward ? 1 : 0) + j;
        const unsigned nb = k - nf;
        if (nb >= 1)
          df += joint_count_velocity(scheme, k, j, y, Direction::forward) * point_at(Direction::backward, nb) *
                inner_at(Direction::forward, nf);
        if (nf >= 1)
          db += joint_count_velocity(scheme, k, j, y, Direction::backward) * point_at(Direction::forward, nf) *
                inner_at(Direction::backward, nb);
      }
      f[yi] += df / cv;
      b[yi] += db / cv;
      const double total = f[yi] + b[yi];
      if (total > 0) shell_rel = std::max(shell_rel, (df + db) / cv / total);
    }
    out.shells = k;
    if (k >= 2 && shell_rel < ctrl.rel_tol) {
      out.last_shell = std::max(out.last_shell, shell_rel);
      if (++quiet >= 3) {
        out.converged = true;
        break;
      }
    } else {
      quiet = 0;
      out.last_shell = shell_rel;
    }
  }
  out.parts = {f[0], b[0], f[1], b[1]};
  return out;
}

inline ProcessLaw law_general(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m, double t,
                              unsigned k_max = 200, const SeriesControl& ctrl = {1e-12, 10000}) {
  return ProcessLaw(t, m, scheme.forward_probability(), atoms_general(scheme, model, m, t),
                    [=](double x) { return density_general_series(scheme, model, m, x, t, k_max, ctrl).parts; });
}

/// Closed form when one exists (damped Bernoulli, Polya with matching Gamma periods), otherwise the series.
inline ProcessLaw make_law(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m, double t) {
  const auto* lin = std::get_if<LinearRateExponential>(&model.variant());
  if (lin && !scheme.is_polya() && scheme.as_bernoulli().p < 1.0)
    return law_damped(scheme.as_bernoulli().p, lin->lambda, lin->mu, m, t);
  const auto* gam = std::get_if<GammaThenExponential>(&model.variant());
  if (gam && scheme.is_polya()) {
    const auto& u = scheme.as_polya();
    if (u.b == gam->b && u.r == gam->r && u.A == gam->A) return law_polya(u.b, u.r, u.A, gam->lambda, gam->mu, m, t);
  }
  return law_general(scheme, model, m, t);
}

}  // namespace telegraph
