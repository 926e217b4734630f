#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "telegraph/errors.hpp"

namespace telegraph {

/// Truncation control for the infinite series used throughout the library.
struct SeriesControl {
  double rel_tol = 1e-14;
  std::size_t max_terms = 10000;

  void validate() const {
    detail::require(rel_tol > 0 && std::isfinite(rel_tol), "SeriesControl: rel_tol must be positive");
    detail::require(max_terms >= 1, "SeriesControl: max_terms must be at least 1");
  }
};

namespace detail {

inline constexpr double kRescale = 1e200;
inline const double kLogRescale = std::log(kRescale);
inline const double kLogMax = std::log(std::numeric_limits<double>::max());

inline bool nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }

// boost's lgamma does not touch the global signgam, unlike std::lgamma.
inline double lgamma_pos(double x) { return boost::math::lgamma(x); }

inline double log_choose(unsigned n, unsigned k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (n <= 1000) return std::log(boost::math::binomial_coefficient<double>(n, k));
  return lgamma_pos(n + 1.0) - lgamma_pos(k + 1.0) - lgamma_pos(n - k + 1.0);
}

/// value = mantissa * exp(log_scale)
struct Scaled {
  double mantissa = 1.0;
  double log_scale = 0.0;
};

inline double log_abs(const Scaled& s) { return std::log(std::abs(s.mantissa)) + s.log_scale; }

inline double unscale(const Scaled& s, const char* who) {
  if (s.mantissa == 0.0 || s.log_scale == 0.0) return s.mantissa;
  const double lg = log_abs(s);
  if (lg > kLogMax) throw overflow_error(std::string(who) + ": result exceeds double range");
  return std::copysign(std::exp(lg), s.mantissa);
}

// Maclaurin series of 1F1(a; b; z). The running sum is rescaled whenever it
// grows past kRescale so large arguments stay finite.
inline Scaled hyp1f1_maclaurin(double a, double b, double z, const SeriesControl& ctrl,
                               const char* who) {
  Scaled out;
  if (z == 0.0) return out;
  double term = 1.0;
  double last_bound = 1.0;
  // Past this index the term ratio is nonincreasing in k.
  const double settle = 2.0 * (std::abs(a) + std::abs(b)) + 2.0;
  for (std::size_t k = 0; k < ctrl.max_terms; ++k) {
    const double kk = static_cast<double>(k);
    term *= (a + kk) / (b + kk) * z / (kk + 1.0);
    out.mantissa += term;
    if (term == 0.0) return out;
    if (std::abs(out.mantissa) > kRescale) {
      out.mantissa /= kRescale;
      term /= kRescale;
      out.log_scale += kLogRescale;
    }
    const double next = std::abs((a + kk + 1.0) / (b + kk + 1.0) * z / (kk + 2.0));
    last_bound = std::abs(term / out.mantissa);
    if (kk + 1.0 >= settle && next < 1.0) {
      const double tail = std::abs(term) * next / (1.0 - next);
      if (tail <= ctrl.rel_tol * std::abs(out.mantissa)) return out;
    }
  }
  throw truncation_error(who, last_bound, ctrl.max_terms);
}

// 1F1(a; b; z) as a scaled value; negative z goes through the Kummer relation
// so the summed series has terms of one sign.
inline Scaled hyp1f1_scaled(double a, double b, double z, const SeriesControl& ctrl) {
  if (z < 0.0 && !nonpositive_integer(a)) {
    Scaled s = hyp1f1_maclaurin(b - a, b, -z, ctrl, "kummer_1f1");
    s.log_scale += z;
    return s;
  }
  return hyp1f1_maclaurin(a, b, z, ctrl, "kummer_1f1");
}

}  // namespace detail

/// Ascending factorial (alpha)_j.
inline double pochhammer(double alpha, std::size_t j) {
  detail::require(std::isfinite(alpha), "pochhammer: alpha must be finite");
  double r = 1.0;
  for (std::size_t i = 0; i < j; ++i) {
    r *= alpha + static_cast<double>(i);
    if (r == 0.0) return 0.0;
    if (!std::isfinite(r)) throw overflow_error("pochhammer: result exceeds double range");
  }
  return r;
}

/// log (alpha)_j for alpha > 0.
inline double log_pochhammer(double alpha, std::size_t j) {
  detail::require(alpha > 0 && std::isfinite(alpha), "log_pochhammer: alpha must be positive");
  if (j <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i) s += std::log(alpha + static_cast<double>(i));
    return s;
  }
  return detail::lgamma_pos(alpha + static_cast<double>(j)) - detail::lgamma_pos(alpha);
}

/// Kummer's confluent hypergeometric function 1F1(a; b; z).
inline double kummer_1f1(double a, double b, double z, const SeriesControl& ctrl = {}) {
  ctrl.validate();
  detail::require(std::isfinite(a) && std::isfinite(b) && std::isfinite(z),
                  "kummer_1f1: arguments must be finite");
  if (detail::nonpositive_integer(b))
    throw domain_error("kummer_1f1: b must not be zero or a negative integer");
  if (z == 0.0) return 1.0;
  return detail::unscale(detail::hyp1f1_scaled(a, b, z, ctrl), "kummer_1f1");
}

/// log(1F1(1; b; z) - 1) for b > 0, z > 0.
inline double log_hyp1f1_one_minus_one(double b, double z, const SeriesControl& ctrl = {}) {
  detail::require(b > 0 && z > 0, "log_hyp1f1_one_minus_one: need b > 0 and z > 0");
  if (z < 30.0) {
    // sum_{n>=1} z^n / (b)_n, no cancellation against the leading 1
    double term = 1.0, sum = 0.0;
    for (std::size_t n = 0; n < ctrl.max_terms; ++n) {
      term *= z / (b + static_cast<double>(n));
      sum += term;
      const double next = z / (b + static_cast<double>(n) + 1.0);
      if (next < 1.0 && term * next / (1.0 - next) <= ctrl.rel_tol * sum) return std::log(sum);
    }
    throw truncation_error("log_hyp1f1_one_minus_one", 1.0, ctrl.max_terms);
  }
  const double lf = detail::log_abs(detail::hyp1f1_maclaurin(1.0, b, z, ctrl, "kummer_1f1"));
  return lf + std::log1p(-std::exp(-lf));
}

namespace detail {

inline void check_gamma_args(double alpha, double mu, double t, const char* who) {
  if (!(alpha > 0 && std::isfinite(alpha) && mu > 0 && std::isfinite(mu)))
    throw domain_error(std::string(who) + ": shape and rate must be positive and finite");
  if (!(t >= 0)) throw domain_error(std::string(who) + ": t must be nonnegative");
}

}  // namespace detail

/// P(X <= t) for X ~ Gamma(shape alpha, rate mu).
inline double gamma_cdf(double alpha, double mu, double t) {
  detail::check_gamma_args(alpha, mu, t, "gamma_cdf");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  return boost::math::gamma_p(alpha, mu * t);
}

/// P(X > t) for X ~ Gamma(shape alpha, rate mu).
inline double gamma_sf(double alpha, double mu, double t) {
  detail::check_gamma_args(alpha, mu, t, "gamma_sf");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return boost::math::gamma_q(alpha, mu * t);
}

/// Gamma(shape alpha, rate mu) density; at t = 0 the right limit (finite only for alpha >= 1).
inline double gamma_pdf(double alpha, double mu, double t) {
  detail::check_gamma_args(alpha, mu, t, "gamma_pdf");
  if (t == 0.0) {
    if (alpha == 1.0) return mu;
    if (alpha > 1.0) return 0.0;
    throw domain_error("gamma_pdf: density diverges at t = 0 for shape < 1");
  }
  if (std::isinf(t)) return 0.0;
  return std::exp(alpha * std::log(mu) + (alpha - 1.0) * std::log(t) - mu * t -
                  detail::lgamma_pos(alpha));
}

/// G(alpha, mu, beta, lambda; t) = P(X + Y <= t), X ~ Gamma(alpha, mu), Y ~ Gamma(beta, lambda).
inline double conv_gamma_cdf_G(double alpha, double mu, double beta, double lambda, double t,
                               const SeriesControl& ctrl = {}) {
  ctrl.validate();
  detail::check_gamma_args(alpha, mu, t, "conv_gamma_cdf_G");
  detail::check_gamma_args(beta, lambda, t, "conv_gamma_cdf_G");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  const double mut = mu * t;
  const double z = (mu - lambda) * t;
  const double log_mut = std::log(mut);
  const double log_base = alpha * log_mut + beta * std::log(lambda * t) - mut;
  double sum = 0.0;
  int quiet = 0;
  for (std::size_t h = 0; h < ctrl.max_terms; ++h) {
    const double hh = static_cast<double>(h);
    const double B = alpha + beta + hh + 1.0;
    const detail::Scaled f = detail::hyp1f1_scaled(beta, B, z, ctrl);
    const double term =
        std::exp(log_base + hh * log_mut - detail::lgamma_pos(B) + detail::log_abs(f));
    sum += term;
    // terms can rise before they fall when mu < lambda, hence three in a row
    if (term <= ctrl.rel_tol * sum && hh >= mut) {
      if (++quiet >= 3) return std::min(1.0, sum);
    } else {
      quiet = 0;
    }
  }
  throw truncation_error("conv_gamma_cdf_G", 1.0, ctrl.max_terms);
}

/// 1F1(1; 2; z) = (e^z - 1)/z, generic over the real type.
template <class Real>
Real hyp1f1_one_two(const Real& z) {
  using std::abs;
  using std::exp;
  if (z == 0) return Real(1);
  if (abs(z) < 1) {
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real term(1), sum(1);
    for (int n = 1; n < 10000; ++n) {
      term *= z / (n + 1);
      sum += term;
      if (abs(term) <= eps * abs(sum)) break;
    }
    return sum;
  }
  return (exp(z) - 1) / z;
}

inline double hyp1f1_one_two(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

/// H(alpha, beta; t) = int_0^t (t-y) 1F1(1;2;alpha(t-y)) e^{-alpha(t-y)} e^{-beta y} dy.
/// Branches on exact zeros of alpha and beta.
template <class Real>
Real kernel_H(const Real& alpha, const Real& beta, const Real& t) {
  using std::exp;
  detail::require(t >= 0, "kernel_H: t must be nonnegative");
  if (alpha != 0) {
    return t / alpha *
           (hyp1f1_one_two(Real(-beta * t)) -
            exp(Real(-alpha * t)) * hyp1f1_one_two(Real((alpha - beta) * t)));
  }
  if (beta != 0) return t / beta * (1 - hyp1f1_one_two(Real(-beta * t)));
  return t * t / 2;
}

/// Same as kernel_H(alpha, beta, t) given e_alpha = exp(-alpha t) and e_beta = exp(-beta t).
template <class Real>
Real kernel_H(const Real& alpha, const Real& beta, const Real& t, const Real& e_alpha,
              const Real& e_beta) {
  // (1 - e_beta)/beta and (e_beta - e_alpha)/(alpha - beta) with their zero limits
  const Real first = beta != 0 ? Real((1 - e_beta) / beta) : t;
  if (alpha != 0) {
    const Real second = alpha != beta ? Real((e_beta - e_alpha) / (alpha - beta)) : Real(t * e_alpha);
    return (first - second) / alpha;
  }
  if (beta != 0) return (t - first) / beta;
  return t * t / 2;
}

}  // namespace telegraph
