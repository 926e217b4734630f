#pragma once

#include <cmath>
#include <variant>

#include <boost/math/special_functions/gamma.hpp>

#include "telegraph/errors.hpp"
#include "telegraph/motion.hpp"
#include "telegraph/special_functions.hpp"

namespace telegraph {

/// U_k ~ Exp(lambda k), D_k ~ Exp(mu k): the damped family.
struct LinearRateExponential {
  double lambda;
  double mu;
};

/// U_1 ~ Gamma(b/A + 1, lambda), D_1 ~ Gamma(r/A + 1, mu); later periods Exp(lambda), Exp(mu).
struct GammaThenExponential {
  double b, r, A;
  double lambda;
  double mu;
};

/// U_k ~ Exp(lambda), D_k ~ Exp(mu) for every k: the classical constant-rate case.
struct HomogeneousExponential {
  double lambda;
  double mu;
};

class IntertimeModel {
 public:
  using Variant = std::variant<LinearRateExponential, GammaThenExponential, HomogeneousExponential>;

  static IntertimeModel linear_rate(double lambda, double mu) {
    check_rates(lambda, mu);
    return IntertimeModel(LinearRateExponential{lambda, mu});
  }
  static IntertimeModel gamma_then_exp(double b, double r, double A, double lambda, double mu) {
    check_rates(lambda, mu);
    detail::require(b > 0 && r > 0 && A > 0, "gamma_then_exp: b, r, A must be positive");
    return IntertimeModel(GammaThenExponential{b, r, A, lambda, mu});
  }
  static IntertimeModel homogeneous(double lambda, double mu) {
    check_rates(lambda, mu);
    return IntertimeModel(HomogeneousExponential{lambda, mu});
  }

  const Variant& variant() const { return v_; }

  double rate(Direction d) const {
    return std::visit([d](const auto& m) { return d == Direction::forward ? m.lambda : m.mu; }, v_);
  }

  /// Forward and backward roles exchanged.
  IntertimeModel mirrored() const {
    return std::visit(
        [](const auto& m) -> IntertimeModel {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, GammaThenExponential>)
            return gamma_then_exp(m.r, m.b, m.A, m.mu, m.lambda);
          else
            return IntertimeModel(T{m.mu, m.lambda});
        },
        v_);
  }

 private:
  explicit IntertimeModel(Variant v) : v_(v) {}
  static void check_rates(double lambda, double mu) {
    detail::require(lambda > 0 && mu > 0 && std::isfinite(lambda) && std::isfinite(mu),
                    "intertime rates must be positive and finite");
  }
  Variant v_;
};

namespace detail {

inline void check_kt(unsigned k, double t, bool allow_zero_k = false) {
  require(allow_zero_k || k >= 1, "intertime index k must be at least 1");
  require(t >= 0, "time must be nonnegative");
}

// Shape of the Gamma law of the partial sum of k periods in the given direction.
inline double gamma_sum_shape(const GammaThenExponential& m, Direction d, unsigned k) {
  return (d == Direction::forward ? m.b : m.r) / m.A + k;
}

}  // namespace detail

/// P{U_k > t} (forward) or P{D_k > t} (backward).
inline double intertime_tail(const IntertimeModel& model, Direction d, unsigned k, double t) {
  detail::check_kt(k, t);
  const double rate = model.rate(d);
  if (std::holds_alternative<LinearRateExponential>(model.variant())) return std::exp(-rate * k * t);
  if (auto* g = std::get_if<GammaThenExponential>(&model.variant()); g && k == 1)
    return gamma_sf(detail::gamma_sum_shape(*g, d, 1), rate, t);
  return std::exp(-rate * t);
}

/// Density of U_k (or D_k).
inline double intertime_density(const IntertimeModel& model, Direction d, unsigned k, double t) {
  detail::check_kt(k, t);
  const double rate = model.rate(d);
  if (std::holds_alternative<LinearRateExponential>(model.variant())) return rate * k * std::exp(-rate * k * t);
  if (auto* g = std::get_if<GammaThenExponential>(&model.variant()); g && k == 1)
    return gamma_pdf(detail::gamma_sum_shape(*g, d, 1), rate, t);
  return rate * std::exp(-rate * t);
}

/// Density of U^(k) = U_1 + ... + U_k (or D^(k)); at t = 0 the right limit.
inline double partial_sum_density(const IntertimeModel& model, Direction d, unsigned k, double t) {
  detail::check_kt(k, t);
  const double rate = model.rate(d);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearRateExponential>) {
          // maximum of k i.i.d. Exp(rate)
          const double e = std::exp(-rate * t);
          if (k == 1) return rate * e;
          return k * std::pow(-std::expm1(-rate * t), k - 1.0) * rate * e;
        } else if constexpr (std::is_same_v<T, GammaThenExponential>) {
          return gamma_pdf(detail::gamma_sum_shape(m, d, k), rate, t);
        } else {
          return gamma_pdf(k, rate, t);
        }
      },
      model.variant());
}

/// P{U^(k) <= t}; U^(0) = 0.
inline double partial_sum_cdf(const IntertimeModel& model, Direction d, unsigned k, double t) {
  detail::check_kt(k, t, true);
  if (k == 0) return 1.0;
  if (t == 0.0) return 0.0;
  const double rate = model.rate(d);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearRateExponential>)
          return std::pow(-std::expm1(-rate * t), static_cast<double>(k));
        else if constexpr (std::is_same_v<T, GammaThenExponential>)
          return gamma_cdf(detail::gamma_sum_shape(m, d, k), rate, t);
        else
          return gamma_cdf(k, rate, t);
      },
      model.variant());
}

/// P{U^(k) <= t < U^(k+1)}, the probability that exactly k periods fit in t
/// (k = 0 gives the tail of the first period).
inline double partial_sum_increment(const IntertimeModel& model, Direction d, unsigned k, double t) {
  detail::check_kt(k, t, true);
  const double rate = model.rate(d);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearRateExponential>) {
          return std::pow(-std::expm1(-rate * t), static_cast<double>(k)) * std::exp(-rate * t);
        } else {
          double shape = k;
          if constexpr (std::is_same_v<T, GammaThenExponential>) {
            if (k == 0) return gamma_sf(detail::gamma_sum_shape(m, d, 1), rate, t);
            shape = detail::gamma_sum_shape(m, d, k);
          }
          // Gamma(shape) and Gamma(shape + 1) CDFs differ by one Poisson-type term
          if (t == 0.0) return shape == 0.0 ? 1.0 : 0.0;
          const double x = rate * t;
          return std::exp(shape * std::log(x) - x - detail::lgamma_pos(shape + 1.0));
        }
      },
      model.variant());
}

/// Inverse CDF of U_k (or D_k) at u in (0, 1).
inline double intertime_quantile(const IntertimeModel& model, Direction d, unsigned k, double u) {
  detail::require(k >= 1, "intertime index k must be at least 1");
  detail::require(u > 0 && u < 1, "intertime_quantile: u must lie in (0, 1)");
  const double rate = model.rate(d);
  if (std::holds_alternative<LinearRateExponential>(model.variant())) return -std::log1p(-u) / (rate * k);
  if (auto* g = std::get_if<GammaThenExponential>(&model.variant()); g && k == 1)
    return boost::math::gamma_p_inv(detail::gamma_sum_shape(*g, d, 1), u) / rate;
  return -std::log1p(-u) / rate;
}

/// Draw U_k (or D_k): inverse CDF for the exponentials, a Gamma sampler for the first Gamma period.
template <class Rng>
double sample_intertime(const IntertimeModel& model, Direction d, unsigned k, Rng& rng) {
  detail::require(k >= 1, "intertime index k must be at least 1");
  const double rate = model.rate(d);
  if (std::holds_alternative<LinearRateExponential>(model.variant())) return rng.exponential(rate * k);
  if (auto* g = std::get_if<GammaThenExponential>(&model.variant()); g && k == 1)
    return rng.gamma(detail::gamma_sum_shape(*g, d, 1), rate);
  return rng.exponential(rate);
}

}  // namespace telegraph
