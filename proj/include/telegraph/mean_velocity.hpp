#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "telegraph/analytic_law.hpp"
#include "telegraph/errors.hpp"
#include "telegraph/intertimes.hpp"
#include "telegraph/motion.hpp"
#include "telegraph/quadrature.hpp"
#include "telegraph/special_functions.hpp"
#include "telegraph/trial_schemes.hpp"

namespace telegraph {

/// E[V_t | V_0 = y] as y-speed * P{no epoch before t} + sum_k (c phi_k - v psi_k), where
/// phi_k = P{Z_k = c, T_k <= t < T_{k+1} | Z_0 = y} and psi_k likewise for -v.
struct MeanVelocity {
  double value = 0.0;
  unsigned shells = 0;
  double tail_bound = 0.0;  // bound on max(c,v) * P{T_{shells+1} <= t}
  std::vector<double> phi;
  std::vector<double> psi;
};

/// Default truncation for the mean-velocity series: stop once max(c,v) P{T_{K+1} <= t} <= 1e-10.
inline constexpr SeriesControl kMeanVelocityControl{1e-10, 300};

namespace detail {

// Upper bound on P{U^(nf) + D^(nb) <= t} on a grid: the sum of
// P{U^(nf) in cell i} * P{D^(nb) <= t - left edge of cell i}.
class EpochTailBound {
 public:
  EpochTailBound(const IntertimeModel& model, double t, unsigned cells = 48) : model_(model), t_(t), cells_(cells) {}

  double sum_cdf_bound(unsigned nf, unsigned nb) {
    if (nf == 0) return partial_sum_cdf(model_, Direction::backward, nb, t_);
    if (nb == 0) return partial_sum_cdf(model_, Direction::forward, nf, t_);
    const auto& fu = table(Direction::forward, nf);
    const auto& fd = table(Direction::backward, nb);
    double s = 0.0;
    for (unsigned i = 0; i < cells_; ++i) s += (fu[i + 1] - fu[i]) * fd[cells_ - i];
    return std::min(1.0, s);
  }

  /// Bound on P{T_k <= t | Z_0 = y}.
  double epoch_bound(const TrialScheme& scheme, Direction y, unsigned k) {
    const auto cd = count_dist(scheme, k, y);
    double s = 0.0;
    for (unsigned j = 0; j < k; ++j) {
      const unsigned nf = (y == Direction::forward ? 1 : 0) + j;
      s += cd.pmf[j] * sum_cdf_bound(nf, k - nf);
    }
    return std::min(1.0, s);
  }

 private:
  const std::vector<double>& table(Direction d, unsigned n) {
    auto& rows = d == Direction::forward ? fwd_ : bwd_;
    if (rows.size() <= n) rows.resize(n + 1);
    auto& row = rows[n];
    if (row.empty()) {
      row.resize(cells_ + 1);
      for (unsigned i = 0; i <= cells_; ++i) row[i] = partial_sum_cdf(model_, d, n, t_ * i / cells_);
    }
    return row;
  }

  IntertimeModel model_;
  double t_;
  unsigned cells_;
  std::vector<std::vector<double>> fwd_, bwd_;
};

// Number of shells K so that the remaining shells weigh at most tol.
inline unsigned choose_shells(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m,
                              Direction y, double t, const SeriesControl& ctrl, double& bound_out) {
  EpochTailBound bound(model, t);
  const double speed = std::max(m.c, m.v);
  for (unsigned k = 1; k <= ctrl.max_terms; ++k) {
    const double b = speed * bound.epoch_bound(scheme, y, k + 1);
    if (b <= ctrl.rel_tol) {
      bound_out = b;
      return k;
    }
  }
  throw truncation_error("mean velocity: epoch tail still above tolerance", 1.0, ctrl.max_terms);
}

inline void finish(MeanVelocity& out, const MotionParams& m, double first) {
  out.value = first;
  for (unsigned k = 0; k < out.shells; ++k) out.value += m.c * out.phi[k] - m.v * out.psi[k];
}

}  // namespace detail

/// Mean velocity from the general series; each window probability
/// P{U^(nf) + D^(nb) <= t < ...} is a one-dimensional quadrature.
inline MeanVelocity mean_velocity_general(const TrialScheme& scheme, const IntertimeModel& model,
                                          const MotionParams& m, double t, Direction initial = Direction::forward,
                                          const SeriesControl& ctrl = kMeanVelocityControl,
                                          const QuadratureOptions& quad = {1e-15, 1e-11, 4000}) {
  m.validate();
  ctrl.validate();
  detail::check_time(t, true);
  MeanVelocity out;
  out.shells = detail::choose_shells(scheme, model, m, initial, t, ctrl, out.tail_bound);
  out.phi.assign(out.shells, 0.0);
  out.psi.assign(out.shells, 0.0);

  // P{n periods of d complete and the (n+1)-th running at time t - s} against the other direction's sum density
  auto window = [&](Direction d, unsigned n, unsigned n_other) {
    if (n_other == 0) return partial_sum_increment(model, d, n, t);
    auto g = [&](double s) {
      return partial_sum_increment(model, d, n, t - s) * partial_sum_density(model, opposite(d), n_other, s);
    };
    return integrate(g, 0.0, t, quad).value;
  };

  for (unsigned k = 1; k <= out.shells; ++k) {
    for (unsigned j = 0; j < k; ++j) {
      const unsigned nf = (initial == Direction::forward ? 1 : 0) + j;
      const unsigned nb = k - nf;
      const double wf = joint_count_velocity(scheme, k, j, initial, Direction::forward);
      const double wb = joint_count_velocity(scheme, k, j, initial, Direction::backward);
      if (wf > 0) out.phi[k - 1] += wf * window(Direction::forward, nf, nb);
      if (wb > 0) out.psi[k - 1] += wb * window(Direction::backward, nb, nf);
    }
  }
  detail::finish(out, m, m.velocity(initial) * intertime_tail(model, initial, 1, t));
  return out;
}

namespace detail {

template <unsigned Bits>
using Float = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<Bits, boost::multiprecision::digit_base_2>, boost::multiprecision::et_off>;

// Damped case, Z_0 = c. With m = k-1-j backward and j+1 forward completed periods,
//   P{U^(j+1) + D^(m) <= t} = lambda (j+1) sum_{l,h} C(m,l) C(j,h) (-1)^{l+h} Q1(l,h),
//   Q1(l,h) = t e^{-mu l t} 1F1(1;2;alpha t) = (e^{-lambda(h+1)t} - e^{-mu l t}) / alpha,
//   alpha = mu l - lambda(h+1),
// and convolving with an Exp(rho) period adds rho e^{-lambda(h+1)t} H(alpha, rho - lambda(h+1); t).
// The alternating sums lose about K bits, so they run in extended precision.
template <class Real>
void damped_windows(double p, double lambda, double mu, double tt, unsigned K, MeanVelocity& out) {
  const Real L(lambda), M(mu), t(tt);
  using std::exp;
  std::vector<Real> eL(K + 3), eM(K + 3);
  for (unsigned n = 0; n < K + 3; ++n) {
    eL[n] = exp(-L * n * t);
    eM[n] = exp(-M * n * t);
  }
  std::vector<std::vector<Real>> C(K + 1);
  for (unsigned n = 0; n <= K; ++n) {
    C[n].assign(n + 1, Real(1));
    for (unsigned i = 1; i < n; ++i) C[n][i] = C[n - 1][i - 1] + C[n - 1][i];
  }
  auto alpha_of = [&](unsigned l, unsigned h) { return Real(M * l - L * (h + 1)); };
  auto q1 = [&](unsigned l, unsigned h) {
    const Real a = alpha_of(l, h);
    return a != 0 ? Real((eL[h + 1] - eM[l]) / a) : Real(t * eM[l]);
  };
  // rho e^{-lambda(h+1)t} H(alpha, beta; t) with e^{-beta t} supplied
  auto conv = [&](unsigned l, unsigned h, const Real& rho, const Real& beta, const Real& e_beta) {
    const Real a = alpha_of(l, h);
    const Real e_a = eM[l] / eL[h + 1];
    return Real(rho * eL[h + 1] * kernel_H(a, beta, t, e_a, e_beta));
  };

  // R1[l][j] = sum_h C(j,h)(-1)^h Q1(l,h); Rphi[l][j] likewise with the U_{j+2} convolution.
  std::vector<std::vector<Real>> R1(K), Rphi(K);
  for (unsigned l = 0; l < K; ++l) {
    R1[l].assign(K - l, Real(0));
    Rphi[l].assign(K - l, Real(0));
    for (unsigned j = 0; j + l < K; ++j) {
      const Real rho = L * (j + 2);
      Real s1(0), s2(0);
      for (unsigned h = 0; h <= j; ++h) {
        const Real sign = (h % 2) ? Real(-C[j][h]) : C[j][h];
        s1 += sign * q1(l, h);
        s2 += sign * conv(l, h, rho, Real(L * (j + 1 - h)), eL[j + 1 - h]);
      }
      R1[l][j] = s1;
      Rphi[l][j] = s2;
    }
  }
  // Tpsi[h][m] = sum_l C(m,l)(-1)^l (D_{m+1} convolution of Q1(l,h)).
  std::vector<std::vector<Real>> Tpsi(K);
  for (unsigned h = 0; h < K; ++h) {
    Tpsi[h].assign(K - h, Real(0));
    for (unsigned m = 0; m + h < K; ++m) {
      const Real rho = M * (m + 1);
      const Real beta = rho - L * (h + 1);
      const Real e_beta = eM[m + 1] / eL[h + 1];
      Real s(0);
      for (unsigned l = 0; l <= m; ++l) {
        const Real sign = (l % 2) ? Real(-C[m][l]) : C[m][l];
        s += sign * conv(l, h, rho, beta, e_beta);
      }
      Tpsi[h][m] = s;
    }
  }

  const TrialScheme scheme = TrialScheme::bernoulli(p);
  for (unsigned j = 0; j < K; ++j) {
    for (unsigned m = 0; j + m < K; ++m) {
      const unsigned k = j + m + 1;
      Real ft(0), iphi(0), ipsi(0);
      for (unsigned l = 0; l <= m; ++l) {
        const Real sign = (l % 2) ? Real(-C[m][l]) : C[m][l];
        ft += sign * R1[l][j];
        iphi += sign * Rphi[l][j];
      }
      for (unsigned h = 0; h <= j; ++h) {
        const Real sign = (h % 2) ? Real(-C[j][h]) : C[j][h];
        ipsi += sign * Tpsi[h][m];
      }
      const Real pre = L * (j + 1);
      const double window_f = static_cast<double>(pre * (ft - iphi));
      const double window_b = static_cast<double>(pre * (ft - ipsi));
      out.phi[k - 1] += joint_count_velocity(scheme, k, j, Direction::forward, Direction::forward) * window_f;
      out.psi[k - 1] += joint_count_velocity(scheme, k, j, Direction::forward, Direction::backward) * window_b;
    }
  }
}

}  // namespace detail

/// Damped Bernoulli case via the 1F1(1;2;.) and H closed forms.
inline MeanVelocity mean_velocity_damped(double p, double lambda, double mu, const MotionParams& m, double t,
                                         Direction initial = Direction::forward,
                                         const SeriesControl& ctrl = kMeanVelocityControl) {
  detail::check_damped(p, lambda, mu, m);
  detail::check_time(t, true);
  ctrl.validate();
  if (initial == Direction::backward) {
    MeanVelocity r = mean_velocity_damped(1.0 - p, mu, lambda, m.mirrored(), t, Direction::forward, ctrl);
    r.value = -r.value;
    std::swap(r.phi, r.psi);
    return r;
  }
  const TrialScheme scheme = TrialScheme::bernoulli(p);
  const IntertimeModel model = IntertimeModel::linear_rate(lambda, mu);
  MeanVelocity out;
  const unsigned K = detail::choose_shells(scheme, model, m, initial, t, ctrl, out.tail_bound);
  out.shells = K;
  out.phi.assign(K, 0.0);
  out.psi.assign(K, 0.0);
  // about K bits vanish in the alternating sums; keep 128 more
  const unsigned bits = K + 128;
  if (bits <= 256)
    detail::damped_windows<detail::Float<256>>(p, lambda, mu, t, K, out);
  else if (bits <= 384)
    detail::damped_windows<detail::Float<384>>(p, lambda, mu, t, K, out);
  else
    detail::damped_windows<detail::Float<512>>(p, lambda, mu, t, K, out);
  detail::finish(out, m, m.c * std::exp(-lambda * t));
  return out;
}

/// Polya case via G, the CDF of a sum of two independent Gamma variables.
inline MeanVelocity mean_velocity_polya(double b, double r, double A, double lambda, double mu, const MotionParams& m,
                                        double t, Direction initial = Direction::forward,
                                        const SeriesControl& ctrl = kMeanVelocityControl,
                                        const SeriesControl& g_ctrl = {}) {
  detail::check_polya(b, r, A, lambda, mu);
  m.validate();
  detail::check_time(t, true);
  ctrl.validate();
  if (initial == Direction::backward) {
    MeanVelocity res = mean_velocity_polya(r, b, A, mu, lambda, m.mirrored(), t, Direction::forward, ctrl, g_ctrl);
    res.value = -res.value;
    std::swap(res.phi, res.psi);
    return res;
  }
  const TrialScheme scheme = TrialScheme::polya(b, r, A);
  const IntertimeModel model = IntertimeModel::gamma_then_exp(b, r, A, lambda, mu);
  MeanVelocity out;
  const unsigned K = detail::choose_shells(scheme, model, m, initial, t, ctrl, out.tail_bound);
  out.shells = K;
  out.phi.assign(K, 0.0);
  out.psi.assign(K, 0.0);
  const double a = b / A, rho = r / A;

  // P{U^(nf) + D^(nb) <= t} for nf >= 1: Gamma(a+nf, lambda) plus Gamma(rho+nb, mu) or nothing
  std::vector<std::vector<double>> memo(K + 2, std::vector<double>(K + 2, -1.0));
  auto sum_cdf = [&](unsigned nf, unsigned nb) {
    double& slot = memo[nf][nb];
    if (slot < 0)
      slot = nb == 0 ? gamma_cdf(a + nf, lambda, t) : conv_gamma_cdf_G(rho + nb, mu, a + nf, lambda, t, g_ctrl);
    return slot;
  };
  for (unsigned k = 1; k <= K; ++k) {
    for (unsigned j = 0; j < k; ++j) {
      const unsigned nf = j + 1, nb = k - nf;
      const double base = sum_cdf(nf, nb);
      out.phi[k - 1] += joint_count_velocity(scheme, k, j, initial, Direction::forward) * (base - sum_cdf(nf + 1, nb));
      out.psi[k - 1] += joint_count_velocity(scheme, k, j, initial, Direction::backward) * (base - sum_cdf(nf, nb + 1));
    }
  }
  detail::finish(out, m, m.c * gamma_sf(a + 1.0, lambda, t));
  return out;
}

/// t E[Z_0], the mean position when every period is i.i.d. whatever its direction.
struct MeanPositionCheck {
  double analytic;
  std::string note;
};

inline MeanPositionCheck mean_position_iid_check(const TrialScheme& scheme, const IntertimeModel& model,
                                                 const MotionParams& m, double t) {
  m.validate();
  detail::check_time(t, false);
  const auto* h = std::get_if<HomogeneousExponential>(&model.variant());
  if (!h || h->lambda != h->mu)
    throw domain_error("mean_position_iid_check: needs i.i.d. periods (exp intertimes with lambda == mu)");
  const double w = scheme.forward_probability();
  return {t * (m.c * w - m.v * (1.0 - w)),
          "E[S_t] = t E[Z_0] holds when velocities are independent of the i.i.d. intertimes"};
}

}  // namespace telegraph
