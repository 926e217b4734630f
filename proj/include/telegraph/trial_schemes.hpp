#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "telegraph/errors.hpp"
#include "telegraph/motion.hpp"
#include "telegraph/special_functions.hpp"

namespace telegraph {

struct Bernoulli {
  double p;
};

/// Classical urn: b black, r red, A balls of the drawn colour added per draw.
struct Polya {
  double b;
  double r;
  double A;
};

/// The trial process X_1, X_2, ...; X_1 sets the initial velocity and
/// X_{n+1} the velocity after the n-th epoch (1 = forward).
class TrialScheme {
 public:
  using Variant = std::variant<Bernoulli, Polya>;

  /// p in (0, 1]; p = 1 is the degenerate always-forward scheme.
  static TrialScheme bernoulli(double p) {
    detail::require(p > 0 && p <= 1, "bernoulli: p must lie in (0, 1]");
    return TrialScheme(Bernoulli{p});
  }
  static TrialScheme polya(double b, double r, double A) {
    detail::require(b > 0 && r > 0 && std::isfinite(b) && std::isfinite(r),
                    "polya: b and r must be positive");
    detail::require(A > 0 && std::isfinite(A), "polya: A must be positive (A = 0 is the Bernoulli scheme)");
    return TrialScheme(Polya{b, r, A});
  }

  const Variant& variant() const { return v_; }
  bool is_polya() const { return std::holds_alternative<Polya>(v_); }
  const Bernoulli& as_bernoulli() const { return std::get<Bernoulli>(v_); }
  const Polya& as_polya() const { return std::get<Polya>(v_); }

  /// P{Z_0 = c}, i.e. b/(b+r) or p.
  double forward_probability() const {
    if (auto* b = std::get_if<Bernoulli>(&v_)) return b->p;
    const auto& u = as_polya();
    return u.b / (u.b + u.r);
  }
  double initial_probability(Direction d) const {
    return d == Direction::forward ? forward_probability() : 1.0 - forward_probability();
  }

  /// P{X_n = 1 | X_1 = 1} for n >= 2.
  double pi_A() const {
    if (auto* b = std::get_if<Bernoulli>(&v_)) return b->p;
    const auto& u = as_polya();
    return (u.b + u.A) / (u.b + u.A + u.r);
  }

  /// Scheme with the roles of the two colours exchanged (p -> 1-p, b <-> r).
  TrialScheme mirrored() const {
    if (auto* b = std::get_if<Bernoulli>(&v_)) return bernoulli(1.0 - b->p);
    const auto& u = as_polya();
    return polya(u.r, u.b, u.A);
  }

 private:
  explicit TrialScheme(Variant v) : v_(v) {}
  Variant v_;
};

/// History of the trials drawn so far.
struct TrialState {
  TrialScheme scheme;
  std::uint64_t n_trials = 0;
  std::uint64_t n_successes = 0;

  static TrialState start(const TrialScheme& s) { return TrialState{s, 0, 0}; }

  TrialState advanced(int outcome) const {
    return TrialState{scheme, n_trials + 1, n_successes + (outcome ? 1u : 0u)};
  }
};

/// P{X_{n+1} = 1 | history}.
inline double next_success_prob(const TrialState& st) {
  if (auto* b = std::get_if<Bernoulli>(&st.scheme.variant())) return b->p;
  const auto& u = st.scheme.as_polya();
  return (u.b + u.A * static_cast<double>(st.n_successes)) /
         (u.b + u.r + u.A * static_cast<double>(st.n_trials));
}

/// Draw the next trial by inverting a single uniform.
template <class Rng>
std::pair<int, TrialState> sample_trial(const TrialState& st, Rng& rng) {
  const int outcome = rng.uniform() < next_success_prob(st) ? 1 : 0;
  return {outcome, st.advanced(outcome)};
}

/// Law of N_{k-1} (forward outcomes among trials 2..k) given Z_0.
struct CountDistribution {
  unsigned k;
  Direction initial;
  std::vector<double> pmf;
};

namespace detail {

inline double bernoulli_term(double logc, double p, unsigned succ, unsigned fail) {
  const double q = 1.0 - p;
  if (q == 0.0) return fail == 0 ? std::exp(logc) : 0.0;
  return std::exp(logc + succ * std::log(p) + fail * std::log(q));
}

inline void check_k(unsigned k) { require(k >= 1, "k must be at least 1"); }

}  // namespace detail

/// P{N_{k-1} = j | Z_0 = initial} for j = 0..k-1.
inline CountDistribution count_dist(const TrialScheme& s, unsigned k, Direction initial) {
  detail::check_k(k);
  CountDistribution out{k, initial, std::vector<double>(k, 0.0)};
  const unsigned n = k - 1;
  for (unsigned j = 0; j <= n; ++j) {
    const double lc = detail::log_choose(n, j);
    if (auto* b = std::get_if<Bernoulli>(&s.variant())) {
      out.pmf[j] = detail::bernoulli_term(lc, b->p, j, n - j);
      continue;
    }
    const auto& u = s.as_polya();
    const double tot = (u.b + u.A + u.r) / u.A;
    if (initial == Direction::forward) {
      out.pmf[j] = std::exp(lc + log_pochhammer((u.b + u.A) / u.A, j) + log_pochhammer(u.r / u.A, n - j) -
                            log_pochhammer(tot, n));
    } else {
      // j forward outcomes means n - j backward ones after an initial red draw
      out.pmf[j] = std::exp(lc + log_pochhammer((u.r + u.A) / u.A, n - j) + log_pochhammer(u.b / u.A, j) -
                            log_pochhammer(tot, n));
    }
  }
  return out;
}

/// P{N_{k-1} = j, Z_k = zk | Z_0 = initial}; j is the value of N_{k-1} for both initial signs.
inline double joint_count_velocity(const TrialScheme& s, unsigned k, unsigned j, Direction initial,
                                   Direction zk) {
  detail::check_k(k);
  detail::require(j <= k - 1, "joint_count_velocity: j must lie in 0..k-1");
  const unsigned n = k - 1;
  const double lc = detail::log_choose(n, j);
  // successes among trials 2..k+1
  const unsigned succ = j + (zk == Direction::forward ? 1 : 0);
  const unsigned fail = k - succ;
  if (auto* b = std::get_if<Bernoulli>(&s.variant())) return detail::bernoulli_term(lc, b->p, succ, fail);
  const auto& u = s.as_polya();
  const double tot = (u.b + u.A + u.r) / u.A;
  if (initial == Direction::forward)
    return std::exp(lc + log_pochhammer((u.b + u.A) / u.A, succ) + log_pochhammer(u.r / u.A, fail) -
                    log_pochhammer(tot, k));
  return std::exp(lc + log_pochhammer((u.r + u.A) / u.A, fail) + log_pochhammer(u.b / u.A, succ) -
                  log_pochhammer(tot, k));
}

}  // namespace telegraph
