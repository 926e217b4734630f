#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <tuple>
#include <vector>

#include "telegraph/errors.hpp"
#include "telegraph/intertimes.hpp"
#include "telegraph/motion.hpp"
#include "telegraph/rng.hpp"
#include "telegraph/trial_schemes.hpp"

namespace telegraph {

/// One simulated trajectory on [0, t]. epochs[k] = T_k (epochs[0] = 0),
/// velocities[k] = Z_k and positions[k] = S_{T_k}.
struct SamplePath {
  std::vector<double> epochs;
  std::vector<Direction> velocities;
  std::vector<double> positions;
  double final_position = 0.0;
  Direction final_velocity = Direction::forward;
  std::uint64_t switches = 0;  // M_t, epochs in (0, t]
  std::uint64_t forward_periods = 0;
  std::uint64_t backward_periods = 0;
};

inline constexpr std::uint64_t kMaxSwitches = 10'000'000;

namespace detail {

struct Endpoint {
  double forward_time;
  Direction velocity;
  std::uint64_t switches;
  std::uint64_t forward_periods;
  std::uint64_t backward_periods;
};

// Runs the epoch loop; visit(T_k, Z_k, forward time so far) is called at every epoch.
template <class Rng, class Visit>
Endpoint run_path(const TrialScheme& scheme, const IntertimeModel& model, double t, Rng& rng,
                  std::optional<Direction> initial, Visit&& visit) {
  require(t > 0 && std::isfinite(t), "simulate_path: t must be positive and finite");
  TrialState state = TrialState::start(scheme);
  int x1;
  if (initial) {
    x1 = *initial == Direction::forward ? 1 : 0;
    state = state.advanced(x1);
  } else {
    std::tie(x1, state) = sample_trial(state, rng);
  }
  Direction z = x1 ? Direction::forward : Direction::backward;
  Endpoint e{0.0, z, 0, 0, 0};
  double now = 0.0;
  visit(0.0, z, 0.0);
  for (;;) {
    const bool fwd = z == Direction::forward;
    const auto j = static_cast<unsigned>(fwd ? ++e.forward_periods : ++e.backward_periods);
    const double len = sample_intertime(model, z, j, rng);
    if (now + len > t) {
      if (fwd) e.forward_time += t - now;
      e.velocity = z;
      return e;
    }
    now += len;
    if (fwd) e.forward_time += len;
    if (++e.switches > kMaxSwitches) throw numeric_error("simulate_path: more than 1e7 epochs before t");
    int x;
    std::tie(x, state) = sample_trial(state, rng);
    z = x ? Direction::forward : Direction::backward;
    visit(now, z, e.forward_time);
  }
}

inline double position(const MotionParams& m, double forward_time, double t) {
  return m.c * forward_time - m.v * (t - forward_time);
}

// Path i of a run always draws from stream i.
inline RandomStream path_stream(std::uint64_t seed, std::uint64_t path) { return RandomStream(seed, path); }

// Splits [0, n) into fixed blocks, runs them on `workers` threads and returns
// per-block results in block order, so reductions do not depend on scheduling.
template <class Block, class Fn>
std::vector<Block> run_blocks(std::uint64_t n, unsigned workers, Fn&& fn) {
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<Block> out(n_blocks);
  auto work = [&](unsigned w, unsigned stride) {
    for (std::uint64_t b = w; b < n_blocks; b += stride) out[b] = fn(b * kBlock, std::min(n, (b + 1) * kBlock));
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n_blocks, 1)));
  if (workers <= 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace detail

/// Simulate one path exactly; X_1 can be forced to condition on V_0.
template <class Rng>
SamplePath simulate_path(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m, double t,
                         Rng& rng, std::optional<Direction> initial = std::nullopt) {
  m.validate();
  SamplePath path;
  const auto e = detail::run_path(scheme, model, t, rng, initial, [&](double when, Direction z, double fwd) {
    path.epochs.push_back(when);
    path.velocities.push_back(z);
    path.positions.push_back(detail::position(m, fwd, when));
  });
  path.final_position = detail::position(m, e.forward_time, t);
  path.final_velocity = e.velocity;
  path.switches = e.switches;
  path.forward_periods = e.forward_periods;
  path.backward_periods = e.backward_periods;
  return path;
}

/// Histogram of S_t on (-vt, ct) plus the two atom counts.
struct EmpiricalLaw {
  std::uint64_t n_paths = 0;
  double t = 0.0;
  MotionParams motion;
  std::uint64_t atom_plus = 0;   // S_t = ct
  std::uint64_t atom_minus = 0;  // S_t = -vt
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;

  double atom_plus_freq() const { return static_cast<double>(atom_plus) / n_paths; }
  double atom_minus_freq() const { return static_cast<double>(atom_minus) / n_paths; }
  double bin_freq(std::size_t i) const { return static_cast<double>(counts[i]) / n_paths; }
  double density(std::size_t i) const { return bin_freq(i) / (edges[i + 1] - edges[i]); }
  /// Binomial standard error of density(i).
  double std_err(std::size_t i) const {
    const double f = bin_freq(i);
    return std::sqrt(f * (1.0 - f) / n_paths) / (edges[i + 1] - edges[i]);
  }
};

/// Monte Carlo estimate of the law of S_t. Path i uses RandomStream(seed, i);
/// the result is identical for any worker count (0 = hardware concurrency).
inline EmpiricalLaw estimate_law(const TrialScheme& scheme, const IntertimeModel& model, const MotionParams& m,
                                 double t, std::uint64_t n_paths, unsigned bins, std::uint64_t seed,
                                 unsigned workers = 1) {
  m.validate();
  detail::require(n_paths >= 1 && bins >= 1, "estimate_law: n_paths and bins must be at least 1");
  detail::require(t > 0, "estimate_law: t must be positive");
  EmpiricalLaw law;
  law.n_paths = n_paths;
  law.t = t;
  law.motion = m;
  const double lo = -m.v * t, hi = m.c * t, width = (hi - lo) / bins;
  law.edges.resize(bins + 1);
  for (unsigned i = 0; i <= bins; ++i) law.edges[i] = lo + width * i;
  law.edges[bins] = hi;

  struct Block {
    std::uint64_t plus = 0, minus = 0;
    std::vector<std::uint64_t> counts;
  };
  const auto blocks = detail::run_blocks<Block>(n_paths, workers, [&](std::uint64_t from, std::uint64_t to) {
    Block b;
    b.counts.assign(bins, 0);
    for (std::uint64_t i = from; i < to; ++i) {
      auto rng = detail::path_stream(seed, i);
      const auto e = detail::run_path(scheme, model, t, rng, std::nullopt, [](double, Direction, double) {});
      // atoms: no period at all in the opposite direction
      if (e.backward_periods == 0) {
        ++b.plus;
      } else if (e.forward_periods == 0) {
        ++b.minus;
      } else {
        const double x = detail::position(m, e.forward_time, t);
        const auto k = static_cast<long>(std::floor((x - lo) / width));
        ++b.counts[std::clamp<long>(k, 0, bins - 1)];
      }
    }
    return b;
  });
  law.counts.assign(bins, 0);
  for (const auto& b : blocks) {
    law.atom_plus += b.plus;
    law.atom_minus += b.minus;
    for (unsigned i = 0; i < bins; ++i) law.counts[i] += b.counts[i];
  }
  return law;
}

struct MeanEstimate {
  double mean;
  double std_err;
};

/// Sample mean of V_t over paths started with X_1 forced to `initial`.
inline MeanEstimate estimate_mean_velocity(const TrialScheme& scheme, const IntertimeModel& model,
                                           const MotionParams& m, double t, std::uint64_t n_paths,
                                           Direction initial, std::uint64_t seed, unsigned workers = 1) {
  m.validate();
  detail::require(n_paths >= 2, "estimate_mean_velocity: need at least two paths");
  const auto blocks = detail::run_blocks<std::uint64_t>(n_paths, workers, [&](std::uint64_t from, std::uint64_t to) {
    std::uint64_t forward = 0;
    for (std::uint64_t i = from; i < to; ++i) {
      auto rng = detail::path_stream(seed, i);
      const auto e = detail::run_path(scheme, model, t, rng, initial, [](double, Direction, double) {});
      forward += e.velocity == Direction::forward;
    }
    return forward;
  });
  std::uint64_t forward = 0;
  for (auto f : blocks) forward += f;
  // V_t takes two values, so the sample variance follows from the proportion
  const double n = static_cast<double>(n_paths);
  const double q = forward / n;
  const double mean = m.c * q - m.v * (1.0 - q);
  const double var = (m.c + m.v) * (m.c + m.v) * q * (1.0 - q) * n / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

/// Sample mean of S_t (unconditioned).
inline MeanEstimate estimate_mean_position(const TrialScheme& scheme, const IntertimeModel& model,
                                           const MotionParams& m, double t, std::uint64_t n_paths,
                                           std::uint64_t seed, unsigned workers = 1) {
  m.validate();
  detail::require(n_paths >= 2, "estimate_mean_position: need at least two paths");
  struct Block {
    double n = 0, mean = 0, m2 = 0;
  };
  const auto blocks = detail::run_blocks<Block>(n_paths, workers, [&](std::uint64_t from, std::uint64_t to) {
    Block b;
    for (std::uint64_t i = from; i < to; ++i) {
      auto rng = detail::path_stream(seed, i);
      const auto e = detail::run_path(scheme, model, t, rng, std::nullopt, [](double, Direction, double) {});
      const double x = detail::position(m, e.forward_time, t);
      b.n += 1;
      const double d = x - b.mean;
      b.mean += d / b.n;
      b.m2 += d * (x - b.mean);
    }
    return b;
  });
  // Chan et al. pairwise merge, in block order
  Block all;
  for (const auto& b : blocks) {
    const double n = all.n + b.n;
    const double d = b.mean - all.mean;
    all.mean += d * b.n / n;
    all.m2 += b.m2 + d * d * all.n * b.n / n;
    all.n = n;
  }
  return {all.mean, std::sqrt(all.m2 / (all.n - 1.0) / all.n)};
}

}  // namespace telegraph
