#pragma once

#include <cmath>
#include <string_view>

#include "telegraph/errors.hpp"

namespace telegraph {

/// Sign of the velocity: forward (+c) or backward (-v).
enum class Direction { forward, backward };

constexpr Direction opposite(Direction d) {
  return d == Direction::forward ? Direction::backward : Direction::forward;
}

constexpr std::string_view to_string(Direction d) { return d == Direction::forward ? "c" : "-v"; }

/// The two speeds; the particle moves at +c or -v.
struct MotionParams {
  double c = 1.0;
  double v = 1.0;

  void validate() const {
    detail::require(c > 0 && v > 0 && std::isfinite(c) && std::isfinite(v),
                    "MotionParams: c and v must be positive and finite");
  }
  double velocity(Direction d) const { return d == Direction::forward ? c : -v; }
  MotionParams mirrored() const { return {v, c}; }
};

/// Total forward time needed to sit at x at time t: (v t + x)/(c + v).
inline double tau_star(const MotionParams& m, double x, double t) { return (m.v * t + x) / (m.c + m.v); }

}  // namespace telegraph
