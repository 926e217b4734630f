#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "telegraph/errors.hpp"

namespace telegraph {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  std::size_t max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (15/31) on [a, b]: the interval with the
/// largest error estimate is bisected until the total estimate meets
/// max(abs_tol, rel_tol*|value|). Throws numeric_error on failure.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  using gauss = boost::math::quadrature::gauss<double, 15>;
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  QuadratureResult out;
  if (a == b) return out;
  detail::require(std::isfinite(a) && std::isfinite(b), "integrate: bounds must be finite");

  // 31-point Kronrod with embedded 15-point Gauss; even abscissa indices are Gauss nodes.
  const auto& x = rule::abscissa();
  const auto& wk = rule::weights();
  const auto& wg = gauss::weights();
  auto eval = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f0 = f(mid);
    double k = f0 * wk[0];
    double g = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double pair = f(mid + half * x[i]) + f(mid - half * x[i]);
      k += pair * wk[i];
      if (i % 2 == 0) g += pair * wg[i / 2];
    }
    g += f0 * wg[0];
    const double v = half * k;
    const double err = std::max(half * std::abs(k - g), 50.0 * std::numeric_limits<double>::epsilon() * std::abs(v));
    if (!std::isfinite(v)) throw numeric_error("integrate: non-finite integrand value");
    return Piece{lo, hi, v, err};
  };

  std::priority_queue<Piece> heap;
  Piece first = eval(a, b);
  heap.push(first);
  double total = first.value;
  double total_err = first.error;
  std::size_t count = 1;
  while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (count >= opt.max_intervals)
      throw numeric_error("integrate: tolerance not met, error estimate " + std::to_string(total_err));
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw numeric_error("integrate: interval cannot be subdivided further");
    Piece left = eval(worst.a, mid);
    Piece right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // re-add to shed accumulated rounding from the running updates
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  out.intervals = count;
  return out;
}

/// Integral over [a, b] with breakpoints; each sub-interval gets the same options.
template <class F>
double integrate_pieces(F&& f, const std::vector<double>& nodes, const QuadratureOptions& opt = {}) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) s += integrate(f, nodes[i], nodes[i + 1], opt).value;
  return s;
}

}  // namespace telegraph
