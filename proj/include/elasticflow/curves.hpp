#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "elasticflow/types.hpp"

namespace elasticflow {

/// Sample a parametrization on the uniform grid x_i = i/N.
inline DiscreteCurve sample_curve(const std::function<Point(double)>& gamma, std::size_t n) {
  std::vector<Point> nodes(n + 1);
  for (std::size_t i = 0; i <= n; ++i) nodes[i] = gamma(static_cast<double>(i) / static_cast<double>(n));
  return DiscreteCurve(std::move(nodes));
}

/// (L x, 0). Flat tangent at the ends: fails non-degeneracy and, for mu > 0,
/// the third-order condition.
inline DiscreteCurve segment_curve(double length, std::size_t n) {
  return sample_curve([=](double x) { return Point{length * x, 0.0}; }, n);
}

/// (r cos(pi x), r sin(pi x)), from (r, 0) to (-r, 0). Fails the curvature
/// condition; tau_2 = -1 at x = 1.
inline DiscreteCurve semicircle_curve(double r, std::size_t n) {
  return sample_curve(
      [=](double x) { return Point{r * std::cos(std::numbers::pi * x), r * std::sin(std::numbers::pi * x)}; }, n);
}

/// Graph of A sin(2 pi p x) over [0, 1]. Attached, curvature-free and
/// non-degenerate at both ends (for integer p); the third-order condition
/// holds only for special A.
inline DiscreteCurve sine_arch_curve(double amplitude, double periods, std::size_t n) {
  const double w = 2.0 * std::numbers::pi * periods;
  return sample_curve([=](double x) { return Point{x, amplitude * std::sin(w * x)}; }, n);
}

}  // namespace elasticflow
