#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "elasticflow/geometry.hpp"
#include "elasticflow/stencils.hpp"
#include "elasticflow/types.hpp"

namespace elasticflow {

enum class Side { Left = 0, Right = 1 };

inline std::size_t endpoint_index(Side side, std::size_t n) { return side == Side::Left ? 0 : n; }

/// Right-hand side of the non-degenerate (DeTurck) motion equation written in
/// terms of the parameter derivatives of gamma.
template <typename T>
Vec2<T> deturck_from_jets(const Jets<T>& j, double mu) {
  const T s2 = dot(j.d1, j.d1);
  const T s4 = s2 * s2;
  const T s6 = s4 * s2;
  const T s8 = s4 * s4;
  const T a = dot(j.d2, j.d1);
  const T b = dot(j.d2, j.d2);
  const T c = dot(j.d3, j.d1);
  return j.d4 * (-2.0 / s4) + j.d3 * (12.0 * a / s6) + j.d2 * (5.0 * b / s6) + j.d2 * (8.0 * c / s6) -
         j.d2 * (35.0 * a * a / s8) + j.d2 * (mu / s2);
}

/// Signed third-order Navier residual (-2 d_s k nu + mu tau)_1.
template <typename T>
T third_order_from_jets(const Jets<T>& j, double mu) {
  using std::sqrt;
  const T s = sqrt(dot(j.d1, j.d1));
  const Vec2<T> tau = j.d1 / s;
  const Vec2<T> nu = rotate_ccw(tau);
  return -2.0 * curvature_from_jets(j)[1] * nu.x + mu * tau.x;
}

/// The four analytic boundary rows at one endpoint, in the order
/// attachment gamma_2, (d_x^2 gamma)_1, (d_x^2 gamma)_2, third-order condition.
template <typename T>
std::array<T, 4> boundary_rows(std::span<const Vec2<T>> nodes, Side side, double mu) {
  const std::size_t e = endpoint_index(side, nodes.size() - 1);
  const auto j = jets_at(nodes, e);
  return {nodes[e].y, j.d2.x, j.d2.y, third_order_from_jets(j, mu)};
}

/// Number of scalar boundary conditions per endpoint for a fourth-order
/// system in two components.
inline constexpr std::size_t kRowsPerEndpoint = 4;

}  // namespace elasticflow
