#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "elasticflow/types.hpp"

namespace elasticflow {

/// Finite-difference weights for the m-th derivative at z from the nodes xs
/// (Fornberg's recursion). Returned weights are for unit node spacing.
inline std::vector<double> fornberg_weights(double z, std::span<const double> xs, int m) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

/// A stencil on consecutive grid nodes first..first+count-1, weights for unit spacing.
struct Stencil {
  int first = 0;  // offset of the first node relative to the evaluation node
  int count = 0;
  std::array<double, 6> w{};
};

namespace detail {

inline Stencil make_stencil(int first, int count, int order) {
  std::vector<double> xs(count);
  for (int k = 0; k < count; ++k) xs[k] = first + k;
  const auto weights = fornberg_weights(0.0, xs, order);
  Stencil s{first, count, {}};
  for (int k = 0; k < count; ++k) s.w[k] = weights[k];
  return s;
}

inline Stencil mirror(const Stencil& s, int order) {
  Stencil m{-(s.first + s.count - 1), s.count, {}};
  const double sign = (order % 2 == 1) ? -1.0 : 1.0;
  for (int q = 0; q < s.count; ++q) m.w[q] = sign * s.w[s.count - 1 - q];
  return m;
}

inline int half_width(int order) { return order <= 2 ? 1 : 2; }

/// Second-order stencils: centred in the interior, one-sided near the ends.
struct StencilTable {
  std::array<Stencil, 5> centred;                // by derivative order 1..4
  std::array<std::array<Stencil, 2>, 5> left;    // [order][node 0 or 1]
  std::array<std::array<Stencil, 2>, 5> right;   // [order][node N or N-1]
  StencilTable() {
    centred[1] = make_stencil(-1, 3, 1);
    centred[2] = make_stencil(-1, 3, 2);
    centred[3] = make_stencil(-2, 5, 3);
    centred[4] = make_stencil(-2, 5, 4);
    left[1][0] = make_stencil(0, 3, 1);
    left[2][0] = make_stencil(0, 4, 2);
    left[3][0] = make_stencil(0, 5, 3);
    left[3][1] = make_stencil(-1, 5, 3);
    left[4][0] = make_stencil(0, 6, 4);
    left[4][1] = make_stencil(-1, 6, 4);
    for (int o = 1; o <= 4; ++o)
      for (int k = 0; k < half_width(o); ++k) right[o][k] = mirror(left[o][k], o);
  }
};

inline const StencilTable& stencil_table() {
  static const StencilTable table;
  return table;
}

}  // namespace detail

/// Stencil for the derivative of the given order (1..4) at node i of an
/// (n+1)-node grid.
inline const Stencil& stencil_at(int order, std::size_t i, std::size_t n) {
  const auto& t = detail::stencil_table();
  const auto hw = static_cast<std::size_t>(detail::half_width(order));
  if (i < hw) return t.left[order][i];
  if (i + hw > n) return t.right[order][n - i];
  return t.centred[order];
}

/// Apply a stencil at node i; V needs V + V and V * double.
template <typename V>
V apply_stencil(const Stencil& s, std::span<const V> f, std::size_t i, double scale) {
  const auto base = static_cast<std::size_t>(static_cast<long>(i) + s.first);
  V acc = f[base] * (s.w[0] * scale);
  for (int q = 1; q < s.count; ++q) acc = acc + f[base + static_cast<std::size_t>(q)] * (s.w[q] * scale);
  return acc;
}

inline double inverse_power(double h, int order) {
  double r = 1.0;
  for (int k = 0; k < order; ++k) r /= h;
  return r;
}

/// d^order/dx^order on the uniform grid of spacing h, second order everywhere.
template <typename V>
std::vector<V> differentiate(std::span<const V> f, int order, double h) {
  const std::size_t n = f.size() - 1;
  const double scale = inverse_power(h, order);
  std::vector<V> out(f.size());
  for (std::size_t i = 0; i <= n; ++i) out[i] = apply_stencil(stencil_at(order, i, n), f, i, scale);
  return out;
}

template <typename V>
V derivative_at(std::span<const V> f, int order, std::size_t i, double h) {
  return apply_stencil(stencil_at(order, i, f.size() - 1), f, i, inverse_power(h, order));
}

}  // namespace elasticflow
