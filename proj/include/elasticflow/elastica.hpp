#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "elasticflow/banded.hpp"
#include "elasticflow/boundary.hpp"
#include "elasticflow/dual.hpp"
#include "elasticflow/flow.hpp"
#include "elasticflow/geometry.hpp"
#include "elasticflow/stencils.hpp"

namespace elasticflow {

/// 2 d_s^2 k + k^3 - mu k per node, that is -V.
inline std::vector<double> el_residual(const GeometricQuantities& geom, double mu) {
  const auto& k = geom.ds(0);
  const auto& k2 = geom.ds(2);
  std::vector<double> out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = 2.0 * k2[i] + k[i] * k[i] * k[i] - mu * k[i];
  return out;
}

struct ElasticaReport {
  double interior_residual = 0.0;
  std::array<std::array<double, 4>, 2> boundary_residuals{};
  bool converged = false;
  int newton_iterations = 0;
  // max-norm of the full stacked system before each iteration and at exit
  std::vector<double> residual_history;
};

/// Stacked elastica system, one row per unknown, laid out like the implicit
/// flow system: rows 0..3 the left boundary rows, rows 2i and 2i+1 at node
/// i = 2..N-2 the Euler-Lagrange residual and the gauge row, the last four
/// rows the right boundary rows. The gauge row N^2 (|c_i|^2 - |c_{i-1}|^2)
/// with c_i = gamma_{i+1} - gamma_i makes the interior chords equal.
///
/// The problem is invariant under translation along the axis, and along a
/// solution of the interior equation the third-order condition at one end
/// implies it at the other. So the right third-order row is replaced by
/// x_N - anchor_x, which removes the translation.
template <typename T>
std::vector<T> elastica_rows(std::span<const Vec2<T>> nodes, double mu, double anchor_x) {
  const std::size_t n = nodes.size() - 1;
  const std::size_t m = 2 * (n + 1);
  const auto g = compute_geometry_t<T>(nodes, 2);
  std::vector<T> rows(m);
  const auto left = boundary_rows<T>(nodes, Side::Left, mu);
  for (std::size_t r = 0; r < 4; ++r) rows[r] = left[r];
  const double scale = static_cast<double>(n) * static_cast<double>(n);
  for (std::size_t i = kFirstPdeNode; i <= last_pde_node(n); ++i) {
    const T& k = g.ds(0)[i];
    rows[2 * i] = 2.0 * g.ds(2)[i] + k * k * k - mu * k;
    const Vec2<T> c1 = nodes[i + 1] - nodes[i];
    const Vec2<T> c0 = nodes[i] - nodes[i - 1];
    rows[2 * i + 1] = scale * (dot(c1, c1) - dot(c0, c0));
  }
  const auto right = boundary_rows<T>(nodes, Side::Right, mu);
  rows[m - 1] = right[0];
  rows[m - 3] = right[1];
  rows[m - 2] = right[2];
  rows[m - 4] = nodes[n].x - anchor_x;
  return rows;
}

namespace detail {

/// Node reach of any row of elastica_rows; rows at node i depend on nodes
/// i - kElasticaReach .. i + kElasticaReach at most.
inline constexpr std::size_t kElasticaReach = 6;
inline constexpr std::size_t kElasticaBand = 2 * kElasticaReach + 1;

/// Nodes a row of elastica_rows may depend on.
inline std::pair<std::size_t, std::size_t> row_window(std::size_t row, std::size_t n) {
  const std::size_t m = 2 * (n + 1);
  if (row < 4) return {0, 5};
  if (row >= m - 4) return {n - 5, n};
  const std::size_t i = row / 2;
  return {i >= kElasticaReach ? i - kElasticaReach : 0, std::min(n, i + kElasticaReach)};
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline std::vector<double> values(const std::vector<Dual>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].v;
  return out;
}

inline std::vector<double> elastica_rows(const DiscreteCurve& curve, double mu, double anchor_x) {
  return elasticflow::elastica_rows<double>(curve.nodes(), mu, anchor_x);
}

}  // namespace detail

/// Jacobian of elastica_rows by forward-mode dual numbers. Nodes of equal
/// index modulo 2 kElasticaReach + 1 are seeded together, which is exact
/// because no row reaches two of them.
inline BandedMatrix elastica_jacobian(const DiscreteCurve& curve, double mu, double anchor_x) {
  const std::size_t n = curve.intervals();
  const std::size_t m = 2 * (n + 1);
  const std::size_t colors = detail::kElasticaBand;
  BandedMatrix jac(m, detail::kElasticaBand, detail::kElasticaBand);
  std::vector<Vec2<Dual>> nodes(n + 1);
  for (std::size_t color = 0; color < colors; ++color) {
    for (int comp = 0; comp < 2; ++comp) {
      for (std::size_t j = 0; j <= n; ++j) {
        nodes[j] = {Dual(curve[j].x), Dual(curve[j].y)};
        if (j % colors == color) (comp == 0 ? nodes[j].x.d : nodes[j].y.d) = 1.0;
      }
      const auto rows = elastica_rows<Dual>(std::span<const Vec2<Dual>>(nodes), mu, anchor_x);
      for (std::size_t r = 0; r < m; ++r) {
        const auto [lo, hi] = detail::row_window(r, n);
        const std::size_t j = lo + (color + colors - lo % colors) % colors;
        if (j > hi) continue;
        const std::size_t col = 2 * j + static_cast<std::size_t>(comp);
        if (jac.in_band(r, col)) jac.at(r, col) = rows[r].d;
      }
    }
  }
  return jac;
}

struct NewtonOptions {
  // largest interior residual accepted as a starting point
  double basin = 1e-1;
  // damping halvings tried before giving up on an iteration
  int damping_attempts = 5;
};

/// Damped Newton on elastica_rows. Converged when every row is at most `tol`.
///
/// Throws NewtonDiverged when the start lies outside the basin or when no
/// damped step reduces the residual norm, and SingularJacobian when the
/// linear solve fails.
inline std::pair<DiscreteCurve, ElasticaReport> newton_refine(const DiscreteCurve& curve, double mu, int max_iter,
                                                              double tol, const NewtonOptions& options = {}) {
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidValue, "mu must be positive");
  if (max_iter < 0 || !(tol > 0.0)) throw Error(ErrorKind::InvalidValue, "max_iter and tol must be positive");
  const std::size_t n = curve.intervals();
  DiscreteCurve z = curve;
  const double anchor = curve[n].x;
  auto rows = detail::elastica_rows(z, mu, anchor);
  ElasticaReport report;
  const auto interior = [&](const std::vector<double>& r) {
    double m = 0.0;
    for (std::size_t i = kFirstPdeNode; i <= last_pde_node(n); ++i) m = std::max(m, std::abs(r[2 * i]));
    return m;
  };
  if (interior(rows) > options.basin) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "interior residual %.3e is outside the basin %.3e", interior(rows), options.basin);
    throw Error(ErrorKind::NewtonDiverged, buf);
  }
  report.residual_history.push_back(detail::max_abs(rows));
  while (report.residual_history.back() > tol && report.newton_iterations < max_iter) {
    const auto jac = elastica_jacobian(z, mu, anchor);
    std::vector<double> rhs(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) rhs[r] = -rows[r];
    std::vector<double> dz;
    try {
      dz = jac.solve(rhs);
    } catch (const Error& e) {
      throw Error(ErrorKind::SingularJacobian, e.what());
    }
    const double merit = detail::norm2(rows);
    double alpha = 1.0;
    bool accepted = false;
    for (int attempt = 0; attempt < options.damping_attempts && !accepted; ++attempt, alpha *= 0.5) {
      std::vector<Point> trial = z.nodes();
      for (std::size_t j = 0; j <= n; ++j) trial[j] += Point{dz[2 * j], dz[2 * j + 1]} * alpha;
      try {
        DiscreteCurve candidate(std::move(trial));
        auto r = detail::elastica_rows(candidate, mu, anchor);
        if (detail::norm2(r) < merit) {
          z = std::move(candidate);
          rows = std::move(r);
          accepted = true;
        }
      } catch (const Error&) {
        // a non-regular trial counts as a failed damping attempt
      }
    }
    if (!accepted)
    {
      char buf[160];
      std::snprintf(buf, sizeof buf, "no damped step reduced the residual %.3e at iteration %d",
                    report.residual_history.back(), report.newton_iterations + 1);
      throw Error(ErrorKind::NewtonDiverged, buf);
    }
    ++report.newton_iterations;
    report.residual_history.push_back(detail::max_abs(rows));
  }
  report.interior_residual = interior(rows);
  report.boundary_residuals = boundary_residuals(z, mu);
  report.converged = report.residual_history.back() <= tol;
  return {std::move(z), report};
}

/// d/de E(gamma + e psi) at e = 0 by quadrature of
///   int 2 <k nu, d_s^2 psi> + (mu - 3 k^2) <tau, d_s psi> ds.
inline double first_variation(const DiscreteCurve& curve, double mu, std::span<const Point> psi) {
  if (psi.size() != curve.size()) throw Error(ErrorKind::LengthMismatch, "psi must have one value per node");
  const auto g = compute_geometry(curve, 0);
  const double h = g.h;
  const auto p1 = differentiate<Point>(psi, 1, h);
  const auto p2 = differentiate<Point>(psi, 2, h);
  const auto s1 = differentiate<double>(g.speed, 1, h);
  std::vector<double> f(curve.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = g.speed[i];
    const double k = g.curvature()[i];
    const Point dpsi = p1[i] / s;
    const Point d2psi = (p2[i] - p1[i] * (s1[i] / s)) / (s * s);
    f[i] = 2.0 * k * dot(g.normal[i], d2psi) + (mu - 3.0 * k * k) * dot(g.tangent[i], dpsi);
  }
  return arclength_integrate<double>(f, g);
}

}  // namespace elasticflow
