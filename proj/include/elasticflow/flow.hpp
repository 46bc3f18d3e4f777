#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elasticflow/banded.hpp"
#include "elasticflow/boundary.hpp"
#include "elasticflow/dual.hpp"
#include "elasticflow/energy.hpp"
#include "elasticflow/geometry.hpp"

namespace elasticflow {

enum class Scheme { SemiImplicit, Explicit };
enum class VelocityMode { DeTurck, InterpolatedLambda };

inline const char* to_string(Scheme s) { return s == Scheme::SemiImplicit ? "semi_implicit" : "explicit"; }
inline const char* to_string(VelocityMode v) {
  return v == VelocityMode::DeTurck ? "deturck" : "interpolated_lambda";
}

struct FlowConfig {
  double mu = 1.0;
  std::size_t n_grid = 128;
  double dt = 1e-5;
  Scheme scheme = Scheme::SemiImplicit;
  double t_max = 1.0;
  VelocityMode velocity_mode = VelocityMode::DeTurck;
  double rho_min = 0.05;
  double length_min = 0.05;
  double el_tol = 1e-4;
  double bc_tol = 1e-6;
  std::size_t record_every = 10;
  // explicit scheme: dt <= c_stab (h min|d_x gamma|)^4 / 2
  double c_stab = 0.1;
  bool override_admissibility = false;
  bool with_ds6 = false;
  // reset to constant speed when the discrete speed leaves [1/2, 2] x its
  // profile at the last (re)start, instead of failing the step
  bool restart_on_speed_drift = true;

  void validate() const {
    auto need = [](bool ok, const char* key) {
      if (!ok) throw Error(ErrorKind::InvalidValue, key);
    };
    need(mu > 0.0 && std::isfinite(mu), "mu");
    need(n_grid >= 16, "n_grid");
    need(dt > 0.0 && std::isfinite(dt), "dt");
    need(t_max >= 0.0, "t_max");
    need(rho_min > 0.0, "rho_min");
    need(length_min > 0.0, "length_min");
    need(el_tol > 0.0, "el_tol");
    need(bc_tol > 0.0, "bc_tol");
    need(record_every >= 1, "record_every");
    need(c_stab > 0.0 && c_stab <= 0.5, "c_stab");
  }
};

/// In interpolated_lambda mode `curve` is the DeTurck solution `gauge`
/// evaluated at the parameters `params`; in deturck mode both are empty.
struct FlowState {
  double time = 0.0;
  DiscreteCurve curve;
  std::size_t step_index = 0;
  std::optional<DiscreteCurve> gauge;
  std::vector<double> params;

  /// The curve the scheme advances.
  const DiscreteCurve& evolved() const { return gauge ? *gauge : curve; }
};

/// Rows of the discrete evolution equation: nodes 2..N-2. The two nodes at
/// each end are fixed by the boundary rows.
inline constexpr std::size_t kFirstPdeNode = 2;
inline std::size_t last_pde_node(std::size_t n) { return n - 2; }

/// Full DeTurck right-hand side at every node (one-sided differences at the ends).
inline std::vector<Point> deturck_velocity(const DiscreteCurve& curve, double mu) {
  if (curve.intervals() < 16) throw Error(ErrorKind::StencilTooWide, "deturck_velocity needs N >= 16");
  const auto geom = compute_geometry(curve, 0);  // regularity
  const std::span<const Point> nodes(curve.nodes());
  std::vector<Point> v(curve.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = deturck_from_jets(jets_at(nodes, i), mu);
  return v;
}

/// Tangential part <F, tau> of the DeTurck field.
inline std::vector<double> deturck_tangential(const DiscreteCurve& curve, const GeometricQuantities& geom,
                                              double mu) {
  const auto f = deturck_velocity(curve, mu);
  std::vector<double> t(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) t[i] = dot(f[i], geom.tangent[i]);
  return t;
}

/// V nu + Lambda~ tau with V from the curvature derivatives and Lambda~ the
/// DeTurck tangential velocity. Algebraically equal to deturck_velocity; this
/// form has V = 0 exactly at discrete equilibria.
inline std::vector<Point> split_velocity(const DiscreteCurve& curve, double mu) {
  const auto geom = compute_geometry(curve, 2);
  const auto v = normal_velocity(geom, mu);
  const auto lt = deturck_tangential(curve, geom, mu);
  std::vector<Point> out(curve.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = geom.normal[i] * v[i] + geom.tangent[i] * lt[i];
  return out;
}

/// Signed boundary rows (attachment, (d_x^2 gamma)_1, (d_x^2 gamma)_2,
/// third-order condition) at both ends.
inline std::array<std::array<double, 4>, 2> boundary_residuals(const DiscreteCurve& curve, double mu) {
  const std::span<const Point> nodes(curve.nodes());
  return {boundary_rows(nodes, Side::Left, mu), boundary_rows(nodes, Side::Right, mu)};
}

/// Nodes whose coordinates enter the boundary rows of one end.
inline std::array<std::size_t, 6> boundary_support(Side side, std::size_t n) {
  if (side == Side::Left) return {0, 1, 2, 3, 4, 5};
  return {n - 5, n - 4, n - 3, n - 2, n - 1, n};
}

/// d(boundary row)/d(coordinate) for the six nodes at one end, by forward-mode
/// differentiation. jac[r][2q + c] is the derivative of row r with respect to
/// component c of node support[q].
inline std::array<std::array<double, 12>, 4> boundary_jacobian(const DiscreteCurve& curve, Side side, double mu) {
  const std::size_t n = curve.intervals();
  const auto support = boundary_support(side, n);
  std::vector<Vec2<Dual>> d(curve.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = {Dual(curve[i].x), Dual(curve[i].y)};
  std::array<std::array<double, 12>, 4> jac{};
  for (std::size_t q = 0; q < 6; ++q) {
    for (int c = 0; c < 2; ++c) {
      auto& slot = d[support[q]][c];
      slot.d = 1.0;
      const auto r = boundary_rows(std::span<const Vec2<Dual>>(d), side, mu);
      for (std::size_t k = 0; k < 4; ++k) jac[k][2 * q + static_cast<std::size_t>(c)] = r[k].d;
      slot.d = 0.0;
    }
  }
  return jac;
}

/// Extra terms for manufactured-solution runs: an interior source added to the
/// velocity and nonzero targets for the boundary rows.
struct Forcing {
  std::vector<Point> interior;                   // per node
  std::array<std::array<double, 4>, 2> targets{};  // boundary row targets at t_{n+1}
};

struct LinearSystem {
  BandedMatrix matrix;
  std::vector<double> rhs;
  std::size_t boundary_rows = 0;
};

namespace detail {
inline constexpr std::size_t kHalfBand = 9;
}

/// One semi-implicit step as a linear system for z = (x_0, y_0, x_1, y_1, ...).
/// Rows 2i, 2i+1 for i = 2..N-2:
///   z + dt (2/s_i^4) D_x^4 z = z^n + dt (F(gamma^n) + (2/s_i^4) D_x^4 z^n + f)
/// with s_i the speed of gamma^n and F the split DeTurck field. The other eight
/// rows are the boundary conditions; the third-order row is linearized about
/// gamma^n.
///
/// `linearization`, when given, replaces gamma^n as the expansion point of the
/// third-order rows (used to iterate those rows to convergence within a step).
inline LinearSystem assemble_implicit_system(const DiscreteCurve& prev, double dt, double mu,
                                             const Forcing* forcing = nullptr,
                                             const DiscreteCurve* linearization = nullptr) {
  const std::size_t n = prev.intervals();
  if (n < 16) throw Error(ErrorKind::StencilTooWide, "the implicit system needs N >= 16");
  const std::size_t m = 2 * (n + 1);
  const auto geom = compute_geometry(prev, 2);
  const auto field = split_velocity(prev, mu);
  LinearSystem sys{BandedMatrix(m, detail::kHalfBand, detail::kHalfBand), std::vector<double>(m, 0.0), 0};
  auto& a = sys.matrix;
  auto& b = sys.rhs;
  const double h4 = inverse_power(prev.h(), 4);
  const Stencil& d4 = stencil_at(4, n / 2, n);  // centred five-point

  for (std::size_t i = kFirstPdeNode; i <= last_pde_node(n); ++i) {
    const double s = geom.speed[i];
    const double coef = dt * 2.0 / (s * s * s * s) * h4;
    for (int c = 0; c < 2; ++c) {
      const std::size_t row = 2 * i + static_cast<std::size_t>(c);
      double lz = 0.0;
      for (int q = 0; q < d4.count; ++q) {
        const std::size_t node = static_cast<std::size_t>(static_cast<long>(i) + d4.first + q);
        a.at(row, 2 * node + static_cast<std::size_t>(c)) += coef * d4.w[static_cast<std::size_t>(q)];
        lz += d4.w[static_cast<std::size_t>(q)] * prev[node][c];
      }
      a.at(row, row) += 1.0;
      double f = field[i][c];
      if (forcing) f += forcing->interior[i][c];
      b[row] = prev[i][c] + dt * f + coef * lz;
    }
  }

  // Boundary rows. Left: rows 0..3; right: rows m-4..m-1 in reverse order so
  // that each row sits next to the unknowns it touches.
  const double h2 = inverse_power(prev.h(), 2);
  const Stencil& d2l = stencil_at(2, 0, n);
  const Stencil& d2r = stencil_at(2, n, n);
  const DiscreteCurve& lin = linearization ? *linearization : prev;
  const auto res = boundary_residuals(lin, mu);
  for (int e = 0; e < 2; ++e) {
    const Side side = static_cast<Side>(e);
    const std::size_t end = endpoint_index(side, n);
    const std::array<std::size_t, 4> rows =
        side == Side::Left ? std::array<std::size_t, 4>{0, 1, 2, 3} : std::array<std::size_t, 4>{m - 1, m - 3, m - 2, m - 4};
    std::array<double, 4> target{};
    if (forcing) target = forcing->targets[static_cast<std::size_t>(e)];
    // attachment
    a.at(rows[0], 2 * end + 1) = 1.0;
    b[rows[0]] = target[0];
    // second-order, one component each
    const Stencil& d2 = side == Side::Left ? d2l : d2r;
    for (int c = 0; c < 2; ++c) {
      const std::size_t row = rows[1 + static_cast<std::size_t>(c)];
      for (int q = 0; q < d2.count; ++q) {
        const std::size_t node = static_cast<std::size_t>(static_cast<long>(end) + d2.first + q);
        a.at(row, 2 * node + static_cast<std::size_t>(c)) += d2.w[static_cast<std::size_t>(q)] * h2;
      }
      b[row] = target[1 + static_cast<std::size_t>(c)];
    }
    // third-order: R(z^n) + J (z - z^n) = target
    const auto jac = boundary_jacobian(lin, side, mu);
    const auto support = boundary_support(side, n);
    double jz = 0.0;
    for (std::size_t q = 0; q < 6; ++q) {
      for (int c = 0; c < 2; ++c) {
        const double w = jac[3][2 * q + static_cast<std::size_t>(c)];
        if (w == 0.0) continue;
        a.at(rows[3], 2 * support[q] + static_cast<std::size_t>(c)) += w;
        jz += w * lin[support[q]][c];
      }
    }
    b[rows[3]] = target[3] - res[static_cast<std::size_t>(e)][3] + jz;
    sys.boundary_rows += kRowsPerEndpoint;
  }
  if (sys.boundary_rows != 2 * kRowsPerEndpoint || 2 * (last_pde_node(n) - kFirstPdeNode + 1) + sys.boundary_rows != m)
    throw Error(ErrorKind::InvalidValue, "boundary row count does not close the system");
  return sys;
}

inline DiscreteCurve unpack(const std::vector<double>& z) {
  std::vector<Point> nodes(z.size() / 2);
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = {z[2 * i], z[2 * i + 1]};
  return DiscreteCurve(std::move(nodes));
}

/// Largest third-order row mismatch |R - target| over both ends.
inline double third_order_mismatch(const DiscreteCurve& curve, double mu, const Forcing* forcing) {
  const auto r = boundary_residuals(curve, mu);
  double m = 0.0;
  for (std::size_t e = 0; e < 2; ++e) m = std::max(m, std::abs(r[e][3] - (forcing ? forcing->targets[e][3] : 0.0)));
  return m;
}

/// One semi-implicit step. The third-order rows are re-linearized about the
/// new iterate until they hold to `bc_tol` (at most `kBoundaryIterations`
/// solves); the interior rows always use the coefficients of gamma^n.
inline constexpr int kBoundaryIterations = 8;

namespace detail {

/// Solve with one round of iterative refinement. The attachment rows have unit
/// coefficients next to O(dt N^4) interior rows; refinement keeps their
/// residual at roundoff of the node values rather than of the largest entries.
inline DiscreteCurve solve_step(const LinearSystem& sys) {
  auto z = sys.matrix.solve(sys.rhs);
  auto r = sys.matrix.multiply(z);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = sys.rhs[i] - r[i];
  const auto dz = sys.matrix.solve(r);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += dz[i];
  return unpack(z);
}

}  // namespace detail

inline FlowState step_semi_implicit(const FlowState& state, const FlowConfig& config,
                                    const Forcing* forcing = nullptr) {
  auto sys = assemble_implicit_system(state.curve, config.dt, config.mu, forcing);
  DiscreteCurve next = detail::solve_step(sys);
  compute_geometry(next, 0);  // regularity
  for (int it = 1; it < kBoundaryIterations && third_order_mismatch(next, config.mu, forcing) > 0.1 * config.bc_tol;
       ++it) {
    sys = assemble_implicit_system(state.curve, config.dt, config.mu, forcing, &next);
    next = detail::solve_step(sys);
    compute_geometry(next, 0);
  }
  return {state.time + config.dt, std::move(next), state.step_index + 1, std::nullopt, {}};
}

/// Largest stable forward-Euler step for the current curve.
inline double explicit_dt_bound(const DiscreteCurve& curve, double c_stab) {
  const auto geom = compute_geometry(curve, 0);
  double smin = geom.speed[0];
  for (double s : geom.speed) smin = std::min(smin, s);
  const double q = curve.h() * smin;
  return c_stab * q * q * q * q / 2.0;
}

/// Move the two nodes at each end so the four boundary rows hold (Newton with
/// the exact Jacobian; the rows only couple nodes near one end).
inline void project_boundary(DiscreteCurve& curve, double mu, int max_iter = 20) {
  const std::size_t n = curve.intervals();
  for (int e = 0; e < 2; ++e) {
    const Side side = static_cast<Side>(e);
    const auto support = boundary_support(side, n);
    // local unknowns: the endpoint and its neighbour
    const std::array<std::size_t, 2> q_of = side == Side::Left ? std::array<std::size_t, 2>{0, 1}
                                                               : std::array<std::size_t, 2>{5, 4};
    for (int it = 0; it < max_iter; ++it) {
      const auto r = boundary_rows(std::span<const Point>(curve.nodes()), side, mu);
      double rn = 0.0;
      for (double x : r) rn = std::max(rn, std::abs(x));
      if (rn < 1e-13) break;
      const auto jac = boundary_jacobian(curve, side, mu);
      BandedMatrix a(4, 3, 3);
      for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t u = 0; u < 4; ++u) a.at(k, u) = jac[k][2 * q_of[u / 2] + u % 2];
      const auto dz = a.solve({-r[0], -r[1], -r[2], -r[3]});
      for (std::size_t u = 0; u < 4; ++u) curve[support[q_of[u / 2]]][static_cast<int>(u % 2)] += dz[u];
    }
  }
}

inline FlowState step_explicit(const FlowState& state, const FlowConfig& config) {
  const double bound = explicit_dt_bound(state.curve, config.c_stab);
  if (config.dt > bound)
    throw Error(ErrorKind::StabilityViolation,
                "dt = " + std::to_string(config.dt) + " exceeds the explicit bound " + std::to_string(bound));
  const std::size_t n = state.curve.intervals();
  const auto f = split_velocity(state.curve, config.mu);
  DiscreteCurve next = state.curve;
  for (std::size_t i = kFirstPdeNode; i <= last_pde_node(n); ++i) next[i] += f[i] * config.dt;
  project_boundary(next, config.mu);
  compute_geometry(next, 0);
  return {state.time + config.dt, std::move(next), state.step_index + 1, std::nullopt, {}};
}

/// Lambda(y) = 2 d_s^2 k(y) nu_2(y) / tau_2(y) at both ends.
inline std::array<double, 2> boundary_lambda(const GeometricQuantities& geom, double rho_min) {
  std::array<double, 2> out{};
  const std::size_t n = geom.size() - 1;
  for (int e = 0; e < 2; ++e) {
    const std::size_t i = endpoint_index(static_cast<Side>(e), n);
    const double t2 = geom.tangent[i].y;
    if (!(t2 >= rho_min))
      throw Error(ErrorKind::DegenerateBoundary,
                  "tau_2 = " + std::to_string(t2) + " at endpoint " + std::to_string(e));
    out[static_cast<std::size_t>(e)] = 2.0 * geom.ds(2)[i] * geom.normal[i].y / t2;
  }
  return out;
}

/// Lambda = lambda0 + (lambda1 - lambda0) s / l, affine in arclength.
inline std::vector<double> interpolated_lambda(const GeometricQuantities& geom, double lambda0, double lambda1) {
  const auto s = cumulative_arclength(geom);
  const double len = s.back();
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = lambda0 + (lambda1 - lambda0) * (s[i] / len);
  out.front() = lambda0;
  out.back() = lambda1;
  return out;
}

/// Move the nodes of `moved` (gamma^n advanced by a DeTurck step) along the
/// curve so that the tangential motion over the step is the interpolated
/// Lambda of `prev` instead of the DeTurck one. The point set is kept: new
/// positions are read off a six-point interpolant in the grid parameter.
/// Evaluate a curve at the given parameters.
inline DiscreteCurve present(const DiscreteCurve& curve, const std::vector<double>& params) {
  std::vector<Point> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out[i] = lagrange_at(curve, params[i]);
  return DiscreteCurve(std::move(out));
}

/// Advance the presentation parameters over one step of the evolved curve
/// from `prev` to `next`, so that the presented nodes move tangentially with
/// Lambda affine in arclength between the endpoint values of the step.
///
/// Each presented node sits on the material point params[i] of the evolved
/// curve; it is shifted along `next` by dt (Lambda_interp - Lambda_step),
/// where Lambda_step is the tangential velocity of that material point. The
/// shift vanishes at both ends, so params stay 0 and 1 there.
inline std::vector<double> retarget_tangential(const DiscreteCurve& prev, const DiscreteCurve& next,
                                               const std::vector<double>& params, double dt) {
  const std::size_t m = params.size() - 1;
  const auto shown = present(prev, params);
  const auto g = compute_geometry(shown, 0);
  std::vector<double> lt(params.size());
  for (std::size_t i = 0; i <= m; ++i)
    lt[i] = dot(lagrange_at(next, params[i]) - shown[i], g.tangent[i]) / dt;
  const auto li = interpolated_lambda(g, lt[0], lt[m]);
  const double eps = 0.25 / static_cast<double>(next.intervals());
  std::vector<double> out(params);
  for (std::size_t i = 1; i < m; ++i) {
    const double p = params[i];
    const double lo = std::max(0.0, p - eps), hi = std::min(1.0, p + eps);
    const double speed = norm(lagrange_at(next, hi) - lagrange_at(next, lo)) / (hi - lo);
    out[i] = p + dt * (li[i] - lt[i]) / speed;
    if (!(out[i] > out[i - 1] && out[i] < 1.0))
      throw Error(ErrorKind::NonRegularCurve, "presentation parameters lost monotonicity at node " + std::to_string(i));
  }
  return out;
}

}  // namespace elasticflow
