#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "elasticflow/boundary.hpp"
#include "elasticflow/geometry.hpp"

namespace elasticflow {

enum class Condition { Attachment, Curvature, SecondOrder, ThirdOrder, NonDegeneracy, FourthOrder };
inline constexpr std::array<Condition, 6> kAllConditions = {Condition::Attachment,  Condition::Curvature,
                                                           Condition::SecondOrder, Condition::ThirdOrder,
                                                           Condition::NonDegeneracy, Condition::FourthOrder};

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::Attachment: return "attachment";
    case Condition::Curvature: return "curvature";
    case Condition::SecondOrder: return "second-order";
    case Condition::ThirdOrder: return "third-order";
    case Condition::NonDegeneracy: return "non-degeneracy";
    case Condition::FourthOrder: return "fourth-order";
  }
  return "unknown";
}

/// Per-condition tolerances. The curvature condition involves a second
/// difference and cannot be met exactly by a sampled curve, so it gets the
/// same budget as the third- and fourth-order conditions.
struct AdmissibilityTolerances {
  double attachment = 1e-8;
  double curvature = 1e-4;
  double second_order = 1e-8;
  double third_order = 1e-4;
  double fourth_order = 1e-4;

  static AdmissibilityTolerances uniform(double tol) { return {tol, tol, tol, tol, tol}; }
};

enum class AdmissibilityKind { Geometric, Analytic };

enum class Verdict { Pass, Fail, NotApplicable };

struct AdmissibilityReport {
  AdmissibilityKind kind = AdmissibilityKind::Geometric;
  std::array<double, 2> attachment_residual{};
  std::array<double, 2> curvature_residual{};
  std::array<double, 2> second_order_residual{};
  std::array<double, 2> third_order_residual{};
  std::array<double, 2> nondegeneracy{};
  std::array<double, 2> fourth_order_residual{};
  // fourth-order residual with coefficient 1 instead of mu on the k term
  std::array<double, 2> fourth_order_unit_coefficient{};
  double rho = 0.0;
  double mu = 0.0;
  AdmissibilityTolerances tol;
  std::string notes;

  const std::array<double, 2>& residual(Condition c) const {
    switch (c) {
      case Condition::Attachment: return attachment_residual;
      case Condition::Curvature: return curvature_residual;
      case Condition::SecondOrder: return second_order_residual;
      case Condition::ThirdOrder: return third_order_residual;
      case Condition::NonDegeneracy: return nondegeneracy;
      case Condition::FourthOrder: return fourth_order_residual;
    }
    return attachment_residual;
  }

  double tolerance(Condition c) const {
    switch (c) {
      case Condition::Attachment: return tol.attachment;
      case Condition::Curvature: return tol.curvature;
      case Condition::SecondOrder: return tol.second_order;
      case Condition::ThirdOrder: return tol.third_order;
      case Condition::NonDegeneracy: return rho;
      case Condition::FourthOrder: return tol.fourth_order;
    }
    return 0.0;
  }

  /// The second-order condition d_x^2 gamma = 0 constrains the
  /// parametrization, so only the analytic check applies it.
  Verdict verdict(Condition c) const {
    if (c == Condition::SecondOrder && kind == AdmissibilityKind::Geometric) return Verdict::NotApplicable;
    const auto& r = residual(c);
    if (c == Condition::NonDegeneracy) return (r[0] >= rho && r[1] >= rho) ? Verdict::Pass : Verdict::Fail;
    const double t = tolerance(c);
    return (r[0] <= t && r[1] <= t) ? Verdict::Pass : Verdict::Fail;
  }

  bool passes(Condition c) const { return verdict(c) != Verdict::Fail; }

  bool overall() const {
    for (auto c : kAllConditions)
      if (!passes(c)) return false;
    return true;
  }

  std::vector<Condition> failures() const {
    std::vector<Condition> out;
    for (auto c : kAllConditions)
      if (!passes(c)) out.push_back(c);
    return out;
  }
};

namespace detail {

inline AdmissibilityReport evaluate_admissibility(const DiscreteCurve& curve, double mu, double rho,
                                                  const AdmissibilityTolerances& tol, AdmissibilityKind kind) {
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidValue, "mu must be positive");
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidValue, "rho must be positive");
  compute_geometry(curve, 0);  // regularity
  AdmissibilityReport r;
  r.kind = kind;
  r.rho = rho;
  r.mu = mu;
  r.tol = tol;
  const std::span<const Point> nodes(curve.nodes());
  for (int e = 0; e < 2; ++e) {
    const std::size_t i = endpoint_index(static_cast<Side>(e), curve.intervals());
    const auto j = jets_at(nodes, i);
    const auto c = curvature_from_jets(j);
    const Point tau = j.d1 / norm(j.d1);
    const Point nu = rotate_ccw(tau);
    r.attachment_residual[e] = std::abs(curve[i].y);
    r.curvature_residual[e] = std::abs(c[0]);
    r.second_order_residual[e] = norm(j.d2);
    r.third_order_residual[e] = std::abs(third_order_from_jets(j, mu));
    r.nondegeneracy[e] = tau.y;
    const double v = -2.0 * c[2] - c[0] * c[0] * c[0] + mu * c[0];
    r.fourth_order_unit_coefficient[e] = std::abs((v - (mu - 1.0) * c[0]) * nu.y);
    r.fourth_order_residual[e] =
        kind == AdmissibilityKind::Geometric ? std::abs(v * nu.y) : std::abs(deturck_from_jets(j, mu).y);
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "fourth-order condition evaluated with mu*k; with coefficient 1 on k the residuals are "
                "%.3e / %.3e (the two readings agree where k = 0)",
                r.fourth_order_unit_coefficient[0], r.fourth_order_unit_coefficient[1]);
  r.notes = buf;
  return r;
}

}  // namespace detail

/// Navier conditions, non-degeneracy tau_2 >= rho and the fourth-order
/// condition (V nu)_2 = 0 at both endpoints.
inline AdmissibilityReport check_geometric_admissibility(const DiscreteCurve& curve, double mu, double rho,
                                                         const AdmissibilityTolerances& tol = {}) {
  return detail::evaluate_admissibility(curve, mu, rho, tol, AdmissibilityKind::Geometric);
}

inline AdmissibilityReport check_geometric_admissibility(const DiscreteCurve& curve, double mu, double rho,
                                                         double tol) {
  return check_geometric_admissibility(curve, mu, rho, AdmissibilityTolerances::uniform(tol));
}

/// As above, plus d_x^2 gamma = 0 at the ends, and the fourth-order condition
/// taken on the full DeTurck velocity.
inline AdmissibilityReport check_analytic_admissibility(const DiscreteCurve& curve, double mu, double rho,
                                                        const AdmissibilityTolerances& tol = {}) {
  return detail::evaluate_admissibility(curve, mu, rho, tol, AdmissibilityKind::Analytic);
}

inline AdmissibilityReport check_analytic_admissibility(const DiscreteCurve& curve, double mu, double rho,
                                                        double tol) {
  return check_analytic_admissibility(curve, mu, rho, AdmissibilityTolerances::uniform(tol));
}

/// Second derivative of the boundary reparametrization needed at each end:
/// psi''(y) = -<d_x^2 gamma, d_x gamma> / |d_x gamma|^2.
inline std::array<double, 2> boundary_reparametrization_coefficients(const DiscreteCurve& curve) {
  const std::span<const Point> nodes(curve.nodes());
  std::array<double, 2> a{};
  for (int e = 0; e < 2; ++e) {
    const auto j = jets_at(nodes, endpoint_index(static_cast<Side>(e), curve.intervals()));
    a[e] = -dot(j.d2, j.d1) / dot(j.d1, j.d1);
  }
  return a;
}

/// psi(x) = x + a0 x^2/2 w(3x) + a1 (1-x)^2/2 w(3(1-x)); identity on the
/// middle third.
inline double boundary_reparametrization(double x, const std::array<double, 2>& a) {
  const double y = 1.0 - x;
  return x + 0.5 * a[0] * x * x * detail::blend(3.0 * x) + 0.5 * a[1] * y * y * detail::blend(3.0 * y);
}

/// Reparametrize so that d_x^2 gamma = 0 holds at the ends: gamma o psi with
/// psi from boundary_reparametrization, then the two nodes next to each end
/// are adjusted so the discrete one-sided second difference (2, -5, 4, -1)
/// vanishes exactly, and the endpoints are put on the axis.
inline DiscreteCurve enforce_second_order_condition(const DiscreteCurve& curve) {
  const std::size_t n = curve.intervals();
  const auto a = boundary_reparametrization_coefficients(curve);
  std::vector<Point> out = curve.nodes();
  const double step = 1.0 / static_cast<double>(n);
  if (std::abs(a[0]) > 1e-14 || std::abs(a[1]) > 1e-14) {
    for (std::size_t i = 1; i < n; ++i) {
      const double x = static_cast<double>(i) * step;
      const double psi = boundary_reparametrization(x, a);
      if (!(psi > 0.0 && psi < 1.0) || psi - boundary_reparametrization(x - step, a) <= 0.0)
        throw Error(ErrorKind::NotGeometricallyAdmissible, "boundary reparametrization is not monotone");
      out[i] = lagrange_at(curve, psi);
    }
  }
  out[0].y = 0.0;
  out[n].y = 0.0;
  const double scale = norm(out[n] - out[0]) + norm(out[1] - out[0]);
  auto snap = [&](std::size_t e, std::size_t i1, std::size_t i2, std::size_t i3) {
    const Point r = out[e] * 2.0 - out[i1] * 5.0 + out[i2] * 4.0 - out[i3];
    if (norm(r) > 1e-15 * scale) out[i1] = (out[e] * 2.0 + out[i2] * 4.0 - out[i3]) * 0.2;
  };
  snap(0, 1, 2, 3);
  snap(n, n - 1, n - 2, n - 3);
  return DiscreteCurve(std::move(out));
}

/// enforce_second_order_condition for a geometrically admissible curve.
///
/// Only attachment, curvature and non-degeneracy are required of the input;
/// the third- and fourth-order conditions are invariant under the
/// reparametrization and are left to check_analytic_admissibility.
///
/// The curvature tolerance is loose by default: the one-sided second
/// difference of a sampled curve with k(y) = 0 is only O(h^3), and the
/// adjustment makes it vanish anyway.
inline DiscreteCurve prepare_initial(const DiscreteCurve& curve, double mu, double rho = 0.05,
                                     const AdmissibilityTolerances& tol = {1e-8, 1e-2, 1e-8, 1e-4, 1e-4}) {
  const auto report = check_geometric_admissibility(curve, mu, rho, tol);
  for (auto c : {Condition::Attachment, Condition::Curvature, Condition::NonDegeneracy})
    if (!report.passes(c))
      throw Error(ErrorKind::NotGeometricallyAdmissible, std::string(to_string(c)) + " condition fails");
  return enforce_second_order_condition(curve);
}

}  // namespace elasticflow
