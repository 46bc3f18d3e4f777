#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <optional>
#include <vector>

#include "elasticflow/energy.hpp"
#include "elasticflow/flow.hpp"
#include "elasticflow/geometry.hpp"

namespace elasticflow {

enum class TerminationReason { Converged, SingularLength, SingularDegeneracy, MaxTime, StepFailure };

inline const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::Converged: return "Converged";
    case TerminationReason::SingularLength: return "SingularLength";
    case TerminationReason::SingularDegeneracy: return "SingularDegeneracy";
    case TerminationReason::MaxTime: return "MaxTime";
    case TerminationReason::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

/// Smallest grid on which the sixth-derivative monitor is computed.
inline constexpr std::size_t kDs6MinGrid = 512;

struct DiagnosticsRecord {
  double time = 0.0;
  std::size_t step = 0;
  EnergyBreakdown energy;
  double dissipation = 0.0;
  double length = 0.0;
  std::array<double, 2> boundary_tau2{};
  double norm_k = 0.0;
  double norm_ds2k = 0.0;
  std::optional<double> norm_ds6k;
  std::array<std::array<double, 4>, 2> bc_residuals{};
  double v_sup = 0.0;
};

/// sup |V| over the nodes carrying the evolution equation.
inline double interior_sup(const std::vector<double>& v) {
  double m = 0.0;
  for (std::size_t i = kFirstPdeNode; i + kFirstPdeNode < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

inline DiagnosticsRecord record(const FlowState& state, const FlowConfig& config, bool with_ds6 = false) {
  const auto& c = state.curve;
  const bool ds6 = with_ds6 && c.intervals() >= kDs6MinGrid;
  const auto g = compute_geometry(c, ds6 ? 6 : 2);
  DiagnosticsRecord r;
  r.time = state.time;
  r.step = state.step_index;
  r.energy = energy_from_geometry(g, config.mu);
  r.length = r.energy.length;
  const auto v = normal_velocity(g, config.mu);
  std::vector<double> v2(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) v2[i] = v[i] * v[i];
  r.dissipation = arclength_integrate(v2, g);
  r.v_sup = interior_sup(v);
  r.boundary_tau2 = {g.tangent.front().y, g.tangent.back().y};
  r.norm_k = curvature_norm(g, 0);
  r.norm_ds2k = curvature_norm(g, 2);
  if (ds6) r.norm_ds6k = curvature_norm(g, 6);
  r.bc_residuals = boundary_residuals(state.evolved(), config.mu);
  return r;
}

/// max_n |(E_{n+1} - E_n)/Delta + (D_n + D_{n+1})/2| over consecutive records.
inline double verify_dissipation(const std::vector<DiagnosticsRecord>& records) {
  if (records.size() < 3) throw Error(ErrorKind::InsufficientRecords, "need at least three records");
  const double delta = records[1].time - records[0].time;
  if (!(delta > 0.0)) throw Error(ErrorKind::InsufficientRecords, "records are not separated in time");
  double worst = 0.0;
  for (std::size_t n = 0; n + 1 < records.size(); ++n) {
    const double d = records[n + 1].time - records[n].time;
    if (std::abs(d - delta) > 1e-9 * delta)
      throw Error(ErrorKind::InvalidValue, "records are not uniformly spaced in time");
    const double rate = (records[n + 1].energy.total - records[n].energy.total) / d;
    const double mid = 0.5 * (records[n].dissipation + records[n + 1].dissipation);
    worst = std::max(worst, std::abs(rate + mid));
  }
  return worst;
}

/// Nodes dropped at each end by verify_curvature_evolution.
inline constexpr std::size_t kCurvatureCheckMargin = 4;

/// Nodewise defect of
///   d_t k = -2 d_s^4 k - 5 k^2 d_s^2 k - 6 k (d_s k)^2 + Lambda d_s k - k^5 + mu (d_s^2 k + k^3)
/// at the middle of three equally spaced states, with d_t by central
/// differences at fixed parameter and Lambda = <d_t gamma, tau>.
inline std::vector<double> curvature_evolution_defect(const std::array<FlowState, 3>& s, const FlowConfig& config) {
  const std::size_t n = s[1].curve.intervals();
  if (s[0].curve.size() != s[1].curve.size() || s[2].curve.size() != s[1].curve.size())
    throw Error(ErrorKind::GridMismatch, "states have different node counts");
  const double dt0 = s[1].time - s[0].time, dt1 = s[2].time - s[1].time;
  if (!(dt0 > 0.0) || std::abs(dt1 - dt0) > 1e-9 * dt0)
    throw Error(ErrorKind::InvalidValue, "states must be equally spaced in time");
  const auto g0 = compute_geometry(s[0].curve, 0);
  const auto g1 = compute_geometry(s[1].curve, 4);
  const auto g2 = compute_geometry(s[2].curve, 0);
  const auto& k = g1.ds(0);
  const auto& k1 = g1.ds(1);
  const auto& k2 = g1.ds(2);
  const auto& k4 = g1.ds(4);
  std::vector<double> out;
  for (std::size_t i = kCurvatureCheckMargin; i + kCurvatureCheckMargin <= n; ++i) {
    const double dkdt = (g2.ds(0)[i] - g0.ds(0)[i]) / (2.0 * dt0);
    const Point vel = (s[2].curve[i] - s[0].curve[i]) * (1.0 / (2.0 * dt0));
    const double lambda = dot(vel, g1.tangent[i]);
    const double kk = k[i];
    const double rhs = -2.0 * k4[i] - 5.0 * kk * kk * k2[i] - 6.0 * kk * k1[i] * k1[i] + lambda * k1[i] -
                       kk * kk * kk * kk * kk + config.mu * (k2[i] + kk * kk * kk);
    out.push_back(dkdt - rhs);
  }
  return out;
}

inline double verify_curvature_evolution(const std::array<FlowState, 3>& states, const FlowConfig& config) {
  double m = 0.0;
  for (double d : curvature_evolution_defect(states, config)) m = std::max(m, std::abs(d));
  return m;
}

namespace detail {

inline double distance_to_polyline(Point p, const DiscreteCurve& c) {
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const Point a = c[i], d = c[i + 1] - c[i];
    const double len2 = dot(d, d);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, norm(p - (a + d * t)));
  }
  return best;
}

}  // namespace detail

/// Symmetric Hausdorff distance between the node polylines of two curves,
/// taken over the nodes of each against the segments of the other.
inline double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, detail::distance_to_polyline(a[i], b));
  for (std::size_t i = 0; i < b.size(); ++i) m = std::max(m, detail::distance_to_polyline(b[i], a));
  return m;
}

/// SingularLength if l < length_min, else SingularDegeneracy if
/// min tau_2 < rho_min.
inline std::optional<TerminationReason> classify_singularity(const DiagnosticsRecord& r, const FlowConfig& config) {
  if (r.length < config.length_min) return TerminationReason::SingularLength;
  if (std::min(r.boundary_tau2[0], r.boundary_tau2[1]) < config.rho_min) return TerminationReason::SingularDegeneracy;
  return std::nullopt;
}

}  // namespace elasticflow
