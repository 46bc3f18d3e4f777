#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "elasticflow/admissibility.hpp"
#include "elasticflow/diagnostics.hpp"
#include "elasticflow/flow.hpp"

namespace elasticflow {

/// Per accepted step summary, handed to the optional observer of run_flow.
struct StepSummary {
  const FlowState* state = nullptr;
  double energy = 0.0;
  double v_sup = 0.0;
  std::array<std::array<double, 4>, 2> bc{};
  bool restarted = false;
};

struct FlowResult {
  std::vector<FlowState> states;  // recorded states, parallel to records
  std::vector<DiagnosticsRecord> records;
  FlowState final_state;
  TerminationReason reason = TerminationReason::MaxTime;
  std::string detail;
  bool admissibility_overridden = false;
  std::size_t restarts = 0;
  // largest E_{n+1} - E_n over accepted steps (negative when strictly decreasing)
  double max_energy_step_increase = -INFINITY;
  // largest |boundary row| over accepted steps: attachment, second-order, third-order
  std::array<double, 3> max_bc_residual{};
};

namespace detail {

inline std::vector<double> speeds(const DiscreteCurve& c) { return compute_geometry(c, 0).speed; }

/// Smallest and largest ratio of the current discrete speed to a reference profile.
inline std::pair<double, double> speed_ratio(const std::vector<double>& now, const std::vector<double>& ref) {
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < now.size(); ++i) {
    lo = std::min(lo, now[i] / ref[i]);
    hi = std::max(hi, now[i] / ref[i]);
  }
  return {lo, hi};
}

/// Parameters on `curve` of the points of `shown`, matched by arclength
/// fraction; used to carry a presentation across a restart.
inline std::vector<double> locate_by_arclength(const DiscreteCurve& curve, const DiscreteCurve& shown) {
  const auto sc = cumulative_arclength(compute_geometry(curve, 0));
  const auto ss = cumulative_arclength(compute_geometry(shown, 0));
  const std::size_t n = curve.intervals();
  std::vector<double> out(shown.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < shown.size(); ++i) {
    const double target = ss[i] / ss.back() * sc.back();
    while (seg + 1 < n && sc[seg + 1] < target) ++seg;
    const double frac = std::clamp((target - sc[seg]) / (sc[seg + 1] - sc[seg]), 0.0, 1.0);
    out[i] = (static_cast<double>(seg) + frac) / static_cast<double>(n);
  }
  out.front() = 0.0;
  out.back() = 1.0;
  return out;
}

}  // namespace detail

/// Constant-speed restart: the parametrization is reset to constant speed,
/// re-corrected at the ends, and the four boundary rows are restored by
/// moving each endpoint and its neighbour.
inline DiscreteCurve restart_parametrization(const DiscreteCurve& curve, double mu) {
  auto out = enforce_second_order_condition(reparametrize_constant_speed(curve));
  project_boundary(out, mu);
  compute_geometry(out, 0);
  return out;
}

/// Advance the flow from `initial` until one of the stopping rules fires.
///
/// Stopping rules, checked after every accepted step: SingularLength,
/// SingularDegeneracy (classify_singularity), Converged (sup |V| < el_tol over
/// the evolution rows), MaxTime (t >= t_max). Any solver error, a boundary row
/// above 10 bc_tol (attachment above 1e-10), or a speed outside
/// [1/2, 2] x the reference profile with restarts disabled ends the run with
/// StepFailure. With restarts enabled the speed check triggers
/// restart_parametrization instead and resets the reference profile.
inline FlowResult run_flow(const DiscreteCurve& initial, const FlowConfig& config,
                           const std::function<void(const StepSummary&)>& observer = {}) {
  config.validate();
  if (initial.intervals() != config.n_grid)
    throw Error(ErrorKind::GridMismatch, "initial curve has N = " + std::to_string(initial.intervals()) +
                                             ", config has n_grid = " + std::to_string(config.n_grid));
  FlowResult out;
  out.admissibility_overridden = config.override_admissibility;
  if (!config.override_admissibility) {
    const auto rep = check_analytic_admissibility(initial, config.mu, config.rho_min);
    if (!rep.overall()) {
      std::string failed;
      for (auto c : rep.failures()) failed += std::string(failed.empty() ? "" : ", ") + to_string(c);
      throw Error(ErrorKind::InadmissibleInitial, "initial curve fails: " + failed);
    }
  }

  FlowState state{0.0, initial, 0, std::nullopt, {}};
  if (config.velocity_mode == VelocityMode::InterpolatedLambda) {
    state.gauge = initial;
    state.params.resize(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i)
      state.params[i] = static_cast<double>(i) / static_cast<double>(initial.intervals());
  }
  auto rec = record(state, config, config.with_ds6);
  out.states.push_back(state);
  out.records.push_back(rec);
  std::vector<double> ref_speed = detail::speeds(state.evolved());
  double energy = rec.energy.total;
  std::size_t last_recorded = 0;

  auto finish = [&](TerminationReason reason, std::string detail) {
    out.reason = reason;
    out.detail = std::move(detail);
    if (last_recorded != state.step_index || out.states.empty()) {
      out.states.push_back(state);
      out.records.push_back(record(state, config, config.with_ds6));
    }
    out.final_state = state;
    return out;
  };
  auto check_state = [&](const DiagnosticsRecord& r) -> std::optional<std::pair<TerminationReason, std::string>> {
    if (auto s = classify_singularity(r, config)) {
      char buf[160];
      if (*s == TerminationReason::SingularLength)
        std::snprintf(buf, sizeof buf, "length %.6g < length_min %.6g", r.length, config.length_min);
      else
        std::snprintf(buf, sizeof buf, "min tau_2 %.6g < rho_min %.6g",
                      std::min(r.boundary_tau2[0], r.boundary_tau2[1]), config.rho_min);
      return std::make_pair(*s, std::string(buf));
    }
    if (r.v_sup < config.el_tol) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "sup |V| = %.3e < el_tol", r.v_sup);
      return std::make_pair(TerminationReason::Converged, std::string(buf));
    }
    return std::nullopt;
  };

  if (auto stop = check_state(rec)) return finish(stop->first, stop->second);

  const double t_end = config.t_max * (1.0 - 1e-12);
  while (state.time < t_end) {
    FlowState next;
    bool restarted = false;
    try {
      const FlowState evolved{state.time, state.evolved(), state.step_index, std::nullopt, {}};
      next = config.scheme == Scheme::SemiImplicit ? step_semi_implicit(evolved, config) : step_explicit(evolved, config);
      const auto [lo, hi] = detail::speed_ratio(detail::speeds(next.curve), ref_speed);
      const bool drift = lo < 0.5 || hi > 2.0;
      if (drift && !config.restart_on_speed_drift) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "discrete speed ratio [%.3f, %.3f] left [1/2, 2]", lo, hi);
        return finish(TerminationReason::StepFailure, buf);
      }
      if (config.velocity_mode == VelocityMode::InterpolatedLambda) {
        auto params = retarget_tangential(state.evolved(), next.curve, state.params, config.dt);
        auto gauge = std::move(next.curve);
        if (drift) {
          const auto shown = present(gauge, params);
          gauge = restart_parametrization(gauge, config.mu);
          params = detail::locate_by_arclength(gauge, shown);
        }
        next.curve = present(gauge, params);
        next.gauge = std::move(gauge);
        next.params = std::move(params);
      } else if (drift) {
        next.curve = restart_parametrization(next.curve, config.mu);
      }
      if (drift) {
        ref_speed = detail::speeds(next.evolved());
        restarted = true;
        ++out.restarts;
      }
    } catch (const Error& e) {
      return finish(TerminationReason::StepFailure, e.what());
    }

    const auto bc = boundary_residuals(next.evolved(), config.mu);
    const double att = std::max(std::abs(bc[0][0]), std::abs(bc[1][0]));
    const double second = std::max({std::abs(bc[0][1]), std::abs(bc[0][2]), std::abs(bc[1][1]), std::abs(bc[1][2])});
    const double third = std::max(std::abs(bc[0][3]), std::abs(bc[1][3]));
    if (att > 1e-10 || second > 10.0 * config.bc_tol || third > 10.0 * config.bc_tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "boundary rows drifted: attachment %.2e, second-order %.2e, third-order %.2e",
                    att, second, third);
      return finish(TerminationReason::StepFailure, buf);
    }
    out.max_bc_residual = {std::max(out.max_bc_residual[0], att), std::max(out.max_bc_residual[1], second),
                           std::max(out.max_bc_residual[2], third)};

    state = std::move(next);
    const bool due = state.step_index % config.record_every == 0;
    DiagnosticsRecord r;
    try {
      r = record(state, config, config.with_ds6 && due);
    } catch (const Error& e) {
      return finish(TerminationReason::StepFailure, e.what());
    }
    out.max_energy_step_increase = std::max(out.max_energy_step_increase, r.energy.total - energy);
    energy = r.energy.total;
    if (due) {
      out.states.push_back(state);
      out.records.push_back(r);
      last_recorded = state.step_index;
    }
    if (observer) observer({&state, r.energy.total, r.v_sup, bc, restarted});
    if (auto stop = check_state(r)) return finish(stop->first, stop->second);
  }
  return finish(TerminationReason::MaxTime, "t >= t_max");
}

/// The records on the record_every cadence; drops a final record written off
/// cadence at termination.
inline std::vector<DiagnosticsRecord> cadence_records(const FlowResult& result, const FlowConfig& config) {
  std::vector<DiagnosticsRecord> out;
  for (const auto& r : result.records)
    if (r.step % config.record_every == 0) out.push_back(r);
  return out;
}

}  // namespace elasticflow
