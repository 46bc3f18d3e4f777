#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "elasticflow/boundary.hpp"
#include "elasticflow/flow.hpp"
#include "elasticflow/geometry.hpp"

namespace elasticflow {

/// gamma*(x, t) = (x, a (1 + b t) sin(pi x)). It meets attachment and both
/// second-order rows exactly and keeps tau_2 away from zero; the third-order
/// rows and the motion equation are met through forcing.
struct ManufacturedSolution {
  double amplitude = 0.3;
  double growth = 0.5;

  double a(double t) const { return amplitude * (1.0 + growth * t); }

  Point at(double x, double t) const { return {x, a(t) * std::sin(std::numbers::pi * x)}; }

  Point velocity(double x, double /*t*/) const {
    return {0.0, amplitude * growth * std::sin(std::numbers::pi * x)};
  }

  Jets<double> jets(double x, double t) const {
    const double p = std::numbers::pi, s = std::sin(p * x), c = std::cos(p * x), A = a(t);
    return {{1.0, A * p * c}, {0.0, -A * p * p * s}, {0.0, -A * p * p * p * c}, {0.0, A * p * p * p * p * s}};
  }

  DiscreteCurve sample(std::size_t n, double t) const {
    return sample_nodes(n, [&](double x) { return at(x, t); });
  }

 private:
  template <typename Fn>
  static DiscreteCurve sample_nodes(std::size_t n, Fn fn) {
    std::vector<Point> nodes(n + 1);
    for (std::size_t i = 0; i <= n; ++i) nodes[i] = fn(static_cast<double>(i) / static_cast<double>(n));
    return DiscreteCurve(std::move(nodes));
  }
};

/// Forcing for the step from t to t + dt: the interior defect
/// d_t gamma* - F(gamma*) at t + dt, F the DeTurck field, and the boundary
/// row values of the sampled gamma*(t + dt).
inline Forcing manufactured_forcing(const ManufacturedSolution& sol, std::size_t n, double t_next, double mu) {
  Forcing f;
  f.interior.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    f.interior[i] = sol.velocity(x, t_next) - deturck_from_jets(sol.jets(x, t_next), mu);
  }
  const auto exact = sol.sample(n, t_next);
  f.targets = boundary_residuals(exact, mu);
  return f;
}

/// Max node error against gamma* at t_end after semi-implicit steps of size dt.
inline double mms_error(const ManufacturedSolution& sol, std::size_t n, double dt, double t_end, double mu) {
  FlowConfig cfg;
  cfg.mu = mu;
  cfg.n_grid = n;
  cfg.dt = dt;
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  FlowState state{0.0, sol.sample(n, 0.0), 0, std::nullopt, {}};
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * dt;
    const auto forcing = manufactured_forcing(sol, n, t_next, mu);
    state = step_semi_implicit(state, cfg, &forcing);
    state.time = t_next;
  }
  return max_node_distance(state.curve, sol.sample(n, state.time));
}

struct MmsSample {
  std::size_t n = 0;
  double dt = 0.0;
  double error = 0.0;
};

struct MmsStudy {
  double mu = 1.0;
  double t_end = 1e-3;
  std::vector<std::size_t> grids{32, 64, 128, 256};
  // spatial runs use dt = spatial_dt_coefficient h^2, which keeps the time
  // error a fixed fraction of the space error
  double spatial_dt_coefficient = 1e-1;
  std::size_t temporal_grid = 64;
  double temporal_dt = 1e-4;
  int temporal_halvings = 3;
};

struct MmsResult {
  std::vector<MmsSample> spatial;
  std::vector<MmsSample> temporal;
  double spatial_order = 0.0;
  double temporal_order = 0.0;
};

/// Least-squares slope of log e against log x.
inline double observed_order(const std::vector<double>& x, const std::vector<double>& e) {
  double mx = 0.0, me = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    me += std::log(e[i]);
  }
  mx /= static_cast<double>(x.size());
  me /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(e[i]) - me);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

/// Spatial order from the error against gamma* over `grids`. Temporal order
/// from successive differences of the end state over dt halvings at a fixed
/// grid, which removes the space error common to all of them.
inline MmsResult run_mms_study(const MmsStudy& study, const ManufacturedSolution& sol = {}) {
  if (study.grids.size() < 2 || study.temporal_halvings < 2)
    throw Error(ErrorKind::InvalidValue, "need at least two grids and two dt halvings");
  MmsResult out;
  std::vector<double> hs, es;
  for (std::size_t n : study.grids) {
    const double h = 1.0 / static_cast<double>(n);
    double dt = study.spatial_dt_coefficient * h * h;
    dt = study.t_end / std::ceil(study.t_end / dt);
    out.spatial.push_back({n, dt, mms_error(sol, n, dt, study.t_end, study.mu)});
    hs.push_back(h);
    es.push_back(out.spatial.back().error);
  }
  out.spatial_order = observed_order(hs, es);

  FlowConfig cfg;
  cfg.mu = study.mu;
  cfg.n_grid = study.temporal_grid;
  std::vector<DiscreteCurve> ends;
  std::vector<double> dts;
  for (int k = 0; k <= study.temporal_halvings; ++k) {
    const double dt = study.temporal_dt / std::pow(2.0, k);
    cfg.dt = dt;
    const auto steps = static_cast<std::size_t>(std::llround(study.t_end / dt));
    FlowState state{0.0, sol.sample(study.temporal_grid, 0.0), 0, std::nullopt, {}};
    for (std::size_t s = 0; s < steps; ++s) {
      const double t_next = static_cast<double>(s + 1) * dt;
      const auto forcing = manufactured_forcing(sol, study.temporal_grid, t_next, study.mu);
      state = step_semi_implicit(state, cfg, &forcing);
      state.time = t_next;
    }
    ends.push_back(state.curve);
    dts.push_back(dt);
  }
  std::vector<double> ts, ds;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    const double d = max_node_distance(ends[k], ends[k + 1]);
    out.temporal.push_back({study.temporal_grid, dts[k], d});
    ts.push_back(dts[k]);
    ds.push_back(d);
  }
  out.temporal_order = observed_order(ts, ds);
  return out;
}

}  // namespace elasticflow
