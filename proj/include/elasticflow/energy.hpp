#pragma once

#include <cmath>
#include <vector>

#include "elasticflow/geometry.hpp"

namespace elasticflow {

struct EnergyBreakdown {
  double bending = 0.0;  // \int k^2 ds
  double length = 0.0;
  double mu = 0.0;
  double total = 0.0;    // bending + mu * length
};

inline EnergyBreakdown energy_from_geometry(const GeometricQuantities& g, double mu) {
  const auto& k = g.curvature();
  std::vector<double> k2(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) k2[i] = k[i] * k[i];
  EnergyBreakdown e;
  e.bending = arclength_integrate(k2, g);
  e.length = curve_length(g);
  e.mu = mu;
  e.total = e.bending + mu * e.length;
  return e;
}

/// E(gamma) = \int k^2 + mu ds.
inline EnergyBreakdown elastic_energy(const DiscreteCurve& curve, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidValue, "mu must be positive");
  return energy_from_geometry(compute_geometry(curve, 0), mu);
}

/// V = -2 d_s^2 k - k^3 + mu k at each node.
template <typename T>
std::vector<T> normal_velocity(const GeometricQuantitiesT<T>& geom, double mu) {
  const auto& k = geom.curvature();
  const auto& k2 = geom.ds(2);
  std::vector<T> v(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) v[i] = -2.0 * k2[i] - k[i] * k[i] * k[i] + mu * k[i];
  return v;
}

/// \int V^2 ds.
inline double dissipation(const GeometricQuantities& geom, double mu) {
  auto v = normal_velocity(geom, mu);
  for (auto& x : v) x *= x;
  return arclength_integrate(v, geom);
}

/// (\int (d_s^j k)^2 ds)^{1/2}.
inline double curvature_norm(const GeometricQuantities& geom, int j) {
  auto f = geom.ds(j);
  for (auto& x : f) x *= x;
  return std::sqrt(arclength_integrate(f, geom));
}

}  // namespace elasticflow
