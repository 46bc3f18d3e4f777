#pragma once

// Closed-form reference values used by the tests. Nothing here calls into the
// finite-difference code.

#include <array>
#include <cmath>
#include <vector>
#include <numbers>

namespace oracle {

/// Derivatives of f(x) = A sin(w x) up to order 4.
struct SineGraph {
  double a;
  double w;

  double f(double x) const { return a * std::sin(w * x); }
  double d1(double x) const { return a * w * std::cos(w * x); }
  double d2(double x) const { return -a * w * w * std::sin(w * x); }
  double d3(double x) const { return -a * w * w * w * std::cos(w * x); }
  double d4(double x) const { return a * w * w * w * w * std::sin(w * x); }
};

/// k, d_s k, d_s^2 k of the graph (x, f(x)).
template <typename Graph>
struct GraphCurvature {
  double k, dsk, ds2k, speed;
};

template <typename Graph>
GraphCurvature<Graph> graph_curvature(const Graph& g, double x) {
  const double p = g.d1(x), q = g.d2(x), r = g.d3(x), u = g.d4(x);
  const double w = 1.0 + p * p;
  const double k = q * std::pow(w, -1.5);
  const double k1 = r * std::pow(w, -1.5) - 3.0 * p * q * q * std::pow(w, -2.5);
  const double k2 = u * std::pow(w, -1.5) - (9.0 * p * q * r + 3.0 * q * q * q) * std::pow(w, -2.5) +
                    15.0 * p * p * q * q * q * std::pow(w, -3.5);
  const double speed = std::sqrt(w);
  return {k, k1 / speed, (k2 - k1 * p * q / w) / w, speed};
}

inline SineGraph sine_arch(double a = 0.1, double periods = 1.0) {
  return {a, 2.0 * std::numbers::pi * periods};
}

/// Loop elastica with both ends at the origin: the arclength ODE
///   x' = cos t, y' = sin t, t' = k, k'' = (mu k - k^3) / 2
/// from k(0) = 0 with the third-order condition fixing k'(0), run to the
/// next inflection. The start angle and the length are solved so that the
/// end is an inflection on the axis.
struct LoopElastica {
  double mu = 1.0;
  double theta0 = 0.0;
  double length = 0.0;

  struct State {
    double x, y, t, k, kp;
  };

  State derivative(const State& u, double len) const {
    return {len * std::cos(u.t), len * std::sin(u.t), len * u.k, len * u.kp, len * 0.5 * (mu * u.k - u.k * u.k * u.k)};
  }

  /// States at sigma = i / intervals, i = 0..intervals, with `sub` RK4 steps per interval.
  std::vector<State> integrate(double th0, double len, std::size_t intervals, std::size_t sub) const {
    State u{0.0, 0.0, th0, 0.0, -mu * std::cos(th0) / (2.0 * std::sin(th0))};
    std::vector<State> out{u};
    const double dt = 1.0 / static_cast<double>(intervals * sub);
    auto axpy = [](const State& a, double c, const State& b) {
      return State{a.x + c * b.x, a.y + c * b.y, a.t + c * b.t, a.k + c * b.k, a.kp + c * b.kp};
    };
    for (std::size_t i = 0; i < intervals; ++i) {
      for (std::size_t j = 0; j < sub; ++j) {
        const State k1 = derivative(u, len);
        const State k2 = derivative(axpy(u, 0.5 * dt, k1), len);
        const State k3 = derivative(axpy(u, 0.5 * dt, k2), len);
        const State k4 = derivative(axpy(u, dt, k3), len);
        u = axpy(u, dt / 6.0, k1);
        u = axpy(u, dt / 3.0, k2);
        u = axpy(u, dt / 3.0, k3);
        u = axpy(u, dt / 6.0, k4);
      }
      out.push_back(u);
    }
    return out;
  }

  static LoopElastica solve(double mu) {
    LoopElastica e{mu, 139.5 * std::numbers::pi / 180.0, 5.24 / std::sqrt(mu)};
    auto end = [&](double th0, double len) {
      const auto u = e.integrate(th0, len, 1, 4096).back();
      return std::array<double, 2>{u.y, u.k};
    };
    for (int it = 0; it < 30; ++it) {
      const auto r = end(e.theta0, e.length);
      if (std::abs(r[0]) + std::abs(r[1]) < 1e-14) break;
      const double eps = 1e-7;
      const auto ra = end(e.theta0 + eps, e.length);
      const auto rb = end(e.theta0, e.length + eps);
      const double a = (ra[0] - r[0]) / eps, b = (rb[0] - r[0]) / eps;
      const double c = (ra[1] - r[1]) / eps, d = (rb[1] - r[1]) / eps;
      const double det = a * d - b * c;
      e.theta0 -= (d * r[0] - b * r[1]) / det;
      e.length -= (-c * r[0] + a * r[1]) / det;
    }
    return e;
  }

  /// Nodes at constant speed `length`.
  std::vector<State> sample(std::size_t intervals) const { return integrate(theta0, length, intervals, 8192 / intervals + 1); }

  double energy() const {
    const auto s = integrate(theta0, length, 8192, 1);
    double bend = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) bend += (i == 0 || i + 1 == s.size() ? 0.5 : 1.0) * s[i].k * s[i].k;
    return bend * length / 8192.0 + mu * length;
  }
};

}  // namespace oracle
