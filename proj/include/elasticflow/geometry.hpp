#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "elasticflow/dual.hpp"
#include "elasticflow/stencils.hpp"
#include "elasticflow/types.hpp"

namespace elasticflow {

namespace detail {

/// Quintic blend: w(0) = 1 with w' = w'' = 0 there, w = 0 for t >= 1.
inline double blend(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

}  // namespace detail

inline constexpr int kMaxArclengthOrder = 6;

/// Per-node differential geometry of a sampled curve.
///
/// dsk[j] holds the j-th arclength derivative of the signed curvature, so
/// dsk[0] is k itself. Orders up to max_order() are available.
template <typename T>
struct GeometricQuantitiesT {
  double h = 0.0;
  std::vector<T> speed;              // |d_x gamma|
  std::vector<Vec2<T>> d1;           // d_x gamma
  std::vector<Vec2<T>> d2;           // d_x^2 gamma
  std::vector<Vec2<T>> tangent;      // tau
  std::vector<Vec2<T>> normal;       // nu = rot(tau)
  std::vector<std::vector<T>> dsk;   // d_s^j k, j = 0..max_order

  std::size_t size() const { return speed.size(); }
  int max_order() const { return static_cast<int>(dsk.size()) - 1; }
  const std::vector<T>& curvature() const { return dsk[0]; }

  const std::vector<T>& ds(int j) const {
    if (j < 0 || j > max_order())
      throw Error(ErrorKind::MissingDerivativeOrder,
                  "arclength derivative of order " + std::to_string(j) + " was not computed");
    return dsk[static_cast<std::size_t>(j)];
  }
};

using GeometricQuantities = GeometricQuantitiesT<double>;

/// Smallest N that supports arclength derivatives of the given order.
inline std::size_t min_intervals_for_order(int order) {
  if (order <= 2) return DiscreteCurve::kMinIntervals;
  return static_cast<std::size_t>(32 * order);
}

/// d_x^j gamma (j = 1..4) at a single node, from the grid stencils.
template <typename T>
struct Jets {
  Vec2<T> d1, d2, d3, d4;
};

template <typename T>
Jets<T> jets_at(std::span<const Vec2<T>> nodes, std::size_t i) {
  const std::size_t n = nodes.size() - 1;
  const double h = 1.0 / static_cast<double>(n);
  Jets<T> j;
  j.d1 = apply_stencil(stencil_at(1, i, n), nodes, i, inverse_power(h, 1));
  j.d2 = apply_stencil(stencil_at(2, i, n), nodes, i, inverse_power(h, 2));
  j.d3 = apply_stencil(stencil_at(3, i, n), nodes, i, inverse_power(h, 3));
  j.d4 = apply_stencil(stencil_at(4, i, n), nodes, i, inverse_power(h, 4));
  return j;
}

/// k, d_s k and d_s^2 k at a node, computed pointwise from the jets. Used at
/// the two nodes next to each end, where nesting one-sided differences of k
/// would lose accuracy.
template <typename T>
std::array<T, 3> curvature_from_jets(const Jets<T>& j) {
  using std::sqrt;
  const T p = dot(j.d1, j.d1);
  const T s = sqrt(p);
  const T c0 = cross(j.d1, j.d2);
  const T c1 = cross(j.d1, j.d3);
  const T c2 = cross(j.d2, j.d3) + cross(j.d1, j.d4);
  const T s1 = dot(j.d1, j.d2) / s;
  const T s2 = (dot(j.d2, j.d2) + dot(j.d1, j.d3)) / s - dot(j.d1, j.d2) * dot(j.d1, j.d2) / (p * s);
  const T s3 = p * s;
  const T s4 = p * p;
  const T k = c0 / s3;
  const T kx = c1 / s3 - 3.0 * c0 * s1 / s4;
  const T kxx = c2 / s3 - 6.0 * c1 * s1 / s4 - 3.0 * c0 * s2 / s4 + 12.0 * c0 * s1 * s1 / (s4 * s);
  return {k, kx / s, (kxx - kx * s1 / s) / p};
}

template <typename T>
GeometricQuantitiesT<T> compute_geometry_t(std::span<const Vec2<T>> nodes, int max_order) {
  if (max_order < 0 || max_order > kMaxArclengthOrder)
    throw Error(ErrorKind::MissingDerivativeOrder, "arclength order must lie in [0, 6]");
  const std::size_t n = nodes.size() - 1;
  if (nodes.size() < DiscreteCurve::kMinIntervals + 1 || n < min_intervals_for_order(max_order))
    throw Error(ErrorKind::StencilTooWide, "N = " + std::to_string(n) +
                                               " is too small for arclength order " +
                                               std::to_string(max_order));
  GeometricQuantitiesT<T> g;
  g.h = 1.0 / static_cast<double>(n);
  g.d1 = differentiate<Vec2<T>>(nodes, 1, g.h);
  g.d2 = differentiate<Vec2<T>>(nodes, 2, g.h);
  g.speed.resize(n + 1);
  g.tangent.resize(n + 1);
  g.normal.resize(n + 1);
  std::vector<T> k(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const T s = norm(g.d1[i]);
    if (!(value(s) > 0.0))
      throw Error(ErrorKind::NonRegularCurve, "discrete speed vanishes at node " + std::to_string(i));
    g.speed[i] = s;
    g.tangent[i] = g.d1[i] / s;
    g.normal[i] = rotate_ccw(g.tangent[i]);
    k[i] = cross(g.d1[i], g.d2[i]) / (s * s * s);
  }
  g.dsk.push_back(std::move(k));
  if (max_order >= 1) {
    const auto dk = differentiate<T>(g.dsk[0], 1, g.h);
    std::vector<T> d(n + 1);
    for (std::size_t i = 0; i <= n; ++i) d[i] = dk[i] / g.speed[i];
    g.dsk.push_back(std::move(d));
  }
  if (max_order >= 2) {
    // compact form (k'' - (s'/s) k') / s^2; its leading part matches the
    // five-point fourth difference used by the implicit operator
    const auto& kk = g.dsk[0];
    const auto dk = differentiate<T>(kk, 1, g.h);
    const auto d2k = differentiate<T>(kk, 2, g.h);
    const auto ds = differentiate<T>(g.speed, 1, g.h);
    std::vector<T> d(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const T& s = g.speed[i];
      d[i] = (d2k[i] - ds[i] * dk[i] / s) / (s * s);
    }
    g.dsk.push_back(std::move(d));
  }
  if (max_order >= 1) {
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, n - 1, n}) {
      const auto c = curvature_from_jets(jets_at<T>(nodes, i));
      g.dsk[1][i] = c[1];
      if (max_order >= 2) g.dsk[2][i] = c[2];
    }
  }
  for (int j = 3; j <= max_order; ++j) {
    const auto dprev = differentiate<T>(g.dsk.back(), 1, g.h);
    std::vector<T> d(n + 1);
    for (std::size_t i = 0; i <= n; ++i) d[i] = dprev[i] / g.speed[i];
    g.dsk.push_back(std::move(d));
  }
  return g;
}

inline GeometricQuantities compute_geometry(const DiscreteCurve& curve, int max_ds_order) {
  return compute_geometry_t<double>(curve.nodes(), max_ds_order);
}

/// Trapezoidal approximation of \int f ds.
template <typename T>
T arclength_integrate(std::span<const T> values, const GeometricQuantitiesT<T>& geom) {
  if (values.size() != geom.size())
    throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(geom.size()) +
                                               " values, got " + std::to_string(values.size()));
  const std::size_t n = values.size() - 1;
  T acc = 0.5 * (values[0] * geom.speed[0] + values[n] * geom.speed[n]);
  for (std::size_t i = 1; i < n; ++i) acc += values[i] * geom.speed[i];
  return acc * geom.h;
}

template <typename T>
T arclength_integrate(const std::vector<T>& values, const GeometricQuantitiesT<T>& geom) {
  return arclength_integrate(std::span<const T>(values), geom);
}

template <typename T>
T curve_length(const GeometricQuantitiesT<T>& geom) {
  return arclength_integrate(std::vector<T>(geom.size(), T(1.0)), geom);
}

/// Running trapezoidal \int_0^{x_i} f ds; entry 0 is zero.
inline std::vector<double> cumulative_integral(std::span<const double> values, const GeometricQuantities& geom) {
  if (values.size() != geom.size()) throw Error(ErrorKind::LengthMismatch, "cumulative integral");
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 1; i < values.size(); ++i)
    out[i] = out[i - 1] +
             0.5 * geom.h * (values[i - 1] * geom.speed[i - 1] + values[i] * geom.speed[i]);
  return out;
}

inline std::vector<double> cumulative_arclength(const GeometricQuantities& geom) {
  return cumulative_integral(std::vector<double>(geom.size(), 1.0), geom);
}

// ---------------------------------------------------------------------------
// Reparametrization along a fixed interpolant.

/// C^1 piecewise-cubic Hermite interpolant of the nodes against cumulative
/// chord length. Node slopes come from three-point non-uniform differences.
class CurveInterpolant {
 public:
  explicit CurveInterpolant(const DiscreteCurve& curve) : pts_(curve.nodes()) {
    const std::size_t n = pts_.size() - 1;
    param_.assign(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
      const double c = norm(pts_[i] - pts_[i - 1]);
      if (!(c > 0.0)) throw Error(ErrorKind::NonRegularCurve, "coincident nodes " + std::to_string(i));
      param_[i] = param_[i - 1] + c;
    }
    slope_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      // quadratic through three consecutive nodes, differentiated at node i
      const std::size_t a = (i == 0) ? 0 : (i == n ? n - 2 : i - 1);
      const double x0 = param_[a], x1 = param_[a + 1], x2 = param_[a + 2], z = param_[i];
      const double w0 = ((z - x1) + (z - x2)) / ((x0 - x1) * (x0 - x2));
      const double w1 = ((z - x0) + (z - x2)) / ((x1 - x0) * (x1 - x2));
      const double w2 = ((z - x0) + (z - x1)) / ((x2 - x0) * (x2 - x1));
      slope_[i] = pts_[a] * w0 + pts_[a + 1] * w1 + pts_[a + 2] * w2;
    }
  }

  double total() const { return param_.back(); }
  const std::vector<double>& parameters() const { return param_; }

  Point operator()(double sigma) const {
    const std::size_t n = pts_.size() - 1;
    if (sigma <= 0.0) return pts_.front();
    if (sigma >= param_[n]) return pts_.back();
    const auto it = std::upper_bound(param_.begin(), param_.end(), sigma);
    const auto j = static_cast<std::size_t>(it - param_.begin()) - 1;
    const double len = param_[j + 1] - param_[j];
    const double t = (sigma - param_[j]) / len;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return pts_[j] * h00 + slope_[j] * (h10 * len) + pts_[j + 1] * h01 + slope_[j + 1] * (h11 * len);
  }

 private:
  std::vector<Point> pts_;
  std::vector<double> param_;
  std::vector<Point> slope_;
};

/// Resample the curve so node i sits at chord-length fraction fractions[i] of
/// its interpolant. fractions must be increasing from 0 to 1.
inline DiscreteCurve resample_at_fractions(const DiscreteCurve& curve, std::span<const double> fractions) {
  const CurveInterpolant c(curve);
  std::vector<Point> out(fractions.size());
  for (std::size_t i = 0; i < fractions.size(); ++i) out[i] = c(fractions[i] * c.total());
  out.front() = curve.front();
  out.back() = curve.back();
  return DiscreteCurve(std::move(out));
}

/// Constant-speed reparametrization: new nodes lie on the interpolant of the
/// input and have equal chord lengths; endpoints are kept bit-for-bit.
inline DiscreteCurve reparametrize_constant_speed(const DiscreteCurve& curve) {
  compute_geometry(curve, 0);  // regularity check
  const CurveInterpolant c(curve);
  const std::size_t n = curve.intervals();
  const double total = c.total();

  // March n-1 equal chords of length `chord` from the start. The returned
  // mismatch (last gap minus chord) is continuous and decreasing in chord.
  std::vector<double> sig(n + 1, 0.0);
  const Point end = curve.back();
  auto march = [&](double chord) {
    sig[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const Point p0 = c(sig[i - 1]);
      if (norm(end - p0) <= chord) return -chord;  // ran past the end
      double lo = sig[i - 1], hi = std::min(total, sig[i - 1] + 4.0 * chord);
      double guess = std::min(sig[i - 1] + chord, 0.5 * (lo + hi));
      // Newton on |c(s) - p0| = chord with bisection fallback
      for (int it = 0; it < 80; ++it) {
        const double f = norm(c(guess) - p0) - chord;
        if (std::abs(f) < 1e-15 * total) break;
        if (f > 0) hi = guess; else lo = guess;
        const double eps = 1e-7 * chord;
        const double fp = (norm(c(guess + eps) - p0) - norm(c(guess - eps) - p0)) / (2 * eps);
        double next = (fp > 0) ? guess - f / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        guess = next;
      }
      sig[i] = guess;
    }
    sig[n] = total;
    return norm(end - c(sig[n - 1])) - chord;
  };

  // Illinois iteration on the chord length so the last gap matches
  const double nominal = total / static_cast<double>(n);
  double a = 0.5 * nominal, b = 1.5 * nominal;
  double fa = march(a), fb = march(b);
  while (fb > 0.0) { a = b; fa = fb; b *= 1.5; fb = march(b); }
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    const double m = (a * fb - b * fa) / (fb - fa);
    const double fm = march(m);
    if (std::abs(fm) < 1e-14 * total || std::abs(b - a) < 1e-16 * total) break;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m; fa = fm;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = m; fb = fm;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  std::vector<Point> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = c(sig[i]);
  out.front() = curve.front();
  out.back() = curve.back();
  return DiscreteCurve(std::move(out));
}

/// gamma(x) for x in [0, 1] by six-point Lagrange interpolation in the grid
/// parameter. Exact at the nodes.
inline Point lagrange_at(const DiscreteCurve& curve, double x) {
  const std::size_t n = curve.intervals();
  const double u = x * static_cast<double>(n);
  const double fl = std::floor(u);
  if (u == fl && fl >= 0.0 && fl <= static_cast<double>(n)) return curve[static_cast<std::size_t>(fl)];
  long first = static_cast<long>(fl) - 2;
  first = std::clamp(first, 0L, static_cast<long>(n) - 5);
  Point acc{0.0, 0.0};
  for (long a = first; a < first + 6; ++a) {
    double w = 1.0;
    for (long b = first; b < first + 6; ++b)
      if (b != a) w *= (u - static_cast<double>(b)) / static_cast<double>(a - b);
    acc += curve[static_cast<std::size_t>(a)] * w;
  }
  return acc;
}

/// Chord speeds N |gamma_{i+1} - gamma_i|, i = 0..N-1.
inline std::vector<double> chord_speeds(const DiscreteCurve& curve) {
  const std::size_t n = curve.intervals();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = norm(curve[i + 1] - curve[i]) * static_cast<double>(n);
  return out;
}

}  // namespace elasticflow
