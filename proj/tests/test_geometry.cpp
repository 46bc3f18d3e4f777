#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "elasticflow/curves.hpp"
#include "elasticflow/energy.hpp"
#include "elasticflow/geometry.hpp"
#include "oracles.hpp"

using namespace elasticflow;

namespace {

struct SupErrors {
  double k = 0, dsk = 0, ds2k = 0;
};

SupErrors sine_arch_errors(std::size_t n) {
  const auto g = oracle::sine_arch();
  const auto geom = compute_geometry(sine_arch_curve(0.1, 1.0, n), 2);
  SupErrors e;
  for (std::size_t i = 0; i <= n; ++i) {
    const auto ref = oracle::graph_curvature(g, static_cast<double>(i) / static_cast<double>(n));
    e.k = std::max(e.k, std::abs(geom.ds(0)[i] - ref.k));
    e.dsk = std::max(e.dsk, std::abs(geom.ds(1)[i] - ref.dsk));
    e.ds2k = std::max(e.ds2k, std::abs(geom.ds(2)[i] - ref.ds2k));
  }
  return e;
}

}  // namespace

TEST(Geometry, SegmentIsFlat) {
  const auto geom = compute_geometry(segment_curve(2.0, 64), 2);
  for (std::size_t i = 0; i < geom.size(); ++i) {
    EXPECT_NEAR(geom.curvature()[i], 0.0, 1e-12);
    EXPECT_NEAR(geom.speed[i], 2.0, 1e-12);
    EXPECT_NEAR(geom.tangent[i].x, 1.0, 1e-15);
    EXPECT_NEAR(geom.tangent[i].y, 0.0, 1e-15);
    EXPECT_NEAR(geom.normal[i].x, 0.0, 1e-15);
    EXPECT_NEAR(geom.normal[i].y, 1.0, 1e-15);
  }
}

TEST(Geometry, SemicircleHasUnitCurvature) {
  const auto geom = compute_geometry(semicircle_curve(1.0, 256), 2);
  for (std::size_t i = 0; i < geom.size(); ++i) {
    EXPECT_NEAR(geom.curvature()[i], 1.0, 1e-3);
    // second-order differences: |D_x gamma| = sin(pi h) / h in the interior
    EXPECT_NEAR(geom.speed[i], std::numbers::pi, 2e-4);
  }
  const double h = 1.0 / 256.0;
  EXPECT_NEAR(geom.speed[128], std::sin(std::numbers::pi * h) / h, 1e-12);
}

TEST(Geometry, FrameIsOrthonormal) {
  const auto geom = compute_geometry(sine_arch_curve(0.3, 1.5, 100), 2);
  for (std::size_t i = 0; i < geom.size(); ++i) {
    const auto& t = geom.tangent[i];
    const auto& nu = geom.normal[i];
    EXPECT_NEAR(norm(t), 1.0, 1e-12);
    EXPECT_EQ(nu.x, -t.y);
    EXPECT_EQ(nu.y, t.x);
    EXPECT_NEAR(dot(t, nu), 0.0, 1e-12);
  }
}

TEST(Geometry, SerretFrenetResidualIsSecondOrder) {
  double prev = 0.0;
  for (std::size_t n : {64, 128, 256}) {
    const auto geom = compute_geometry(sine_arch_curve(0.1, 1.0, n), 0);
    const auto dt = differentiate<Point>(geom.tangent, 1, geom.h);
    double err = 0.0;
    // nested one-sided differences lose an order in the two nodes next to each end
    for (std::size_t i = 2; i + 2 <= n; ++i) {
      const Point r = dt[i] * (1.0 / geom.speed[i]) - geom.normal[i] * geom.curvature()[i];
      err = std::max(err, norm(r));
    }
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 3.2);
    }
    prev = err;
  }
}

TEST(Geometry, SineArchMatchesGraphOracle) {
  const auto e128 = sine_arch_errors(128);
  const auto e256 = sine_arch_errors(256);
  const double h2 = 1.0 / (256.0 * 256.0);
  EXPECT_LT(e256.k, 50.0 * h2);
  EXPECT_LT(e256.dsk, 1700.0 * h2);
  EXPECT_LT(e256.ds2k, 30000.0 * h2);
  EXPECT_NEAR(e128.k / e256.k, 4.0, 0.6);
  EXPECT_NEAR(e128.dsk / e256.dsk, 4.0, 0.8);
  EXPECT_NEAR(e128.ds2k / e256.ds2k, 4.0, 0.8);
}

TEST(Geometry, HigherArclengthDerivativesNeedWideGrids) {
  EXPECT_THROW(compute_geometry(sine_arch_curve(0.1, 1.0, 64), 3), Error);
  EXPECT_NO_THROW(compute_geometry(sine_arch_curve(0.1, 1.0, 96), 3));
  try {
    compute_geometry(sine_arch_curve(0.1, 1.0, 100), 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingDerivativeOrder);
  }
  const auto geom = compute_geometry(sine_arch_curve(0.1, 1.0, 64), 1);
  try {
    (void)geom.ds(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingDerivativeOrder);
  }
}

TEST(Geometry, RepeatedNodeIsNotRegular) {
  auto nodes = segment_curve(1.0, 16).nodes();
  for (auto& p : nodes) p = Point{0.5, 0.0};
  try {
    compute_geometry(DiscreteCurve(nodes), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonRegularCurve);
  }
}

TEST(Geometry, TooFewNodes) {
  try {
    DiscreteCurve c(std::vector<Point>(8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StencilTooWide);
  }
}

TEST(Quadrature, SegmentLengthIsExact) {
  const auto geom = compute_geometry(segment_curve(2.0, 64), 0);
  EXPECT_DOUBLE_EQ(arclength_integrate(std::vector<double>(65, 1.0), geom), 2.0);
}

TEST(Quadrature, SemicircleLengthAndBending) {
  const auto geom = compute_geometry(semicircle_curve(1.0, 256), 0);
  EXPECT_NEAR(curve_length(geom), std::numbers::pi, 1e-4);
  std::vector<double> k2(geom.size());
  for (std::size_t i = 0; i < k2.size(); ++i) k2[i] = geom.curvature()[i] * geom.curvature()[i];
  EXPECT_NEAR(arclength_integrate(k2, geom), std::numbers::pi, 1e-3);
}

TEST(Quadrature, LengthMismatch) {
  const auto geom = compute_geometry(segment_curve(2.0, 64), 0);
  try {
    arclength_integrate(std::vector<double>(10, 1.0), geom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}

TEST(Reparametrize, ConstantSpeedCurveIsFixed) {
  const auto c = semicircle_curve(1.0, 128);
  const auto r = reparametrize_constant_speed(c);
  EXPECT_LT(max_node_distance(c, r), 1e-8);
  EXPECT_LT(max_node_distance(r, reparametrize_constant_speed(r)), 1e-8);
}

TEST(Reparametrize, ChirpedSegment) {
  // (x^2, 0) on [0.1, 1] mapped to the unit parameter interval
  const auto c = sample_curve(
      [](double x) {
        const double u = 0.1 + 0.9 * x;
        return Point{u * u, 0.0};
      },
      64);
  const auto r = reparametrize_constant_speed(c);
  EXPECT_EQ(r.front().x, c.front().x);
  EXPECT_EQ(r.back().x, c.back().x);
  EXPECT_EQ(r.front().y, c.front().y);
  EXPECT_EQ(r.back().y, c.back().y);
  const auto sp = chord_speeds(r);
  const auto [lo, hi] = std::minmax_element(sp.begin(), sp.end());
  EXPECT_LT((*hi - *lo) / *lo, 1e-8);
}

TEST(Reparametrize, EnergyIsInvariant) {
  // sine arch traversed with a non-uniform parameter
  const auto g = oracle::sine_arch();
  auto warped = [&](std::size_t n) {
    return sample_curve(
        [&](double x) {
          const double u = x + 0.1 * std::sin(std::numbers::pi * x) * (1.0 - x);
          return Point{u, g.f(u)};
        },
        n);
  };
  const double fine = elastic_energy(sine_arch_curve(0.1, 1.0, 4096), 1.0).total;
  const auto c = warped(256);
  const double before = elastic_energy(c, 1.0).total;
  const double after = elastic_energy(reparametrize_constant_speed(c), 1.0).total;
  EXPECT_NEAR(before, fine, 1e-3 * fine);
  EXPECT_NEAR(after, fine, 1e-3 * fine);
  EXPECT_NEAR(after, before, 1e-3 * fine);
}
