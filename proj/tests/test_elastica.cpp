#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "elasticflow/curves.hpp"
#include "elasticflow/elastica.hpp"
#include "elasticflow/energy.hpp"
#include "oracles.hpp"

using namespace elasticflow;

namespace {

const oracle::LoopElastica& loop() {
  static const auto e = oracle::LoopElastica::solve(1.0);
  return e;
}

DiscreteCurve loop_curve(std::size_t n) {
  std::vector<Point> p;
  for (const auto& u : loop().sample(n)) p.push_back({u.x, u.y});
  return DiscreteCurve(std::move(p));
}

std::vector<Point> test_direction(std::size_t n) {
  std::vector<Point> psi(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    psi[i] = {0.7 * std::sin(std::numbers::pi * x) - 0.4 * std::sin(2.0 * std::numbers::pi * x),
              1.1 * std::sin(std::numbers::pi * x) + 0.3 * std::sin(3.0 * std::numbers::pi * x)};
  }
  return psi;
}

}  // namespace

TEST(Elastica, LoopOracleIsSelfConsistent) {
  const auto& e = loop();
  EXPECT_NEAR(e.theta0 * 180.0 / std::numbers::pi, 139.29, 0.01);
  EXPECT_NEAR(e.length, 5.30188, 1e-5);
  // along this elastica the bending energy equals mu times the length
  EXPECT_NEAR(e.energy(), 2.0 * e.length, 1e-6);
  const auto end = e.sample(64).back();
  EXPECT_NEAR(end.y, 0.0, 1e-10);
  EXPECT_NEAR(end.k, 0.0, 1e-10);
}

TEST(Elastica, OracleSamplesHaveSmallResidual) {
  const double r64 = detail::max_abs(detail::elastica_rows(loop_curve(64), 1.0, 0.0));
  const double r128 = detail::max_abs(detail::elastica_rows(loop_curve(128), 1.0, 0.0));
  EXPECT_LT(r64, 2e-2);
  EXPECT_NEAR(r64 / r128, 4.0, 0.3);
}

TEST(Elastica, JacobianMatchesFiniteDifferences) {
  auto c = loop_curve(48);
  for (std::size_t i = 0; i <= 48; ++i) c[i].y += 1e-3 * std::sin(0.7 * static_cast<double>(i));
  const double anchor = c[48].x;
  const auto jac = elastica_jacobian(c, 1.0, anchor);
  const double eps = 1e-6;
  for (std::size_t col : {0u, 3u, 17u, 50u, 97u}) {
    auto plus = c, minus = c;
    plus[col / 2][static_cast<int>(col % 2)] += eps;
    minus[col / 2][static_cast<int>(col % 2)] -= eps;
    const auto rp = detail::elastica_rows(plus, 1.0, anchor);
    const auto rm = detail::elastica_rows(minus, 1.0, anchor);
    for (std::size_t r = 0; r < rp.size(); ++r) {
      const double fd = (rp[r] - rm[r]) / (2.0 * eps);
      const double ad = jac.in_band(r, col) ? jac(r, col) : 0.0;
      EXPECT_NEAR(ad, fd, 1e-4 * (1.0 + std::abs(fd))) << "row " << r << " col " << col;
    }
  }
}

TEST(Elastica, NewtonConvergesQuadraticallyFromOracle) {
  const auto [z, rep] = newton_refine(loop_curve(64), 1.0, 8, 1e-9);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.newton_iterations, 4);
  const auto& h = rep.residual_history;
  ASSERT_GE(h.size(), 3u);
  for (std::size_t i = 0; i + 1 < h.size() && h[i] > 1e-7; ++i) EXPECT_LT(h[i + 1], 10.0 * h[i] * h[i]);
  EXPECT_LT(rep.interior_residual, 1e-9);
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(rep.boundary_residuals[0][k]), 1e-9);
  // the right third-order row is implied by the discrete system only up to O(h^2)
  EXPECT_LT(std::abs(rep.boundary_residuals[1][3]), 3e-2);
  EXPECT_EQ(z[64].x, loop_curve(64)[64].x);
}

TEST(Elastica, RefinedCurveConvergesToOracle) {
  const auto a = newton_refine(loop_curve(64), 1.0, 8, 1e-9).first;
  const auto b = newton_refine(loop_curve(128), 1.0, 8, 1e-8).first;
  const double ea = max_node_distance(a, loop_curve(64));
  const double eb = max_node_distance(b, loop_curve(128));
  EXPECT_LT(ea, 2e-2);
  EXPECT_NEAR(ea / eb, 4.0, 0.4);
  EXPECT_NEAR(elastic_energy(b, 1.0).total, loop().energy(), 5e-3);
}

TEST(Elastica, StartOutsideBasinDiverges) {
  try {
    newton_refine(sine_arch_curve(0.1, 1.0, 64), 1.0, 8, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NewtonDiverged);
  }
}

TEST(Elastica, SegmentIsNotRefinable) {
  // zero interior residual but the third-order row is mu with no nearby root
  try {
    newton_refine(segment_curve(1.0, 64), 1.0, 8, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::NewtonDiverged || e.kind() == ErrorKind::SingularJacobian) << e.what();
  }
}

TEST(Elastica, ResidualIsOddUnderHalfTurn) {
  auto c = loop_curve(64);
  std::vector<Point> m(65);
  for (std::size_t i = 0; i <= 64; ++i) m[i] = {-c[64 - i].x, -c[64 - i].y};
  const auto a = el_residual(compute_geometry(c, 2), 1.0);
  const auto b = el_residual(compute_geometry(DiscreteCurve(std::move(m)), 2), 1.0);
  for (std::size_t i = 0; i <= 64; ++i) EXPECT_NEAR(a[i], -b[64 - i], 1e-9);
}

TEST(Elastica, FirstVariationMatchesEnergyDerivative) {
  const auto c = sine_arch_curve(0.1, 1.0, 256);
  // grows the amplitude, plus a tangential part
  std::vector<Point> psi(257);
  for (std::size_t i = 0; i <= 256; ++i) {
    const double x = static_cast<double>(i) / 256.0;
    psi[i] = {0.3 * std::sin(std::numbers::pi * x), std::sin(2.0 * std::numbers::pi * x)};
  }
  const double e = 1e-5;
  std::vector<Point> p = c.nodes(), q = c.nodes();
  for (std::size_t i = 0; i <= 256; ++i) {
    p[i] += psi[i] * e;
    q[i] -= psi[i] * e;
  }
  const double fd = (elastic_energy(DiscreteCurve(std::move(p)), 1.0).total -
                     elastic_energy(DiscreteCurve(std::move(q)), 1.0).total) /
                    (2.0 * e);
  const double fv = first_variation(c, 1.0, psi);
  EXPECT_NEAR(fv, fd, 1e-2 * std::abs(fd));
}

TEST(Elastica, FirstVariationVanishesAtSecondOrder) {
  const auto a = newton_refine(loop_curve(64), 1.0, 8, 1e-9).first;
  const auto b = newton_refine(loop_curve(128), 1.0, 8, 1e-8).first;
  const double fa = std::abs(first_variation(a, 1.0, test_direction(64)));
  const double fb = std::abs(first_variation(b, 1.0, test_direction(128)));
  EXPECT_LT(fa, 5e-2);
  EXPECT_GT(fa / fb, 3.0);
}

TEST(Elastica, FirstVariationChecksSizes) {
  const auto c = sine_arch_curve(0.1, 1.0, 32);
  try {
    first_variation(c, 1.0, test_direction(16));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
}
