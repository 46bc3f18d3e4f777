#include <gtest/gtest.h>

#include <cmath>

#include "elasticflow/mms.hpp"

using namespace elasticflow;

TEST(Mms, ManufacturedCurveMeetsAttachmentAndNearlySecondOrderRows) {
  // exact for gamma*; the sampled curve meets the one-sided second difference to O(h^3)
  const ManufacturedSolution sol;
  const auto a = boundary_residuals(sol.sample(64, 0.3), 1.0);
  const auto b = boundary_residuals(sol.sample(128, 0.3), 1.0);
  for (int e = 0; e < 2; ++e) {
    EXPECT_LT(std::abs(a[e][0]), 1e-15);
    EXPECT_LT(std::abs(a[e][1]), 1e-9);
    EXPECT_LT(std::abs(a[e][2]), 1e-3);
    EXPECT_NEAR(std::abs(a[e][2] / b[e][2]), 8.0, 0.5);
  }
}

TEST(Mms, JetsMatchFiniteDifferences) {
  const ManufacturedSolution sol;
  const double x = 0.37, t = 0.2, e = 1e-4;
  const auto j = sol.jets(x, t);
  const Point d1 = (sol.at(x + e, t) - sol.at(x - e, t)) / (2.0 * e);
  const Point d2 = (sol.at(x + e, t) - sol.at(x, t) * 2.0 + sol.at(x - e, t)) / (e * e);
  EXPECT_NEAR(j.d1.y, d1.y, 1e-6);
  EXPECT_NEAR(j.d2.y, d2.y, 1e-5);
  const Point v = (sol.at(x, t + e) - sol.at(x, t - e)) / (2.0 * e);
  EXPECT_NEAR(sol.velocity(x, t).y, v.y, 1e-9);
}

TEST(Mms, SpatialAndTemporalOrders) {
  const auto r = run_mms_study(MmsStudy{});
  ASSERT_EQ(r.spatial.size(), 4u);
  ASSERT_EQ(r.temporal.size(), 3u);
  EXPECT_NEAR(r.spatial_order, 2.0, 0.2);
  EXPECT_NEAR(r.temporal_order, 1.0, 0.15);
  for (std::size_t i = 1; i < r.spatial.size(); ++i) EXPECT_LT(r.spatial[i].error, r.spatial[i - 1].error);
}

TEST(Mms, ObservedOrderOfExactPowerLaw) {
  EXPECT_NEAR(observed_order({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}), 2.0, 1e-12);
}

TEST(Mms, StudyNeedsTwoLevels) {
  MmsStudy s;
  s.grids = {64};
  EXPECT_THROW(run_mms_study(s), Error);
}
