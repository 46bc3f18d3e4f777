#include <gtest/gtest.h>

#include <cmath>

#include "elasticflow/admissibility.hpp"
#include "elasticflow/curves.hpp"
#include "elasticflow/diagnostics.hpp"
#include "elasticflow/simulation.hpp"

using namespace elasticflow;

namespace {

std::vector<DiagnosticsRecord> exponential_records(std::size_t count, double delta) {
  // E = exp(-t), D = exp(-t): the identity dE/dt = -D holds exactly
  std::vector<DiagnosticsRecord> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].time = static_cast<double>(i) * delta;
    out[i].energy.total = std::exp(-out[i].time);
    out[i].dissipation = std::exp(-out[i].time);
  }
  return out;
}

DiscreteCurve shifted(const DiscreteCurve& c, Point d) {
  std::vector<Point> out = c.nodes();
  for (auto& p : out) p += d;
  return DiscreteCurve(std::move(out));
}

}  // namespace

TEST(Diagnostics, DissipationDefectIsSecondOrderInSpacing) {
  const double a = verify_dissipation(exponential_records(11, 0.1));
  const double b = verify_dissipation(exponential_records(21, 0.05));
  EXPECT_LT(a, 1e-2);
  EXPECT_NEAR(a / b, 4.0, 0.2);
}

TEST(Diagnostics, DissipationNeedsThreeUniformRecords) {
  try {
    verify_dissipation(exponential_records(2, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientRecords);
  }
  auto r = exponential_records(4, 0.1);
  r[3].time = 0.35;
  EXPECT_THROW(verify_dissipation(r), Error);
}

TEST(Diagnostics, LengthTakesPrecedenceOverDegeneracy) {
  FlowConfig cfg;
  DiagnosticsRecord r;
  r.length = 0.01;
  r.boundary_tau2 = {0.01, 0.5};
  EXPECT_EQ(classify_singularity(r, cfg), TerminationReason::SingularLength);
  r.length = 1.0;
  EXPECT_EQ(classify_singularity(r, cfg), TerminationReason::SingularDegeneracy);
  r.boundary_tau2 = {0.5, 0.5};
  EXPECT_FALSE(classify_singularity(r, cfg).has_value());
}

TEST(Diagnostics, RecordOnSineArch) {
  FlowConfig cfg;
  FlowState s{0.25, sine_arch_curve(0.1, 1.0, 128), 7, std::nullopt, {}};
  const auto r = record(s, cfg);
  EXPECT_EQ(r.time, 0.25);
  EXPECT_EQ(r.step, 7u);
  // one-sided tangent, O(h^2)
  EXPECT_NEAR(r.boundary_tau2[0], 0.2 * M_PI / std::sqrt(1.0 + 0.04 * M_PI * M_PI), 1e-3);
  EXPECT_NEAR(r.boundary_tau2[1], r.boundary_tau2[0], 1e-12);
  EXPECT_GT(r.dissipation, 0.0);
  EXPECT_FALSE(r.norm_ds6k.has_value());
  EXPECT_EQ(r.energy.total, r.energy.bending + r.energy.length);
}

TEST(Diagnostics, SixthDerivativeNormOnlyOnFineGrids) {
  FlowConfig cfg;
  FlowState s{0.0, sine_arch_curve(0.1, 1.0, kDs6MinGrid), 0, std::nullopt, {}};
  EXPECT_TRUE(record(s, cfg, true).norm_ds6k.has_value());
  s.curve = sine_arch_curve(0.1, 1.0, 256);
  EXPECT_FALSE(record(s, cfg, true).norm_ds6k.has_value());
}

TEST(Diagnostics, HausdorffDistance) {
  const auto c = sine_arch_curve(0.1, 1.0, 64);
  EXPECT_LT(hausdorff_distance(c, c), 1e-15);
  const auto d = shifted(c, {0.0, 0.01});
  EXPECT_NEAR(hausdorff_distance(c, d), 0.01, 1e-3);
  EXPECT_EQ(hausdorff_distance(c, d), hausdorff_distance(d, c));
  // same point set, different sampling
  const auto fine = sine_arch_curve(0.1, 1.0, 256);
  EXPECT_LT(hausdorff_distance(c, fine), 1e-3);
}

TEST(Diagnostics, CurvatureEvolutionDefectShrinksWithTimeStep) {
  // steps well past the initial layer so the time error dominates
  auto c = prepare_initial(sine_arch_curve(0.1, 1.0, 128), 1.0);
  FlowConfig cfg;
  cfg.n_grid = 128;
  cfg.override_admissibility = true;
  double prev = 0.0;
  for (double dt : {4e-6, 2e-6}) {
    cfg.dt = dt;
    FlowState s{0.0, c, 0, std::nullopt, {}};
    const auto warm = static_cast<int>(std::lround(2e-4 / dt));
    for (int k = 0; k < warm; ++k) s = step_semi_implicit(s, cfg);
    const auto s1 = step_semi_implicit(s, cfg);
    const auto s2 = step_semi_implicit(s1, cfg);
    const double d = verify_curvature_evolution({s, s1, s2}, cfg);
    if (prev > 0.0) {
      EXPECT_LT(d, prev);
    }
    prev = d;
  }
}

TEST(Diagnostics, CadenceRecordsDropOffCadenceTail) {
  FlowConfig cfg;
  cfg.record_every = 10;
  FlowResult r;
  for (std::size_t step : {0, 10, 20, 23}) {
    DiagnosticsRecord d;
    d.step = step;
    r.records.push_back(d);
  }
  const auto c = cadence_records(r, cfg);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.back().step, 20u);
}
