#include <gtest/gtest.h>

#include <cmath>

#include "dqpass/compliance.hpp"
#include "dqpass/device_models.hpp"
#include "dqpass/error.hpp"
#include "dqpass/io.hpp"
#include "support.hpp"

using namespace dqpass;

namespace {

const DroopParams kDroop{10.0, 5.0, 0.01};
const OperatingPoint kOp(0.1, 0.995, 0.6, 0.3);

std::vector<Complex> reference_spectrum_a() {
  return {{-0.99, 0},       {-14.76, 0},      {-3.61, 23.41},     {-3.61, -23.41},
          {-48.28, 27.99},  {-48.28, -27.99}, {-450.27, 60.69},   {-450.27, -60.69},
          {-575.78, 756.66}, {-575.78, -756.66}};
}

// Static shunt susceptance b in D-Q form, with the phasor v_Q + j v_D:
// i_D = b v_Q, i_Q = -b v_D (drawn). b > 0 is capacitive.
Matrix shunt_susceptance(double b) { return (Matrix(2, 2) << 0.0, b, -b, 0.0).finished(); }

RationalModel shunt_js(double b) {
  const Matrix y = shunt_susceptance(b);
  const Eigen::Vector2d drawn = y * Eigen::Vector2d(0.0, 1.0);
  const OperatingPoint op(0.0, 1.0, -drawn(0), -drawn(1));
  return modelI_to_II(static_model(y, ModelKind::I), op, Side::device);
}

PipelineConfig droop_config() {
  PipelineConfig cfg;
  cfg.spec.k_qv_c = 0.4;
  cfg.spec.tau = 0.01;
  cfg.auto_order = true;
  return cfg;
}

}  // namespace

TEST(Cluster, ReferenceSpectrumAPasses) {
  const ClusterReport r = cluster_check(reference_spectrum_a());
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.slow.size() + r.fast.size(), 10u);
  EXPECT_EQ(r.fast.size(), 4u);
  EXPECT_NEAR(std::abs(Complex(-48.28, 27.99)), 55.8, 0.05);
  EXPECT_NEAR(std::abs(Complex(-450.27, 60.69)), 454.3, 0.1);
}

TEST(Cluster, GapViolation) {
  const ClusterReport r = cluster_check(std::vector<Complex>{{-100.0, 0.0}, {-1.0, 0.0}});
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(r.gap_violations.size(), 1u);
  EXPECT_EQ(r.gap_violations[0], Complex(-100.0, 0.0));
}

TEST(Cluster, EmptyModel) {
  EXPECT_TRUE(cluster_check(static_model(Matrix::Identity(2, 2), ModelKind::I)).ok);
}

TEST(KqvMargin, Droop) {
  const MarginCurve ok = kqv_margin(droop_js(kDroop), default_low_grid(), 0.4);
  EXPECT_NEAR(ok.minimum, 5.0, 1e-12);
  EXPECT_TRUE(ok.ok);
  EXPECT_FALSE(kqv_margin(droop_js(kDroop), default_low_grid(), 6.0).ok);
}

TEST(KqvMargin, ShuntCapacitorHasNoMargin) {
  // A capacitor draws Q = -b V², so Re J_s(2,2) = -2 b V².
  const MarginCurve m = kqv_margin(shunt_js(0.2), default_low_grid(), 0.0);
  EXPECT_NEAR(m.minimum, -0.4, 1e-12);
  EXPECT_FALSE(m.ok);
  EXPECT_FALSE(kqv_margin(shunt_js(0.2), default_low_grid(), 0.1).ok);
}

TEST(KqvMargin, ShuntReactorSign) {
  // With drawn power as the Model-II output a reactor absorbs Q = V²/x, so its
  // Q-V slope is +2 V²/x.
  const MarginCurve m = kqv_margin(shunt_js(-0.2), default_low_grid(), 0.0);
  EXPECT_NEAR(m.minimum, 0.4, 1e-12);
}

TEST(FreqRegulation, DroopConstant) {
  const RationalModel jsd = modelII_to_III(extract_kqvc(droop_js(kDroop), 0.4), 0.01);
  const MarginCurve c = freq_regulation_check(jsd, default_low_grid());
  for (double v : c.values) EXPECT_NEAR(v, 10.0, 1e-9);
  EXPECT_TRUE(c.ok);
}

TEST(FreqRegulation, ZeroKpfFails) {
  // k_pf = 0 is outside DroopParams, so build J_s by hand.
  const RationalModel js =
      static_model((Matrix(2, 2) << 0.0, 0.0, 0.0, 5.0).finished(), ModelKind::II);
  const MarginCurve c = freq_regulation_check(modelII_to_III(js, 0.01), default_low_grid());
  EXPECT_NEAR(c.minimum, 0.0, 1e-12);
  EXPECT_FALSE(c.ok);
}

TEST(FreqRegulation, DampedVsgPositive) {
  const double emf = 1.05, xg = 0.3, delta = 0.4;
  const OperatingPoint op = vsg_operating_point(emf, xg, delta, 0.1, 0.995);
  const VsgParams p = VsgParams::at(10.0, 2.0, emf, xg, delta, op);
  const RationalModel js = modelI_to_II(vsg_ys(p, op), op, Side::device);
  const MarginCurve c = freq_regulation_check(modelII_to_III(js, 0.01), default_low_grid());
  EXPECT_TRUE(c.ok);
  EXPECT_GT(c.minimum, 0.0);
}

TEST(Pipeline, DroopScanChainMatchesClosedForm) {
  const RationalModel ys = device_ys(kDroop, kOp);
  const ComplianceReport r = run_pipeline(sample(ys, make_grid(0.01, 200.0, 400)), kOp,
                                          droop_config());
  ASSERT_TRUE(r.nsd.has_value());
  // Exporting k_qv^c leaves k_qv - k_qv^c in the device.
  const RationalModel ref = droop_nsd(DroopParams{10.0, 4.6, 0.01});
  const FreqGrid grid = make_grid(0.01, 10.0, 200);
  for (double w : grid.omega()) {
    EXPECT_LT(fixtures::max_rel_diff(eval_tf(*r.nsd, w), eval_tf(ref, w)), 1e-6);
  }
  for (int s : {1, 2, 5, 6, 7, 8}) {
    EXPECT_TRUE(r.steps[static_cast<std::size_t>(s - 1)].pass) << s << " " <<
        r.steps[static_cast<std::size_t>(s - 1)].cause;
  }
  for (const StepOutcome& s : r.steps) EXPECT_TRUE(s.evaluated);
}

TEST(Pipeline, IndustrialMotorFailsLastStep) {
  const LoadParams p{0.006, 0.07, 0.003, 0.5, 0.01};
  const ComplianceReport r = run_pipeline(device_ys(p, kOp), kOp, PipelineConfig{});
  EXPECT_FALSE(r.steps[7].pass);
  EXPECT_FALSE(r.overall);
  ASSERT_TRUE(r.nsd_verdict.has_value());
  EXPECT_FALSE(r.nsd_verdict->overall);
}

TEST(Pipeline, UndampedVsgFailsFrequencyRegulation) {
  const double emf = 1.05, xg = 0.3, delta = 0.4;
  const OperatingPoint op = vsg_operating_point(emf, xg, delta, 0.1, 0.995);
  const VsgParams p = VsgParams::at(10.0, 0.0, emf, xg, delta, op);
  const ComplianceReport r = run_pipeline(vsg_ys(p, op), op, PipelineConfig{});
  EXPECT_FALSE(r.steps[5].pass);
  EXPECT_FALSE(r.overall);
  // Earlier diagnostics still present.
  EXPECT_TRUE(r.cluster.has_value());
  EXPECT_TRUE(r.kqv.has_value());
}

TEST(Pipeline, ShortScanFailsCoverage) {
  const RationalModel ys = device_ys(kDroop, kOp);
  const ComplianceReport r =
      run_pipeline(sample(ys, make_grid(1.0, 200.0, 200)), kOp, droop_config());
  EXPECT_FALSE(r.steps[0].pass);
  EXPECT_FALSE(r.overall);
  EXPECT_TRUE(r.steps[1].evaluated);
}

TEST(Pipeline, InsufficientKqvRecorded) {
  PipelineConfig cfg = droop_config();
  cfg.spec.k_qv_c = 6.0;
  const ComplianceReport r = run_pipeline(device_ys(kDroop, kOp), kOp, cfg);
  EXPECT_FALSE(r.steps[4].pass);
  EXPECT_FALSE(r.steps[4].cause.empty());
  EXPECT_TRUE(r.steps[7].evaluated);
}

TEST(Pipeline, DeterministicJson) {
  const RationalModel ys = device_ys(kDroop, kOp);
  const FreqResponse scan = sample(ys, make_grid(0.1, 200.0, 300));
  const std::string a = compliance_to_json(run_pipeline(scan, kOp, droop_config()));
  const std::string b = compliance_to_json(run_pipeline(scan, kOp, droop_config()));
  EXPECT_EQ(a, b);
}

TEST(Pipeline, RationalEntryMarksFitSteps) {
  const ComplianceReport r = run_pipeline(device_ys(kDroop, kOp), kOp, droop_config());
  EXPECT_TRUE(r.steps[0].pass);
  EXPECT_TRUE(r.steps[1].pass);
  EXPECT_FALSE(r.fit.has_value());
}
