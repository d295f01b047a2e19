#include <gtest/gtest.h>

#include <random>

#include "dqpass/device_models.hpp"
#include "dqpass/error.hpp"
#include "dqpass/transforms.hpp"
#include "support.hpp"

using namespace dqpass;

namespace {

const DroopParams kDroop{10.0, 5.0, 0.01};

CMatrix c2(const Matrix2& m) { return m.cast<Complex>(); }

// Pointwise oracle: (E Y ∓ C) F evaluated from the admittance sample.
CMatrix j_oracle(const CMatrix& y, const OperatingPoint& op, Side side) {
  const double sign = side == Side::device ? -1.0 : 1.0;
  return (c2(op.e_matrix()) * y + sign * c2(op.c_matrix())) * c2(op.f_matrix());
}

}  // namespace

TEST(TransformSpec, Validation) {
  EXPECT_NO_THROW(TransformSpec{}.validate());
  EXPECT_THROW((TransformSpec{0.0, 0.0, Side::device}).validate(), InvalidParameter);
  EXPECT_THROW((TransformSpec{0.01, -0.1, Side::device}).validate(), InvalidParameter);
}

TEST(ModelIToII, OpenCircuitGivesMinusCF) {
  const OperatingPoint op(0.2, 0.97, 0.5, -0.3);
  const RationalModel y = static_model(Matrix::Zero(2, 2), ModelKind::I);
  const RationalModel j = modelI_to_II(y, op, Side::device);
  EXPECT_EQ(j.states(), 0u);
  EXPECT_EQ(j.kind, ModelKind::II);
  const Matrix expected = -op.c_matrix() * op.f_matrix();
  EXPECT_LT((j.D - expected).norm(), 1e-15);
}

TEST(ModelIToII, PointwiseAgreementBothSides) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const RationalModel y = fixtures::random_stable(rng, 4);
    const OperatingPoint op = fixtures::random_op(rng);
    for (Side side : {Side::device, Side::network}) {
      const RationalModel j = modelI_to_II(y, op, side);
      for (double w : {0.2, 5.0, 300.0}) {
        EXPECT_LT(fixtures::max_rel_diff(eval_tf(j, w), j_oracle(eval_tf(y, w), op, side)),
                  1e-12);
      }
    }
  }
}

TEST(ModelIToII, PolesPreserved) {
  std::mt19937 rng(2);
  const RationalModel y = fixtures::random_stable(rng, 6);
  const OperatingPoint op = fixtures::random_op(rng);
  const RationalModel j = modelI_to_II(y, op, Side::device);
  EXPECT_LT(hausdorff_distance(eig_general(y.A).values, eig_general(j.A).values), 1e-12);
}

TEST(ModelIToII, RoundTrip) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const RationalModel y = fixtures::random_stable(rng, 4);
    const OperatingPoint op = fixtures::random_op(rng);
    for (Side side : {Side::device, Side::network}) {
      const RationalModel back = modelII_to_I(modelI_to_II(y, op, side), op, side);
      for (double w : {0.3, 30.0}) {
        EXPECT_LT(fixtures::max_rel_diff(eval_tf(back, w), eval_tf(y, w)), 1e-12);
      }
    }
  }
}

TEST(ModelIToII, DroopKqvAtLowFrequency) {
  const OperatingPoint op(0.1, 0.995, 0.6, 0.3);
  const RationalModel js = modelI_to_II(device_ys(kDroop, op), op, Side::device);
  EXPECT_NEAR(eval_tf(js, kTwoPi * 0.01)(1, 1).real(), 5.0, 1e-10);
}

TEST(ModelIIToIII, StaticIdentity) {
  const RationalModel g = static_model(Matrix::Identity(2, 2), ModelKind::II);
  const RationalModel jd = modelII_to_III(g, 0.01);
  EXPECT_EQ(jd.states(), 2u);
  EXPECT_EQ(jd.kind, ModelKind::III);
  for (double w : {1e-3, 1.0, 100.0}) {
    const Complex s(0.0, w);
    const Complex ref = (1.0 + s * 0.01) / s;
    const CMatrix g3 = eval_tf(jd, w);
    EXPECT_LT(std::abs(g3(0, 0) - ref), 1e-12 * std::abs(ref));
    EXPECT_LT(std::abs(g3(0, 1)), 1e-12);
  }
  EXPECT_GT(std::abs(eval_tf(jd, 1e-6)(0, 0)), 1e5);
}

TEST(ModelIIToIII, DividesBackToModelII) {
  std::mt19937 rng(4);
  const double tau = 0.01;
  for (int trial = 0; trial < 5; ++trial) {
    RationalModel g = fixtures::random_stable(rng, 4);
    g.kind = ModelKind::II;
    const RationalModel gd = modelII_to_III(g, tau);
    for (double w : {1e-3, 0.1, 10.0, 1e3}) {
      const Complex s(0.0, w);
      const CMatrix back = eval_tf(gd, w) * (s / (1.0 + s * tau));
      EXPECT_LT(fixtures::max_rel_diff(back, eval_tf(g, w)), 1e-9);
    }
  }
}

TEST(ModelIIToIII, DroopJsd) {
  const RationalModel jsd = modelII_to_III(droop_js(kDroop), kDroop.tau);
  for (double w : {0.05, 2.0, 40.0}) {
    const Complex s(0.0, w);
    const CMatrix g = eval_tf(jsd, w);
    EXPECT_LT(std::abs(g(0, 0) - 10.0), 1e-9);
    EXPECT_LT(std::abs(g(1, 1) - 5.0 * (1.0 + s * 0.01) / s), 1e-9 * std::abs(g(1, 1)));
  }
}

TEST(InvertTf, StaticIdentity) {
  const RationalModel inv = invert_tf(static_model(Matrix::Identity(2, 2), ModelKind::II));
  EXPECT_EQ(inv.states(), 0u);
  EXPECT_LT((inv.D - Matrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(InvertTf, DroopJsGivesNs) {
  const RationalModel ns = invert_tf(droop_js(kDroop));
  for (double w : {0.01, 1.0, 100.0}) {
    const Complex s(0.0, w);
    EXPECT_LT(std::abs(eval_tf(ns, w)(0, 0) - (1.0 + s * 0.01) / (s * 10.0)),
              1e-10 * std::abs((1.0 + s * 0.01) / (s * 10.0)));
    EXPECT_NEAR(eval_tf(ns, w)(1, 1).real(), 0.2, 1e-12);
  }
}

TEST(InvertTf, SingularFeedthrough) {
  Matrix d(2, 2);
  d << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(invert_tf(static_model(d, ModelKind::I)), ImproperInverse);
  Matrix ill(2, 2);
  ill << 1.0, 0.0, 0.0, 1e-9;
  EXPECT_THROW(invert_tf(static_model(ill, ModelKind::I)), ImproperInverse);
}

TEST(InvertTf, ProductIsIdentityAndDoubleInverse) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const RationalModel g = fixtures::random_stable(rng, 5);
    const RationalModel inv = invert_tf(g);
    const RationalModel twice = invert_tf(inv);
    const FreqGrid grid = make_grid(0.1, 100.0, 20);
    for (double w : grid.omega()) {
      const CMatrix gw = eval_tf(g, w);
      EXPECT_LT((gw * eval_tf(inv, w) - CMatrix::Identity(2, 2)).norm(), 1e-8);
      EXPECT_LT(fixtures::max_rel_diff(eval_tf(twice, w), gw), 1e-8);
    }
  }
}

TEST(SeriesResistance, MatchesImpedanceSum) {
  std::mt19937 rng(6);
  const RationalModel y = fixtures::random_stable(rng, 4);
  const RationalModel yr = add_series_resistance(y, 0.05);
  for (double w : {0.5, 50.0}) {
    const CMatrix z = eval_tf(y, w).inverse() + 0.05 * CMatrix::Identity(2, 2);
    EXPECT_LT(fixtures::max_rel_diff(eval_tf(yr, w), z.inverse()), 1e-10);
  }
  EXPECT_THROW(add_series_resistance(y, -1.0), InvalidParameter);
}

TEST(ExtractKqvc, DroopMargin) {
  const RationalModel js = droop_js(kDroop);
  const RationalModel out = extract_kqvc(js, 0.4);
  EXPECT_NEAR(eval_tf(out, kTwoPi * 0.1)(1, 1).real(), 4.6, 1e-12);
  const RationalModel same = extract_kqvc(js, 0.0);
  EXPECT_LT((same.D - js.D).norm(), 1e-15);
  try {
    extract_kqvc(js, 6.0);
    FAIL() << "expected InsufficientKqv";
  } catch (const InsufficientKqv& e) {
    EXPECT_NEAR(e.available(), 5.0, 1e-9);
  }
}

TEST(Properness, ZeroFeedthroughWithCurrent) {
  const OperatingPoint op(0.0, 1.0, 1.0, 0.0);
  const Matrix2 d = Matrix2::Zero();
  EXPECT_TRUE(check_properness(d, op));
  const PropernessReport r = properness_report(d, op);
  // det(C F) = -(i_D² + i_Q²) V_o².
  EXPECT_NEAR(r.det_plus, -1.0, 1e-14);
  EXPECT_NEAR(r.det_minus, -1.0, 1e-14);
}

TEST(Properness, ZeroFeedthroughZeroCurrent) {
  EXPECT_FALSE(check_properness(Matrix2::Zero(), OperatingPoint(0.0, 1.0, 0.0, 0.0)));
}

TEST(Properness, SeriesResistanceFeedthrough) {
  const Matrix2 d = Matrix2::Identity() / 0.01;
  const OperatingPoint op(0.0, 1.0, 0.0, 0.0);
  EXPECT_TRUE(check_properness(d, op));
  EXPECT_NEAR(properness_report(d, op).det_plus, 1e4, 1e-8);
}

TEST(Hausdorff, Basics) {
  EXPECT_EQ(hausdorff_distance({}, {}), 0.0);
  EXPECT_NEAR(hausdorff_distance({Complex(0, 0)}, {Complex(3, 4)}), 5.0, 1e-15);
  EXPECT_NEAR(hausdorff_distance({Complex(0, 0), Complex(1, 0)}, {Complex(0, 0)}), 1.0, 1e-15);
}

TEST(PoleIdentity, RandomPairs) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const RationalModel yn = fixtures::random_stable(rng, 4);
    const RationalModel ys = fixtures::random_stable(rng, 4);
    const OperatingPoint op = fixtures::random_op(rng);
    const PoleIdentityReport r = pole_identity_check(yn, ys, op, 0.01);
    EXPECT_TRUE(r.identical) << r.distance;
    EXPECT_TRUE(r.extra_pole_only);
    EXPECT_LT(r.extra_pole_error, 1e-6);
    EXPECT_FALSE(r.repeated_zero_pole);
  }
}

TEST(PoleIdentity, G3ResponseMatchesModelIIIInverse) {
  // Independent route: invert the Model-III sum pointwise.
  std::mt19937 rng(8);
  const double tau = 0.01;
  const RationalModel yn = fixtures::random_stable(rng, 3);
  const RationalModel ys = fixtures::random_stable(rng, 3);
  const OperatingPoint op = fixtures::random_op(rng);
  const RationalModel jnd = modelII_to_III(modelI_to_II(yn, op, Side::network), tau);
  const RationalModel jsd = modelII_to_III(modelI_to_II(ys, op, Side::device), tau);
  const RationalModel g2 = invert_tf(
      add(modelI_to_II(yn, op, Side::network), modelI_to_II(ys, op, Side::device)));
  for (double w : {0.3, 7.0, 90.0}) {
    const Complex s(0.0, w);
    const CMatrix direct = (eval_tf(jnd, w) + eval_tf(jsd, w)).inverse();
    const CMatrix via_g2 = eval_tf(g2, w) * (s / (1.0 + s * tau));
    EXPECT_LT(fixtures::max_rel_diff(via_g2, direct), 1e-9);
  }
}

TEST(PoleIdentity, ZeroDampingVsgWithZeroKpfPopulation) {
  // Undamped VSG facing a population with no P-f response: J_n has a zero
  // first column, so nothing restores the angle and the closed loop has a
  // double pole at the origin.
  const double emf = 1.05, xg = 0.3, delta = 0.4;
  const OperatingPoint op = vsg_operating_point(emf, xg, delta, 0.1, 0.995);
  const VsgParams p = VsgParams::at(10.0, 0.0, emf, xg, delta, op);
  Matrix jn(2, 2);
  jn << 0.0, 0.0, 0.0, 3.0;
  const RationalModel yn = modelII_to_I(static_model(jn, ModelKind::II), op, Side::network);
  const PoleIdentityReport r = pole_identity_check(yn, vsg_ys(p, op), op, 0.01);
  EXPECT_TRUE(r.identical) << r.distance;
  EXPECT_TRUE(r.repeated_zero_pole);

  // With damping the origin is clear.
  const VsgParams damped = VsgParams::at(10.0, 2.0, emf, xg, delta, op);
  EXPECT_FALSE(pole_identity_check(yn, vsg_ys(damped, op), op, 0.01).repeated_zero_pole);
}
