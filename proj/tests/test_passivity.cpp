#include <gtest/gtest.h>

#include <random>

#include "dqpass/device_models.hpp"
#include "dqpass/error.hpp"
#include "dqpass/passivity.hpp"
#include "dqpass/transforms.hpp"
#include "support.hpp"

using namespace dqpass;

namespace {

// D-Q admittance of a series R-L branch, ω0 the synchronous frequency:
// Z(s) = (R + sL) I + ω0 L J, realized with the inductor currents as states.
RationalModel series_rl(double r, double l, double w0 = 377.0) {
  RationalModel m;
  m.A.resize(2, 2);
  m.A << -r / l, w0, -w0, -r / l;
  m.B = Matrix::Identity(2, 2) / l;
  m.C = Matrix::Identity(2, 2);
  m.D = Matrix::Zero(2, 2);
  return m;
}

RationalModel integrator(double gain = 1.0) {
  RationalModel m;
  m.A = Matrix::Zero(2, 2);
  m.B = Matrix::Identity(2, 2) * gain;
  m.C = Matrix::Identity(2, 2);
  m.D = Matrix::Zero(2, 2);
  return m;
}

RationalModel double_integrator() {
  RationalModel m;
  m.A.resize(2, 2);
  m.A << 0.0, 1.0, 0.0, 0.0;
  m.B = Matrix::Zero(2, 2);
  m.B(1, 0) = 1.0;
  m.C = Matrix::Zero(2, 2);
  m.C(0, 0) = 1.0;
  m.D = Matrix::Identity(2, 2);
  return m;
}

// Random model that passes on `full`: a positive diagonal of first-order
// lags, ki/(s + ai), plus a PSD feedthrough.
RationalModel random_passive(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.1, 10.0);
  RationalModel m;
  m.A = Matrix::Zero(2, 2);
  m.A(0, 0) = -u(rng);
  m.A(1, 1) = -u(rng);
  m.B = Matrix::Identity(2, 2);
  m.C = Matrix::Zero(2, 2);
  m.C(0, 0) = u(rng);
  m.C(1, 1) = u(rng);
  Matrix g(2, 2);
  g << u(rng), u(rng) - 5.0, u(rng) - 5.0, u(rng);
  m.D = g * g.transpose() * 0.1;
  return m;
}

}  // namespace

TEST(Band, RoundTripNames) {
  for (Band b : {Band::low, Band::high, Band::full}) EXPECT_EQ(parse_band(to_string(b)), b);
  EXPECT_THROW(parse_band("mid"), InputError);
}

TEST(Rhp, StableDiagonal) {
  RationalModel m = static_model(Matrix::Identity(2, 2), ModelKind::I);
  m.A = (Matrix(2, 2) << -1.0, 0.0, 0.0, -2.0).finished();
  m.B = Matrix::Identity(2, 2);
  m.C = Matrix::Identity(2, 2);
  EXPECT_TRUE(check_rhp_poles(m).ok);
}

TEST(Rhp, UnstablePoleListed) {
  RationalModel m;
  m.A = Matrix::Constant(1, 1, 0.5);
  m.B = Matrix::Ones(1, 2);
  m.C = Matrix::Ones(2, 1);
  m.D = Matrix::Zero(2, 2);
  const RhpCheck r = check_rhp_poles(m);
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(r.poles.size(), 1u);
  EXPECT_NEAR(r.poles[0].real(), 0.5, 1e-15);
}

TEST(Rhp, ReferenceSpectrumStable) {
  const std::vector<Complex> eigs{{-0.99, 0},        {-14.76, 0},       {-3.61, 23.41},
                                  {-3.61, -23.41},   {-48.28, 27.99},   {-48.28, -27.99},
                                  {-450.27, 60.69},  {-450.27, -60.69}, {-575.78, 756.66},
                                  {-575.78, -756.66}};
  // Real block-diagonal A with exactly this spectrum.
  const auto n = static_cast<Eigen::Index>(eigs.size());
  Matrix a = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  for (std::size_t k = 0; k < eigs.size(); ++k) {
    if (eigs[k].imag() == 0.0) {
      a(i, i) = eigs[k].real();
      ++i;
    } else if (eigs[k].imag() > 0.0) {
      a(i, i) = a(i + 1, i + 1) = eigs[k].real();
      a(i, i + 1) = eigs[k].imag();
      a(i + 1, i) = -eigs[k].imag();
      i += 2;
    }
  }
  RationalModel m;
  m.A = a;
  m.B = Matrix::Ones(n, 2);
  m.C = Matrix::Ones(2, n);
  m.D = Matrix::Zero(2, 2);
  EXPECT_TRUE(check_rhp_poles(m).ok);
  EXPECT_TRUE(check_axis_poles(m).empty());
}

TEST(Psd, SeriesRLPositive) {
  const double r = 0.1, l = 0.01;
  const RationalModel y = series_rl(r, l);
  const FreqGrid grid = make_grid(0.01, 1000.0, 400);
  const PsdCurve c = check_psd_spectrum(y, grid);
  EXPECT_TRUE(c.ok());
  EXPECT_GT(c.minimum(), 0.0);
  // Closed form at one point: 2R / (R² + (ΩL ± ω0L)²).
  const std::size_t k = 200;
  const double w = grid[k];
  const double oracle = std::min(2 * r / (r * r + std::pow(w * l + 377.0 * l, 2)),
                                 2 * r / (r * r + std::pow(w * l - 377.0 * l, 2)));
  EXPECT_NEAR(c.min_eig[k], oracle, 1e-10);
}

TEST(Psd, VsgNsLowFrequencyLimit) {
  const double emf = 1.05, xg = 0.01, delta = 0.05;
  const OperatingPoint op = vsg_operating_point(emf, xg, delta, 0.1, 0.995);
  const VsgParams p = VsgParams::at(10.0, 2.0, emf, xg, delta, op);
  const FreqGrid g({1e-3, 1e-2}, Spacing::log);
  const PsdCurve c = check_psd_spectrum(vsg_ns(p, op), g);
  EXPECT_NEAR(c.min_eig[0], -5.0, 0.05);
}

TEST(Psd, DroopAdmittanceViolatesBelowTenHz) {
  const OperatingPoint op(0.1, 0.995, 0.6, 0.3);
  const PsdCurve c = check_psd_spectrum(device_ys(DroopParams{10, 5, 0.01}, op),
                                        make_grid(0.01, 200.0, 400));
  ASSERT_FALSE(c.violations.empty());
  EXPECT_LE(c.violations.front().f_lo_hz, 10.0);
  EXPECT_FALSE(c.ok_in(RangeTag::low));
}

TEST(Psd, ViolationBandsAreMaximalRuns) {
  // Static indefinite D: one band covering the whole grid.
  Matrix d(2, 2);
  d << 1.0, 0.0, 0.0, -1.0;
  const FreqGrid grid = make_grid(1.0, 100.0, 20);
  const PsdCurve c = check_psd_spectrum(static_model(d, ModelKind::I), grid);
  ASSERT_EQ(c.violations.size(), 1u);
  EXPECT_NEAR(c.violations[0].f_lo_hz, 1.0, 1e-12);
  EXPECT_NEAR(c.violations[0].f_hi_hz, 100.0, 1e-9);
  EXPECT_NEAR(c.violations[0].worst, -2.0, 1e-12);
}

TEST(Psd, TraceZeroFeedthroughAlwaysIndefinite) {
  std::mt19937 rng(41);
  std::normal_distribution<double> g;
  const FreqGrid grid = make_grid(0.01, 200.0, 50);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = g(rng), b = g(rng);
    Matrix d(2, 2);
    d << a, b, b, -a;  // symmetric with zero trace
    const PsdCurve c = check_psd_spectrum(static_model(d, ModelKind::II), grid);
    for (double e : c.min_eig) EXPECT_LT(e, 0.0);
  }
}

TEST(Psd, GridHitsPole) {
  RationalModel m = integrator();
  m.A = (Matrix(2, 2) << 0.0, 10.0, -10.0, 0.0).finished();
  const FreqGrid grid({5.0, 10.0, 20.0}, Spacing::linear);
  EXPECT_THROW(check_psd_spectrum(m, grid), GridHitsPole);
}

TEST(Psd, FromSamples) {
  const RationalModel y = series_rl(0.1, 0.01);
  const FreqResponse r = sample(y, make_grid(0.1, 100.0, 30));
  const PsdCurve a = check_psd_spectrum(r);
  const PsdCurve b = check_psd_spectrum(y, r.grid);
  for (std::size_t i = 0; i < a.min_eig.size(); ++i) EXPECT_DOUBLE_EQ(a.min_eig[i], b.min_eig[i]);
  EXPECT_THROW(check_axis_poles(r), NotRational);
}

TEST(AxisPoles, IntegratorIdentity) {
  const auto poles = check_axis_poles(integrator());
  ASSERT_EQ(poles.size(), 1u);
  EXPECT_EQ(poles[0].multiplicity, 2u);
  EXPECT_TRUE(poles[0].simple);
  EXPECT_TRUE(poles[0].residue_psd);
  EXPECT_LT((poles[0].residue - CMatrix::Identity(2, 2)).norm(), 1e-9);
  EXPECT_TRUE(passivity_verdict(integrator(), Band::full).axis_ok);
}

TEST(AxisPoles, DoubleIntegratorNotSimple) {
  const auto poles = check_axis_poles(double_integrator());
  ASSERT_EQ(poles.size(), 1u);
  EXPECT_FALSE(poles[0].simple);
  EXPECT_FALSE(passivity_verdict(double_integrator(), Band::low).overall);
}

TEST(AxisPoles, NegativeResidue) {
  const auto poles = check_axis_poles(integrator(-1.0));
  ASSERT_EQ(poles.size(), 1u);
  EXPECT_TRUE(poles[0].simple);
  EXPECT_FALSE(poles[0].residue_psd);
}

TEST(AxisPoles, ImaginaryPairResidue) {
  // 2s/(s² + 25) = 1/(s - 5j) + 1/(s + 5j): residue 1 at 5j.
  RationalModel m;
  m.A = (Matrix(2, 2) << 0.0, 1.0, -25.0, 0.0).finished();
  m.B = Matrix::Zero(2, 2);
  m.B(1, 0) = 1.0;
  m.C = Matrix::Zero(2, 2);
  m.C(0, 1) = 2.0;
  m.D = Matrix::Identity(2, 2);
  const auto poles = check_axis_poles(m);
  ASSERT_EQ(poles.size(), 1u);
  EXPECT_NEAR(poles[0].omega, 5.0, 1e-9);
  EXPECT_TRUE(poles[0].simple);
  EXPECT_NEAR(poles[0].residue(0, 0).real(), 1.0, 1e-8);
  EXPECT_TRUE(poles[0].residue_psd);
}

TEST(AxisPoles, DroopNs) {
  const auto poles = check_axis_poles(droop_ns(DroopParams{10, 5, 0.01}));
  ASSERT_EQ(poles.size(), 1u);
  EXPECT_TRUE(poles[0].simple);
  EXPECT_TRUE(poles[0].residue_psd);
}

TEST(Verdict, SeriesRLFull) {
  const PassivityVerdict v = passivity_verdict(series_rl(0.1, 0.01), Band::full);
  EXPECT_TRUE(v.overall);
  EXPECT_TRUE(v.rhp.ok);
  EXPECT_TRUE(v.psd_ok_low);
  EXPECT_TRUE(v.psd_ok_high);
}

TEST(Verdict, DroopNsdLow) {
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const DroopParams p{0.5 + 20 * u(rng), 0.5 + 10 * u(rng), 0.001 + 0.05 * u(rng)};
    EXPECT_TRUE(passivity_verdict(droop_nsd(p), Band::low).overall);
  }
}

TEST(Verdict, IndustrialMotorLow) {
  const LoadParams p{0.006, 0.07, 0.003, 0.5, 0.01};
  EXPECT_FALSE(passivity_verdict(load_nsd(p), Band::low).overall);
}

TEST(Verdict, TraceZeroNetworkFeedthroughHigh) {
  Matrix d(2, 2);
  d << 0.3, 0.7, 0.7, -0.3;
  EXPECT_FALSE(passivity_verdict(static_model(d, ModelKind::II), Band::high).overall);
}

TEST(Verdict, ConeClosure) {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const RationalModel a = random_passive(rng);
    const RationalModel b = random_passive(rng);
    ASSERT_TRUE(passivity_verdict(a, Band::full).overall);
    ASSERT_TRUE(passivity_verdict(b, Band::full).overall);
    EXPECT_TRUE(passivity_verdict(add(a, b), Band::full).overall);
    RationalModel scaled = a;
    scaled.C *= 3.5;
    scaled.D *= 3.5;
    EXPECT_TRUE(passivity_verdict(scaled, Band::full).overall);
  }
}

TEST(Verdict, BandGrids) {
  const FreqGrid lo = band_grid(Band::low);
  EXPECT_NEAR(lo.hz(0), 0.01, 1e-15);
  EXPECT_NEAR(lo.hz(lo.size() - 1), 10.0, 1e-12);
  VerdictOptions opts;
  opts.high_max_hz = 500.0;
  const FreqGrid hi = band_grid(Band::high, opts);
  EXPECT_NEAR(hi.hz(0), 35.0, 1e-12);
  EXPECT_NEAR(hi.hz(hi.size() - 1), 500.0, 1e-9);
}
