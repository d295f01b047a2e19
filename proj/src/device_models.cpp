#include "dqpass/device_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dqpass/error.hpp"
#include "dqpass/transforms.hpp"

namespace dqpass {

namespace {

constexpr double kMaxTau = 0.1;
constexpr double kCurrentMismatchTol = 1e-6;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidParameter(std::string(name) + " must be positive and finite");
  }
}

RationalModel make_model(Matrix a, Matrix b, Matrix c, Matrix d, ModelKind kind) {
  RationalModel m{std::move(a), std::move(b), std::move(c), std::move(d), kind};
  m.validate();
  return m;
}

}  // namespace

void validate(const DroopParams& p) {
  require_positive(p.k_pf, "k_pf");
  require_positive(p.k_qv, "k_qv");
  require_positive(p.tau, "tau");
}

std::vector<std::string> warnings(const DroopParams& p) {
  std::vector<std::string> out;
  if (p.tau > kMaxTau) {
    std::ostringstream msg;
    msg << "droop derivative filter tau = " << p.tau
        << " s exceeds " << kMaxTau << " s; the filter is expected to be fast";
    out.push_back(msg.str());
  }
  return out;
}

VsgParams VsgParams::at(double inertia, double damping, double emf, double reactance,
                        double rotor_angle, const OperatingPoint& op) {
  VsgParams p;
  p.inertia = inertia;
  p.damping = damping;
  p.emf = emf;
  p.reactance = reactance;
  p.rotor_angle = rotor_angle;
  p.zeta = rotor_angle - op.angle();
  return p;
}

void validate(const VsgParams& p) {
  require_positive(p.inertia, "inertia M");
  require_positive(p.emf, "E_g");
  require_positive(p.reactance, "x_g");
  if (!(p.damping >= 0.0)) throw InvalidParameter("damping D_m must be >= 0");
  if (!std::isfinite(p.rotor_angle) || !std::isfinite(p.zeta)) {
    throw InvalidParameter("VSG angles must be finite");
  }
}

OperatingPoint vsg_operating_point(double emf, double reactance, double rotor_angle,
                                   double v_d, double v_q) {
  require_positive(reactance, "x_g");
  // Stator: v_Q = E_g cos δ - x_g i_D,  v_D = E_g sin δ + x_g i_Q  (i drawn).
  const double drawn_d = (emf * std::cos(rotor_angle) - v_q) / reactance;
  const double drawn_q = (v_d - emf * std::sin(rotor_angle)) / reactance;
  return {v_d, v_q, -drawn_d, -drawn_q};
}

void validate(const LoadParams& p) {
  require_positive(p.tau, "tau");
  if (!std::isfinite(p.k_pf) || !std::isfinite(p.k_pv) || !std::isfinite(p.k_qf) ||
      !std::isfinite(p.k_qv)) {
    throw InvalidParameter("load sensitivities must be finite");
  }
}

// --- droop ------------------------------------------------------------------

RationalModel droop_js(const DroopParams& p) {
  validate(p);
  // k_pf s/(1+sτ) = k_pf/τ - (k_pf/τ²)/(s + 1/τ)
  const double t = p.tau;
  return make_model(Matrix::Constant(1, 1, -1.0 / t),
                    (Matrix(1, 2) << 1.0, 0.0).finished(),
                    (Matrix(2, 1) << -p.k_pf / (t * t), 0.0).finished(),
                    (Matrix(2, 2) << p.k_pf / t, 0.0, 0.0, p.k_qv).finished(),
                    ModelKind::II);
}

RationalModel droop_ns(const DroopParams& p) {
  validate(p);
  // (1+sτ)/(s k_pf) = τ/k_pf + (1/k_pf)/s
  return make_model(Matrix::Zero(1, 1),
                    (Matrix(1, 2) << 1.0, 0.0).finished(),
                    (Matrix(2, 1) << 1.0 / p.k_pf, 0.0).finished(),
                    (Matrix(2, 2) << p.tau / p.k_pf, 0.0, 0.0, 1.0 / p.k_qv).finished(),
                    ModelKind::II);
}

RationalModel droop_nsd(const DroopParams& p) {
  validate(p);
  // s/(k_qv(1+sτ)) = 1/(k_qv τ) - (1/(k_qv τ²))/(s + 1/τ)
  const double t = p.tau;
  return make_model(Matrix::Constant(1, 1, -1.0 / t),
                    (Matrix(1, 2) << 0.0, 1.0).finished(),
                    (Matrix(2, 1) << 0.0, -1.0 / (p.k_qv * t * t)).finished(),
                    (Matrix(2, 2) << 1.0 / p.k_pf, 0.0, 0.0, 1.0 / (p.k_qv * t)).finished(),
                    ModelKind::III);
}

// --- virtual synchronous generator -------------------------------------------

VsgCoefficients vsg_coefficients(const VsgParams& p, const OperatingPoint& op) {
  validate(p);
  const double v = op.voltage();
  const double cz = std::cos(p.zeta);
  const double sz = std::sin(p.zeta);
  const double den = 2.0 * v * cz - p.emf;
  if (std::abs(den) <= 1e-9 * std::max(p.emf, v)) {
    throw SingularOperatingPoint("2 V_o cos(zeta_o) equals E_g at this operating point");
  }
  VsgCoefficients k;
  k.k11 = p.reactance * (2.0 * v - p.emf * cz) / (p.emf * v * den);
  k.k12 = p.reactance * sz / (v * den);
  k.k22 = p.reactance * cz / (v * den);
  return k;
}

RationalModel vsg_ys(const VsgParams& p, const OperatingPoint& op) {
  validate(p);
  const OperatingPoint expected =
      vsg_operating_point(p.emf, p.reactance, p.rotor_angle, op.v_d(), op.v_q());
  if (std::abs(expected.i_d() - op.i_d()) > kCurrentMismatchTol ||
      std::abs(expected.i_q() - op.i_q()) > kCurrentMismatchTol) {
    throw InconsistentOperatingPoint(
        "operating currents do not satisfy the VSG stator equation");
  }

  const double m = p.inertia;
  const double x = p.reactance;
  const double e = p.emf;
  const double delta = p.rotor_angle;
  const double v_d = op.v_d();
  const double v_q = op.v_q();
  // Currents drawn by the machine (opposite to the operating-point convention).
  const double i_d = -op.i_d();
  const double i_q = -op.i_q();

  // Stator, solved for the drawn current:
  //   Δi_D = (-Δv_Q - E_g sin δ Δδ)/x_g,   Δi_Q = (Δv_D - E_g cos δ Δδ)/x_g.
  // Electrical power drawn, P = v_D i_D + v_Q i_Q, linearized:
  //   ΔP = (i_D + v_Q/x_g) Δv_D + (i_Q - v_D/x_g) Δv_Q
  //        - (E_g/x_g)(v_D sin δ + v_Q cos δ) Δδ,
  // where v_D sin δ + v_Q cos δ = V_o cos ζ_o.
  // Swing: Δδ' = Δω,  M Δω' = -D_m Δω + ΔP (mechanical power constant).
  const double sync = e * op.voltage() * std::cos(p.zeta) / x;
  Matrix a(2, 2);
  a << 0.0, 1.0, -sync / m, -p.damping / m;
  Matrix b(2, 2);
  b << 0.0, 0.0, (i_d + v_q / x) / m, (i_q - v_d / x) / m;
  Matrix c(2, 2);
  c << -e * std::sin(delta) / x, 0.0, -e * std::cos(delta) / x, 0.0;
  Matrix d(2, 2);
  d << 0.0, -1.0 / x, 1.0 / x, 0.0;
  return make_model(std::move(a), std::move(b), std::move(c), std::move(d), ModelKind::I);
}

RationalModel vsg_ns(const VsgParams& p, const OperatingPoint& op) {
  const VsgCoefficients k = vsg_coefficients(p, op);
  // 1/(M s² + D_m s): x1' = x2, x2' = -(D_m/M) x2 + u1/M, y1 = x1.
  const double m = p.inertia;
  Matrix a(2, 2);
  a << 0.0, 1.0, 0.0, -p.damping / m;
  Matrix b(2, 2);
  b << 0.0, 0.0, 1.0 / m, 0.0;
  Matrix c(2, 2);
  c << 1.0, 0.0, 0.0, 0.0;
  Matrix d(2, 2);
  d << k.k11, k.k12, k.k12, k.k22;
  return make_model(std::move(a), std::move(b), std::move(c), std::move(d), ModelKind::II);
}

CMatrix vsg_jd(const VsgParams& p, const OperatingPoint& op, Complex s) {
  const VsgCoefficients k = vsg_coefficients(p, op);
  CMatrix jd(2, 2);
  jd(0, 0) = 1.0 / (p.inertia * s + p.damping) + s * k.k11;
  jd(0, 1) = s * k.k12;
  jd(1, 0) = s * k.k12;
  jd(1, 1) = s * k.k22;
  return jd;
}

RationalModel vsg_nsd(const VsgParams& p, const OperatingPoint& op, double tau) {
  require_positive(tau, "tau");
  if (!(p.damping > 0.0)) throw InvalidParameter("vsg_nsd requires D_m > 0");
  const VsgCoefficients k = vsg_coefficients(p, op);
  const double m = p.inertia;
  // 𝒩_sd = F(s) J_d(s) with F = 1/(1+sτ):
  //   F·1/(M s + D_m) on channel 1  -> states w, q
  //   s F K = (K - K F)/τ           -> filter states z1, z2
  Matrix a = Matrix::Zero(4, 4);
  a(0, 0) = -p.damping / m;
  a(1, 0) = 1.0 / tau;
  a(1, 1) = -1.0 / tau;
  a(2, 2) = -1.0 / tau;
  a(3, 3) = -1.0 / tau;
  Matrix b = Matrix::Zero(4, 2);
  b(0, 0) = 1.0 / m;
  b(2, 0) = 1.0 / tau;
  b(3, 1) = 1.0 / tau;
  Matrix c = Matrix::Zero(2, 4);
  c(0, 1) = 1.0;
  c(0, 2) = -k.k11 / tau;
  c(0, 3) = -k.k12 / tau;
  c(1, 2) = -k.k12 / tau;
  c(1, 3) = -k.k22 / tau;
  Matrix d(2, 2);
  d << k.k11 / tau, k.k12 / tau, k.k12 / tau, k.k22 / tau;
  return make_model(std::move(a), std::move(b), std::move(c), std::move(d), ModelKind::III);
}

// --- load ---------------------------------------------------------------------

RationalModel load_js(const LoadParams& p) {
  validate(p);
  const double t = p.tau;
  return make_model(Matrix::Constant(1, 1, -1.0 / t),
                    (Matrix(1, 2) << 1.0, 0.0).finished(),
                    (Matrix(2, 1) << -p.k_pf / (t * t), -p.k_qf / (t * t)).finished(),
                    (Matrix(2, 2) << p.k_pf / t, p.k_pv, p.k_qf / t, p.k_qv).finished(),
                    ModelKind::II);
}

RationalModel load_nsd(const LoadParams& p) {
  validate(p);
  const double det = p.k_pf * p.k_qv - p.k_pv * p.k_qf;
  const double scale = std::max({std::abs(p.k_pf * p.k_qv), std::abs(p.k_pv * p.k_qf),
                                 std::numeric_limits<double>::min()});
  if (std::abs(det) <= 1e-12 * scale) {
    throw SingularLoad("k_pf k_qv - k_pv k_qf vanishes; the load has no inverse model");
  }
  const double t = p.tau;
  return make_model(Matrix::Constant(1, 1, -1.0 / t),
                    (Matrix(1, 2) << -p.k_qf / det, p.k_pf / det).finished(),
                    (Matrix(2, 1) << 0.0, -1.0 / (t * t)).finished(),
                    (Matrix(2, 2) << p.k_qv / det, -p.k_pv / det, -p.k_qf / (det * t),
                     p.k_pf / (det * t))
                        .finished(),
                    ModelKind::III);
}

// --- dispatch -------------------------------------------------------------------

std::string_view device_name(const DeviceParams& params) {
  struct Visitor {
    std::string_view operator()(const DroopParams&) const { return "droop"; }
    std::string_view operator()(const VsgParams&) const { return "vsg"; }
    std::string_view operator()(const LoadParams&) const { return "load"; }
  };
  return std::visit(Visitor{}, params);
}

RationalModel device_ys(const DeviceParams& params, const OperatingPoint& op) {
  struct Visitor {
    const OperatingPoint& op;
    RationalModel operator()(const DroopParams& p) const {
      return modelII_to_I(droop_js(p), op, Side::device);
    }
    RationalModel operator()(const VsgParams& p) const { return vsg_ys(p, op); }
    RationalModel operator()(const LoadParams& p) const {
      return modelII_to_I(load_js(p), op, Side::device);
    }
  };
  return std::visit(Visitor{op}, params);
}

}  // namespace dqpass
