#include "dqpass/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dqpass/error.hpp"

namespace dqpass {

namespace {

constexpr double kMaxFeedthroughCond = 1e8;
constexpr double kProperRelTol = 1e-10;
constexpr double kPoleMatchTol = 1e-6;
constexpr double kZeroPoleTol = 1e-6;

Matrix offset_c(const OperatingPoint& op, Side side) {
  const Matrix2 c = op.c_matrix();
  return side == Side::device ? Matrix(-c) : Matrix(c);
}

void require_two_port(const RationalModel& g, const char* what) {
  if (g.inputs() != 2 || g.outputs() != 2) {
    throw InputError(std::string(what) + " expects a 2x2 transfer matrix");
  }
}

std::size_t count_near(const std::vector<Complex>& values, Complex target, double tol) {
  return static_cast<std::size_t>(std::count_if(
      values.begin(), values.end(),
      [&](Complex v) { return std::abs(v - target) <= tol; }));
}

}  // namespace

void TransformSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be positive");
  if (!(k_qv_c >= 0.0) || !std::isfinite(k_qv_c)) {
    throw InvalidParameter("k_qv_c must be >= 0");
  }
}

RationalModel modelI_to_II(const RationalModel& y, const OperatingPoint& op, Side side) {
  require_two_port(y, "modelI_to_II");
  const Matrix e = op.e_matrix();
  const Matrix f = op.f_matrix();
  // (E Y ∓ C) F = E Y F ∓ C F
  RationalModel out = pre_post(e, y, f, offset_c(op, side) * f);
  out.kind = ModelKind::II;
  return out;
}

RationalModel modelII_to_I(const RationalModel& j, const OperatingPoint& op, Side side) {
  require_two_port(j, "modelII_to_I");
  const Matrix e_inv = op.e_matrix().inverse();
  const Matrix f_inv = op.f_matrix().inverse();
  // J = (E Y + sC) F  =>  Y = E^{-1} J F^{-1} - sE^{-1} C, with s = ±1 by side.
  RationalModel out = pre_post(e_inv, j, f_inv, -e_inv * offset_c(op, side));
  out.kind = ModelKind::I;
  return out;
}

RationalModel modelII_to_III(const RationalModel& j, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be positive");
  const auto m = static_cast<Eigen::Index>(j.inputs());
  // τ + 1/s on every input channel.
  RationalModel lead;
  lead.A = Matrix::Zero(m, m);
  lead.B = Matrix::Identity(m, m);
  lead.C = Matrix::Identity(m, m);
  lead.D = tau * Matrix::Identity(m, m);
  RationalModel out = series(lead, j);
  out.kind = ModelKind::III;
  return out;
}

RationalModel invert_tf(const RationalModel& g) {
  g.validate();
  if (g.inputs() != g.outputs()) throw InputError("invert_tf needs a square system");
  if (g.inputs() == 0) return g;

  const Eigen::JacobiSVD<Matrix> svd(g.D);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || smax / smin > kMaxFeedthroughCond) {
    throw ImproperInverse("feedthrough is singular (cond " +
                          std::to_string(smin > 0.0 ? smax / smin
                                                    : std::numeric_limits<double>::infinity()) +
                          "); the inverse system is not proper");
  }
  const Eigen::FullPivLU<Matrix> lu(g.D);
  const Matrix d_inv = lu.inverse();
  RationalModel out;
  out.A = g.A - g.B * d_inv * g.C;
  out.B = g.B * d_inv;
  out.C = -d_inv * g.C;
  out.D = d_inv;
  out.kind = g.kind;
  return out;
}

RationalModel add_series_resistance(const RationalModel& y, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParameter("series resistance must be >= 0");
  if (r == 0.0) return y;
  const auto n = static_cast<Eigen::Index>(y.outputs());
  const RationalModel z = add_feedthrough(invert_tf(y), r * Matrix::Identity(n, n));
  return invert_tf(z);
}

FreqGrid default_low_grid() { return make_grid(0.01, kLowBandEdgeHz, 200); }

RationalModel extract_kqvc(const RationalModel& js, double k_qv_c, const FreqGrid& low_grid) {
  require_two_port(js, "extract_kqvc");
  if (!(k_qv_c >= 0.0) || !std::isfinite(k_qv_c)) {
    throw InvalidParameter("k_qv_c must be >= 0");
  }
  if (k_qv_c == 0.0) return js;
  double available = std::numeric_limits<double>::infinity();
  for (double w : low_grid.omega()) {
    available = std::min(available, eval_tf(js, w)(1, 1).real());
  }
  if (available < k_qv_c) {
    throw InsufficientKqv("device can export at most k_qv = " + std::to_string(available) +
                              " pu, requested " + std::to_string(k_qv_c),
                          available);
  }
  RationalModel out = js;
  out.D(1, 1) -= k_qv_c;
  return out;
}

PropernessReport properness_report(const Matrix2& d, const OperatingPoint& op) {
  const Matrix2 e = op.e_matrix();
  const Matrix2 c = op.c_matrix();
  const Matrix2 f = op.f_matrix();
  const Matrix2 plus = (e * d + c) * f;
  const Matrix2 minus = (e * d - c) * f;
  PropernessReport r;
  r.det_plus = plus.determinant();
  r.det_minus = minus.determinant();
  r.proper_plus = std::abs(r.det_plus) > kProperRelTol * plus.squaredNorm();
  r.proper_minus = std::abs(r.det_minus) > kProperRelTol * minus.squaredNorm();
  return r;
}

bool check_properness(const Matrix2& d, const OperatingPoint& op) {
  return properness_report(d, op).proper_plus;
}

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    for (Complex x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (Complex y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

PoleIdentityReport pole_identity_check(const RationalModel& y_n, const RationalModel& y_s,
                                       const OperatingPoint& op, double tau) {
  require_two_port(y_n, "pole_identity_check");
  require_two_port(y_s, "pole_identity_check");
  if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");

  const RationalModel g1 = invert_tf(add(y_n, y_s));
  const RationalModel j_sum =
      add(modelI_to_II(y_n, op, Side::network), modelI_to_II(y_s, op, Side::device));
  const RationalModel g2 = invert_tf(j_sum);

  // (J_nd + J_sd)^{-1} = s/(1 + sτ) G2 = G2/τ - (1/τ^2) (s + 1/τ)^{-1} G2,
  // filter states appended after G2's states.
  const auto n = g2.A.rows();
  const auto p = g2.D.rows();
  const auto m = g2.D.cols();
  RationalModel g3;
  g3.A = Matrix::Zero(n + p, n + p);
  g3.A.topLeftCorner(n, n) = g2.A;
  g3.A.bottomLeftCorner(p, n) = g2.C;
  g3.A.bottomRightCorner(p, p) = -Matrix::Identity(p, p) / tau;
  g3.B.resize(n + p, m);
  g3.B << g2.B, g2.D;
  g3.C.resize(p, n + p);
  g3.C << g2.C / tau, -Matrix::Identity(p, p) / (tau * tau);
  g3.D = g2.D / tau;
  g3.kind = ModelKind::III;

  PoleIdentityReport r;
  r.g1 = eig_general(g1.A);
  r.g2 = eig_general(g2.A);
  r.g3 = eig_general(g3.A);
  r.distance = hausdorff_distance(r.g1.values, r.g2.values);
  r.identical = r.distance <= kPoleMatchTol;

  const Complex extra(-1.0 / tau, 0.0);
  std::vector<Complex> expected = r.g2.values;
  expected.push_back(extra);
  r.extra_pole_only = hausdorff_distance(r.g3.values, expected) <= kPoleMatchTol;
  double nearest = std::numeric_limits<double>::infinity();
  for (Complex v : r.g3.values) nearest = std::min(nearest, std::abs(v - extra));
  r.extra_pole_error = nearest;

  r.repeated_zero_pole = count_near(r.g2.values, Complex(0.0, 0.0), kZeroPoleTol) >= 2;
  return r;
}

}  // namespace dqpass
