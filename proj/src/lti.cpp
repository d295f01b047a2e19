#include "dqpass/lti.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dqpass/error.hpp"

namespace dqpass {

namespace {

// Reciprocal condition estimate of (sI - A) below which s is treated as a pole.
constexpr double kResolventRcond = 1e-11;
constexpr double kHermitianTol = 1e-9;
// Band edges compare with a relative slack so that 2π·10 computed from a grid
// endpoint still counts as "low".
constexpr double kEdgeSlack = 1e-12;

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::I:
      return "I";
    case ModelKind::II:
      return "II";
    case ModelKind::III:
      return "III";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "I") return ModelKind::I;
  if (text == "II") return ModelKind::II;
  if (text == "III") return ModelKind::III;
  throw InputError("unknown model kind '" + std::string(text) + "'");
}

RangeTag classify_omega(double omega) {
  const double low_edge = kTwoPi * kLowBandEdgeHz;
  const double high_edge = kTwoPi * kHighBandEdgeHz;
  if (omega <= low_edge * (1.0 + kEdgeSlack)) return RangeTag::low;
  if (omega >= high_edge * (1.0 - kEdgeSlack)) return RangeTag::high;
  return RangeTag::mid;
}

FreqGrid::FreqGrid(std::vector<double> omega, Spacing spacing)
    : omega_(std::move(omega)), spacing_(spacing) {
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!std::isfinite(omega_[i]) || omega_[i] < 0.0) {
      throw BadRange("frequency grid points must be finite and >= 0");
    }
    if (i > 0 && !(omega_[i] > omega_[i - 1])) {
      throw BadRange("frequency grid must be strictly increasing");
    }
  }
}

FreqGrid make_grid(double f_min_hz, double f_max_hz, std::size_t n_points,
                   Spacing spacing) {
  if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz) || !std::isfinite(f_max_hz)) {
    throw BadRange("grid requires 0 < f_min < f_max");
  }
  if (n_points < 2) throw BadRange("grid requires at least two points");

  std::vector<double> omega(n_points);
  const double last = static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / last;
    double f = 0.0;
    if (spacing == Spacing::log) {
      f = std::exp(std::log(f_min_hz) + t * (std::log(f_max_hz) - std::log(f_min_hz)));
    } else {
      f = f_min_hz + t * (f_max_hz - f_min_hz);
    }
    omega[i] = kTwoPi * f;
  }
  // Pin the endpoints exactly.
  omega.front() = kTwoPi * f_min_hz;
  omega.back() = kTwoPi * f_max_hz;
  return FreqGrid(std::move(omega), spacing);
}

void RationalModel::validate() const {
  const auto n = A.rows();
  if (A.cols() != n) throw InputError("A must be square");
  if (B.rows() != n || C.cols() != n) {
    throw InputError("B/C dimensions do not match A");
  }
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw InputError("D dimensions do not match B/C");
  }
  if (!all_finite(A) || !all_finite(B) || !all_finite(C) || !all_finite(D)) {
    throw InputError("state-space matrices must be finite");
  }
}

RationalModel static_model(const Matrix& D, ModelKind kind) {
  RationalModel m;
  m.A = Matrix::Zero(0, 0);
  m.B = Matrix::Zero(0, D.cols());
  m.C = Matrix::Zero(D.rows(), 0);
  m.D = D;
  m.kind = kind;
  return m;
}

CMatrix eval_at(const RationalModel& model, Complex s) {
  CMatrix result = model.D.cast<Complex>();
  if (model.states() == 0) return result;

  CMatrix resolvent = -model.A.cast<Complex>();
  resolvent.diagonal().array() += s;
  const Eigen::PartialPivLU<CMatrix> lu(resolvent);
  if (!(lu.rcond() > kResolventRcond)) {
    throw SingularResolvent("s = (" + std::to_string(s.real()) + ", " +
                            std::to_string(s.imag()) + ") is a pole of the model");
  }
  result.noalias() += model.C.cast<Complex>() * lu.solve(model.B.cast<Complex>());
  if (!result.allFinite()) throw SingularResolvent("non-finite transfer matrix value");
  return result;
}

CMatrix eval_tf(const RationalModel& model, double omega) {
  return eval_at(model, Complex(0.0, omega));
}

void FreqResponse::validate() const {
  if (samples.size() != grid.size()) {
    throw InputError("frequency response needs exactly one sample per grid point");
  }
  for (const auto& s : samples) {
    if (s.rows() != samples.front().rows() || s.cols() != samples.front().cols()) {
      throw InputError("frequency response samples differ in shape");
    }
    if (!s.allFinite()) throw InputError("frequency response has non-finite entries");
  }
}

FreqResponse sample(const RationalModel& model, const FreqGrid& grid) {
  FreqResponse r;
  r.grid = grid;
  r.kind = model.kind;
  r.samples.reserve(grid.size());
  for (double w : grid.omega()) r.samples.push_back(eval_tf(model, w));
  return r;
}

Spectrum eig_general(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("eig_general needs a square matrix");
  if (!m.allFinite()) throw InputError("eig_general needs finite entries");
  Spectrum out;
  if (m.rows() == 0) return out;

  const Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("Hessenberg-QR iteration did not converge");
  }
  const auto& ev = solver.eigenvalues();
  out.values.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.values.begin(), out.values.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

std::vector<double> eig_hermitian(const CMatrix& h) {
  if (h.rows() != h.cols()) throw InputError("eig_hermitian needs a square matrix");
  const double scale = h.norm();
  if ((h - h.adjoint()).norm() > kHermitianTol * scale) {
    throw NotHermitian("matrix is not Hermitian within tolerance");
  }
  if (h.rows() == 0) return {};
  if (h.rows() == 1) return {h(0, 0).real()};
  if (h.rows() == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
    return {mean - radius, mean + radius};
  }
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("Hermitian eigenvalue iteration did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

CMatrix hermitian_part(const CMatrix& g) { return g + g.adjoint(); }

RationalModel pre_post(const Matrix& left, const RationalModel& g,
                       const Matrix& right, const Matrix& offset) {
  RationalModel out;
  out.A = g.A;
  out.B = g.B * right;
  out.C = left * g.C;
  out.D = left * g.D * right + offset;
  out.kind = g.kind;
  return out;
}

RationalModel add(const RationalModel& g1, const RationalModel& g2) {
  if (g1.D.rows() != g2.D.rows() || g1.D.cols() != g2.D.cols()) {
    throw InputError("cannot add models with different port counts");
  }
  const auto n1 = g1.A.rows();
  const auto n2 = g2.A.rows();
  RationalModel out;
  out.A = Matrix::Zero(n1 + n2, n1 + n2);
  out.A.topLeftCorner(n1, n1) = g1.A;
  out.A.bottomRightCorner(n2, n2) = g2.A;
  out.B.resize(n1 + n2, g1.D.cols());
  out.B << g1.B, g2.B;
  out.C.resize(g1.D.rows(), n1 + n2);
  out.C << g1.C, g2.C;
  out.D = g1.D + g2.D;
  out.kind = g1.kind;
  return out;
}

RationalModel series(const RationalModel& first, const RationalModel& second) {
  if (first.D.rows() != second.D.cols()) {
    throw InputError("series connection: port mismatch");
  }
  const auto n1 = first.A.rows();
  const auto n2 = second.A.rows();
  RationalModel out;
  out.A = Matrix::Zero(n1 + n2, n1 + n2);
  out.A.topLeftCorner(n1, n1) = first.A;
  out.A.bottomLeftCorner(n2, n1) = second.B * first.C;
  out.A.bottomRightCorner(n2, n2) = second.A;
  out.B.resize(n1 + n2, first.D.cols());
  out.B << first.B, second.B * first.D;
  out.C.resize(second.D.rows(), n1 + n2);
  out.C << second.D * first.C, second.C;
  out.D = second.D * first.D;
  out.kind = second.kind;
  return out;
}

RationalModel add_feedthrough(const RationalModel& g, const Matrix& delta) {
  RationalModel out = g;
  out.D += delta;
  return out;
}

}  // namespace dqpass
