#pragma once

// Linear time-invariant building blocks: frequency grids, real state-space
// models, sampled frequency responses, and the eigenvalue routines used by the
// passivity checks.

#include <complex>
#include <cstddef>
#include <numbers>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dqpass {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Upper edge of the low-frequency band (inclusive).
inline constexpr double kLowBandEdgeHz = 10.0;
/// Lower edge of the high-frequency band (inclusive).
inline constexpr double kHighBandEdgeHz = 35.0;

/// Interface-variable formulation of a transfer matrix.
///
///   I   : (Δv_D, Δv_Q) -> (Δi_D, Δi_Q)          admittance
///   II  : (Δφ, ΔV_n)   -> (ΔP, ΔQ)
///   III : (Δω̃, ΔṼ_n^d) -> (ΔP, ΔQ)
/// and their inverses, which keep the same kind tag.
enum class ModelKind { I, II, III };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

enum class Spacing { log, linear };

/// Band membership of a grid point: low (<= 10 Hz), high (>= 35 Hz) or the
/// separation gap in between.
enum class RangeTag { low, mid, high };

RangeTag classify_omega(double omega);

/// Strictly increasing, non-negative angular frequencies in rad/s.
class FreqGrid {
 public:
  FreqGrid() = default;
  FreqGrid(std::vector<double> omega, Spacing spacing);

  const std::vector<double>& omega() const noexcept { return omega_; }
  std::size_t size() const noexcept { return omega_.size(); }
  bool empty() const noexcept { return omega_.empty(); }
  Spacing spacing() const noexcept { return spacing_; }

  double operator[](std::size_t i) const { return omega_[i]; }
  double hz(std::size_t i) const { return omega_[i] / kTwoPi; }
  RangeTag tag(std::size_t i) const { return classify_omega(omega_[i]); }

 private:
  std::vector<double> omega_;
  Spacing spacing_ = Spacing::log;
};

/// Grid from f_min to f_max (Hz, both inclusive) converted to rad/s.
/// Throws BadRange unless 0 < f_min < f_max and n_points >= 2.
FreqGrid make_grid(double f_min_hz, double f_max_hz, std::size_t n_points,
                   Spacing spacing = Spacing::log);

/// Real state-space model G(s) = C (sI - A)^{-1} B + D.
///
/// Port count is taken from D; a device model is 2x2, a network model
/// in Model II is 2N x 2N.
struct RationalModel {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
  ModelKind kind = ModelKind::I;

  std::size_t states() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(D.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(D.rows()); }

  /// Throws InputError on inconsistent dimensions or non-finite entries.
  void validate() const;
};

/// Feedthrough-only model.
RationalModel static_model(const Matrix& D, ModelKind kind);

/// Evaluate G(s) at an arbitrary complex point.
/// Throws SingularResolvent if s is numerically an eigenvalue of A.
CMatrix eval_at(const RationalModel& model, Complex s);

/// G(jΩ).
CMatrix eval_tf(const RationalModel& model, double omega);

/// One sampled transfer matrix per grid point.
struct FreqResponse {
  FreqGrid grid;
  std::vector<CMatrix> samples;
  ModelKind kind = ModelKind::I;

  /// Throws InputError unless there is exactly one finite sample per point
  /// and every sample has the same shape.
  void validate() const;
};

FreqResponse sample(const RationalModel& model, const FreqGrid& grid);

/// Eigenvalues of a real matrix, sorted by (real, imag).
struct Spectrum {
  std::vector<Complex> values;

  std::size_t size() const noexcept { return values.size(); }
};

/// Throws NoConvergence if the QR iteration does not converge.
Spectrum eig_general(const Matrix& m);

/// Ascending eigenvalues of a Hermitian matrix; 2x2 uses the closed form.
/// Throws NotHermitian if ||H - H^H|| > 1e-9 ||H||.
std::vector<double> eig_hermitian(const CMatrix& h);

/// G^R = G + G^H, the Hermitian part used by the positive-real test.
CMatrix hermitian_part(const CMatrix& g);

// ---------------------------------------------------------------------------
// Model algebra. Realizations are not minimized.

/// left * G * right + offset.
RationalModel pre_post(const Matrix& left, const RationalModel& g,
                       const Matrix& right, const Matrix& offset);

/// G1 + G2 (parallel connection, block-diagonal A).
RationalModel add(const RationalModel& g1, const RationalModel& g2);

/// y = second(first(u)).
RationalModel series(const RationalModel& first, const RationalModel& second);

/// G with `delta` added to its feedthrough.
RationalModel add_feedthrough(const RationalModel& g, const Matrix& delta);

}  // namespace dqpass
