#pragma once

// Unreduced load-flow Jacobian of a network at a given operating point, the
// device Q-V contributions that passivate it, and the structural feedthrough
// property of wide-band network models.

#include <map>
#include <vector>

#include "dqpass/lti.hpp"
#include "dqpass/operating_point.hpp"
#include "dqpass/passivity.hpp"

namespace dqpass {

struct Bus {
  int id = 0;
  double vm = 1.0;      ///< pu
  double va = 0.0;      ///< rad
  double gs = 0.0;      ///< shunt conductance, pu
  double bs = 0.0;      ///< shunt susceptance, pu (capacitive > 0)
};

struct Branch {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b = 0.0;  ///< total line charging, half at each end
};

struct NetworkSpec {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;

  /// Throws InputError / UnknownBus / DisconnectedNetwork.
  void validate() const;
  /// Position of a bus id in `buses`; throws UnknownBus.
  std::size_t index_of(int id) const;
  /// Same network with series resistance and shunt conductance removed.
  NetworkSpec lossless() const;
};

/// Bus admittance matrix (π branch model).
CMatrix ybus(const NetworkSpec& net);

/// Complex power injected into the network at every bus, S = V conj(Y V).
std::vector<Complex> injections(const NetworkSpec& net);

struct JacobianReport {
  std::vector<int> bus_ids;
  /// 2N x 2N, rows (P; Q), columns (φ; V_n), bus order of `bus_ids`.
  Matrix jlf;
  std::vector<double> eigs;  ///< ascending eigenvalues of J_LF + J_LF^T
  double symmetry_defect = 0.0;  ///< ||J_LF - J_LF^T||_F
  double min_eig = 0.0;
  double min_nonzero_eig = 0.0;
  std::size_t zero_count = 0;      ///< |λ| <= 1e-8
  std::size_t negative_count = 0;  ///< λ < -1e-8
};

inline constexpr double kJlfZeroTol = 1e-8;

/// Recomputes the eigen summary of a Jacobian.
JacobianReport summarize_jlf(std::vector<int> bus_ids, Matrix jlf);

JacobianReport build_jlf(const NetworkSpec& net);

/// Central finite differences of the injection equations in (φ, V_n).
Matrix jlf_finite_difference(const NetworkSpec& net, double step = 1e-7);

/// Adds k_qv^c to the ∂Q/∂V_n diagonal of each listed bus. Throws UnknownBus
/// or InvalidParameter for a negative contribution.
JacobianReport apply_kqvc(const JacobianReport& rep, const std::map<int, double>& contributions);

struct FeedthroughTraceReport {
  Matrix d_j;   ///< (E D_n + C) F
  Matrix d_jd;  ///< τ D_j
  Matrix sym_j; ///< D_j + D_j^T
  double trace_j = 0.0;
  double trace_jd = 0.0;
  bool trace_zero = false;  ///< both traces within 1e-10
  Matrix explicit_sym;  ///< 2 C F per bus: the closed form of D_j + D_j^T
};

/// D_n = D1 ⊗ I_2 on the per-bus (D, Q) ordering; D1 is N x N symmetric with
/// one operating point per bus. Throws NotSymmetric.
FeedthroughTraceReport network_feedthrough_check(const Matrix& d1,
                                            const std::vector<OperatingPoint>& ops, double tau);

/// Every bus at the same operating point.
FeedthroughTraceReport network_feedthrough_check(const Matrix& d1, const OperatingPoint& op,
                                            double tau);

struct JndAxisReport {
  bool simple = false;
  bool residue_psd = false;
  double symmetry_defect = 0.0;
  double residue_min_eig = 0.0;
  bool ok = false;
};

/// Axis pole at s = 0 of J_nd = J_LF (1 + sτ)/s. The residue test runs on the
/// symmetric part of J_LF, with the asymmetry reported.
JndAxisReport jnd_axis_pole(const Matrix& jlf, double tau);

}  // namespace dqpass
