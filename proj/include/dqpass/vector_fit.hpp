#pragma once

// Relaxed vector fitting of a sampled transfer matrix with poles shared by all
// entries, and the pole-residue to state-space realization it produces.

#include <vector>

#include "dqpass/lti.hpp"

namespace dqpass {

enum class Weighting { uniform, inverse_magnitude };

struct FitConfig {
  std::size_t order = 10;  ///< number of common poles
  std::size_t max_iters = 30;
  double pole_relocation_tol = 1e-6;
  Weighting weighting = Weighting::inverse_magnitude;
  bool enforce_stability = true;
  /// Throw NoConvergence instead of returning the last iterate.
  bool require_convergence = false;

  void validate() const;
};

struct FitReport {
  std::size_t order = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double max_rel_error = 0.0;
  double rms_error = 0.0;
  std::vector<double> pole_movement;  ///< max relative movement per iteration
  std::vector<Complex> poles;         ///< conjugate pairs listed together
};

struct FitResult {
  RationalModel model;
  FitReport report;
};

/// Throws BadRange with fewer than 2n+2 samples, IllConditioned when the
/// residue least-squares problem is rank deficient.
FitResult vector_fit(const FreqResponse& response, const FitConfig& cfg);

/// Doubles the order from 1 until max_rel_error < target (or the sample count
/// limits the order). Returns the first fit reaching the target, otherwise the
/// most accurate one.
FitResult vector_fit_auto(const FreqResponse& response, FitConfig cfg, double target = 1e-4,
                          std::size_t max_order = 64);

/// Real realization of  D + Σ_k R_k / (s - p_k), one block per input column.
/// Throws ConjugationViolation unless complex poles come in conjugate pairs
/// with conjugate residues and real poles have real residues.
RationalModel residues_to_state_space(const std::vector<Complex>& poles,
                                      const std::vector<CMatrix>& residues, const Matrix& d,
                                      ModelKind kind = ModelKind::I);

/// Starting poles: pairs with imaginary parts log-spaced over the grid and real
/// parts -imag/100, plus one real pole at -Ω_center when n is odd.
std::vector<Complex> initial_poles(const FreqGrid& grid, std::size_t n);

/// max_k ||G(jΩ_k) - F_k||_F / ||F_k||_F over the response grid.
double max_relative_error(const RationalModel& model, const FreqResponse& response);

}  // namespace dqpass
