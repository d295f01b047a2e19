#pragma once

// Frequency-domain positive-real tests:
//   (1) no poles in the open right half plane,
//   (2) G(jΩ) + G^H(jΩ) positive semi-definite along the axis,
//   (3) poles on the axis simple, with PSD Hermitian residues.

#include <optional>
#include <vector>

#include "dqpass/lti.hpp"

namespace dqpass {

inline constexpr double kAxisPoleTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;

enum class Band { low, high, full };

std::string_view to_string(Band band);
Band parse_band(std::string_view text);

struct RhpCheck {
  bool ok = true;
  std::vector<Complex> poles;  ///< offending eigenvalues, Re > 1e-9
};

RhpCheck check_rhp_poles(const RationalModel& model);

/// Maximal run of grid points whose minimum eigenvalue is below -1e-9.
struct ViolationBand {
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
  double worst = 0.0;
};

struct PsdCurve {
  FreqGrid grid;
  std::vector<std::vector<double>> eigs;  ///< ascending, per grid point
  std::vector<double> min_eig;
  std::vector<ViolationBand> violations;

  bool ok() const { return violations.empty(); }
  /// No violating point carries the given range tag.
  bool ok_in(RangeTag tag) const;
  double minimum() const;
};

/// Throws GridHitsPole if a grid point lies within 1e-6 (relative) of an
/// axis pole of the model.
PsdCurve check_psd_spectrum(const RationalModel& model, const FreqGrid& grid);
PsdCurve check_psd_spectrum(const FreqResponse& response);

struct AxisPole {
  double omega = 0.0;       ///< Ω_p, rad/s (only Ω_p >= 0 is listed)
  std::size_t multiplicity = 1;  ///< algebraic multiplicity in A
  bool simple = true;       ///< no Laurent terms beyond (s - jΩ_p)^{-1}
  bool residue_psd = true;  ///< residue Hermitian and PSD
  CMatrix residue;
};

/// Poles with |Re λ| <= 1e-9. Simplicity and the residue come from a contour
/// integral of G around the pole, so a repeated but non-defective eigenvalue
/// (e.g. diag(1/s, 1/s)) is reported simple.
std::vector<AxisPole> check_axis_poles(const RationalModel& model);

/// Always throws NotRational: conditions (1) and (3) need a rational model.
std::vector<AxisPole> check_axis_poles(const FreqResponse& response);

struct VerdictOptions {
  double low_min_hz = 0.01;
  double high_max_hz = 200.0;
  std::size_t points = 400;
};

/// Grid spanning the band: low 0.01-10 Hz, high 35 Hz-high_max, full
/// 0.01 Hz-high_max.
FreqGrid band_grid(Band band, const VerdictOptions& opts = {});

struct PassivityVerdict {
  Band band = Band::full;
  RhpCheck rhp;
  PsdCurve psd;
  bool psd_ok_low = true;
  bool psd_ok_high = true;
  std::vector<AxisPole> axis_poles;  ///< only poles inside the band
  bool axis_ok = true;
  bool overall = true;
};

PassivityVerdict passivity_verdict(const RationalModel& model, Band band,
                                   const VerdictOptions& opts = {});

/// Same check over an explicit grid; axis poles are filtered to the grid span.
PassivityVerdict passivity_verdict(const RationalModel& model, const FreqGrid& grid,
                                   Band band);

}  // namespace dqpass
