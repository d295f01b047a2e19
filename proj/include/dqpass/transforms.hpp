#pragma once

// Conversions between the interface-variable formulations of a single-port
// shunt device or network port, plus the properness and pole-identity checks
// that justify working with the transformed models.

#include "dqpass/lti.hpp"
#include "dqpass/operating_point.hpp"

namespace dqpass {

/// Options shared by the Model II -> III conversion and k_qv^c extraction.
struct TransformSpec {
  double tau = 0.01;   ///< derivative filter time constant, s
  double k_qv_c = 0.0; ///< Q-V contribution exported to the network, pu
  Side side = Side::device;

  void validate() const;
};

/// Model I -> II: (E Y - C) F on the device side, (E Y + C) F on the network side.
RationalModel modelI_to_II(const RationalModel& y, const OperatingPoint& op, Side side);

/// Inverse of modelI_to_II: Y = E^{-1} (J F^{-1} ± C).
RationalModel modelII_to_I(const RationalModel& j, const OperatingPoint& op, Side side);

/// Model II -> III: G(s) (1 + sτ)/s, realized as τ G + G/s with one integrator
/// per input channel.
RationalModel modelII_to_III(const RationalModel& j, double tau);

/// (A - B D^{-1} C, B D^{-1}, -D^{-1} C, D^{-1}).
/// Throws ImproperInverse when D is singular or cond(D) > 1e8.
RationalModel invert_tf(const RationalModel& g);

/// Admittance of Y in series with a resistance r on each axis.
RationalModel add_series_resistance(const RationalModel& y, double r);

/// Low-frequency grid used for the k_qv and frequency-regulation margins:
/// 0.01-10 Hz, 200 log points.
FreqGrid default_low_grid();

/// Subtracts k_qv_c from the (2,2) feedthrough of J_s.
/// Throws InsufficientKqv when min Re J_s(2,2) over the grid is below k_qv_c.
RationalModel extract_kqvc(const RationalModel& js, double k_qv_c,
                           const FreqGrid& low_grid = default_low_grid());

/// true iff |det((E D + C) F)| > 1e-10 ||(E D + C) F||^2.
bool check_properness(const Matrix2& d, const OperatingPoint& op);

struct PropernessReport {
  double det_plus = 0.0;   ///< det((E D + C) F)
  double det_minus = 0.0;  ///< det((E D - C) F)
  bool proper_plus = false;
  bool proper_minus = false;
};

PropernessReport properness_report(const Matrix2& d, const OperatingPoint& op);

struct PoleIdentityReport {
  Spectrum g1;             ///< poles of (Y_n + Y_s)^{-1}
  Spectrum g2;             ///< poles of (J_n + J_s)^{-1}
  Spectrum g3;             ///< poles of (J_nd + J_sd)^{-1}
  double distance = 0.0;   ///< Hausdorff distance between g1 and g2
  bool identical = false;  ///< distance <= 1e-6
  bool extra_pole_only = false;  ///< g3 \ g2 is exactly {-1/τ} (as sets)
  double extra_pole_error = 0.0; ///< distance of the new poles from -1/τ
  bool repeated_zero_pole = false;  ///< g2 has two or more poles with |λ| <= 1e-6
};

/// Closed-loop pole comparison across Models I, II and III.
PoleIdentityReport pole_identity_check(const RationalModel& y_n, const RationalModel& y_s,
                                       const OperatingPoint& op, double tau);

/// max(sup_a inf_b |a - b|, sup_b inf_a |a - b|); 0 for two empty sets.
double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace dqpass
