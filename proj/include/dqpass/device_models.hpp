#pragma once

// Closed-form small-signal models of the reference device archetypes:
// P-f / Q-V droop, a virtual synchronous generator built on the classical
// machine model, and a frequency/voltage dependent load. All models are
// 2x2 and tagged with their interface-variable kind.

#include <string>
#include <variant>
#include <vector>

#include "dqpass/lti.hpp"
#include "dqpass/operating_point.hpp"

namespace dqpass {

/// ΔP = k_pf·s·Δφ/(1 + sτ),  ΔQ = k_qv·ΔV_n.
struct DroopParams {
  double k_pf = 0.0;  ///< pu power per pu frequency
  double k_qv = 0.0;  ///< pu reactive power per pu voltage
  double tau = 0.0;   ///< derivative filter time constant, s
};

/// Throws InvalidParameter unless all three parameters are positive.
void validate(const DroopParams& p);

/// Soft limits (τ above 0.1 s); empty when none apply.
std::vector<std::string> warnings(const DroopParams& p);

/// Classical synchronous-machine emulation.
struct VsgParams {
  double inertia = 0.0;      ///< M, s^2·pu
  double damping = 0.0;      ///< D_m, pu
  double emf = 0.0;          ///< E_g, pu
  double reactance = 0.0;    ///< x_g, pu
  double rotor_angle = 0.0;  ///< δ_o, rad
  double zeta = 0.0;         ///< ζ_o = δ_o - atan2(v_Do, v_Qo), rad

  /// Fills ζ_o from the operating-point voltage angle.
  static VsgParams at(double inertia, double damping, double emf, double reactance,
                      double rotor_angle, const OperatingPoint& op);
};

void validate(const VsgParams& p);

/// Operating point whose currents satisfy the machine's stator equation
/// v_Q + j v_D = E_g∠δ_o + j x_g (i_Q + j i_D) for the given terminal voltage.
OperatingPoint vsg_operating_point(double emf, double reactance, double rotor_angle,
                                   double v_d, double v_q);

/// ΔP = k_pf Δω̃ + k_pv ΔV_n,  ΔQ = k_qf Δω̃ + k_qv ΔV_n.
struct LoadParams {
  double k_pf = 0.0;
  double k_pv = 0.0;
  double k_qf = 0.0;
  double k_qv = 0.0;
  double tau = 0.01;  ///< filter of the measured frequency Δω̃, s
};

void validate(const LoadParams& p);

// --- droop ------------------------------------------------------------------

/// J_s = diag(k_pf s/(1+sτ), k_qv).
RationalModel droop_js(const DroopParams& p);
/// 𝒩_s = diag((1+sτ)/(s k_pf), 1/k_qv); simple pole at s = 0.
RationalModel droop_ns(const DroopParams& p);
/// 𝒩_sd = diag(1/k_pf, s/(k_qv (1+sτ))); single pole at -1/τ.
RationalModel droop_nsd(const DroopParams& p);

// --- virtual synchronous generator -------------------------------------------

/// Static coefficients shared by 𝒩_s and J_d. Throws SingularOperatingPoint
/// when 2 V_o cos ζ_o = E_g.
struct VsgCoefficients {
  double k11 = 0.0;  ///< x_g (2V_o - E_g cos ζ_o) / (E_g V_o (2V_o cos ζ_o - E_g))
  double k12 = 0.0;  ///< x_g sin ζ_o / (V_o (2V_o cos ζ_o - E_g))
  double k22 = 0.0;  ///< x_g cos ζ_o / (V_o (2V_o cos ζ_o - E_g))
};

VsgCoefficients vsg_coefficients(const VsgParams& p, const OperatingPoint& op);

/// Admittance from the linearized swing and stator equations, states (Δδ, Δω_r).
/// Throws InconsistentOperatingPoint when the operating currents do not match
/// vsg_operating_point() within 1e-6.
RationalModel vsg_ys(const VsgParams& p, const OperatingPoint& op);

/// 𝒩_s = diag(1/(M s^2 + D_m s), 0) + K. Double pole at s = 0 when D_m = 0.
RationalModel vsg_ns(const VsgParams& p, const OperatingPoint& op);

/// J_d(s) = diag(1/(M s + D_m), 0) + s K, which is improper; evaluated pointwise.
CMatrix vsg_jd(const VsgParams& p, const OperatingPoint& op, Complex s);

/// 𝒩_sd = J_d/(1 + sτ); poles {-D_m/M, -1/τ}. Requires D_m > 0.
RationalModel vsg_nsd(const VsgParams& p, const OperatingPoint& op, double tau);

// --- load ---------------------------------------------------------------------

/// J_s = [k_pf g, k_pv; k_qf g, k_qv] with g = s/(1+sτ).
RationalModel load_js(const LoadParams& p);

/// 𝒩_sd = 1/(k_pf k_qv - k_pv k_qf) [k_qv, -k_pv; -k_qf g, k_pf g].
/// Throws SingularLoad when the determinant vanishes.
RationalModel load_nsd(const LoadParams& p);

// --- dispatch -------------------------------------------------------------------

using DeviceParams = std::variant<DroopParams, VsgParams, LoadParams>;

std::string_view device_name(const DeviceParams& params);

/// Model-I admittance Y_s of a device: the Model-II form mapped back through
/// the polar transforms for droop and load, the direct linearization for VSG.
RationalModel device_ys(const DeviceParams& params, const OperatingPoint& op);

}  // namespace dqpass
