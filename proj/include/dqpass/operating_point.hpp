#pragma once

#include <Eigen/Dense>

namespace dqpass {

using Matrix2 = Eigen::Matrix2d;

/// Which side of the point of common coupling a transfer matrix describes.
/// Devices use (E Y - C) F, the network uses (E Y + C) F.
enum class Side { device, network };

/// Quiescent D-Q terminal quantities of a single-port shunt device, in pu.
///
/// The currents are those flowing from the device into the network (equal to
/// the current drawn by the network). With this convention the device-side
/// transform J_s = (E Y_s - C) F maps the device admittance Y_s, which relates
/// the current the device draws to the terminal voltage, onto (ΔP, ΔQ) drawn by
/// the device.
class OperatingPoint {
 public:
  /// Throws DegenerateVoltage when v_D = v_Q = 0.
  OperatingPoint(double v_d, double v_q, double i_d, double i_q);

  double v_d() const noexcept { return v_d_; }
  double v_q() const noexcept { return v_q_; }
  double i_d() const noexcept { return i_d_; }
  double i_q() const noexcept { return i_q_; }

  /// V_o = sqrt(v_D^2 + v_Q^2).
  double voltage() const noexcept;
  /// φ_o = atan2(v_D, v_Q).
  double angle() const noexcept;

  /// Power delivered to the network, P = v_D i_D + v_Q i_Q.
  double active_power() const noexcept { return v_d_ * i_d_ + v_q_ * i_q_; }
  /// Q = v_D i_Q - v_Q i_D.
  double reactive_power() const noexcept { return v_d_ * i_q_ - v_q_ * i_d_; }

  /// E = [v_D v_Q; -v_Q v_D].
  Matrix2 e_matrix() const;
  /// C = [i_D i_Q; i_Q -i_D].
  Matrix2 c_matrix() const;
  /// F = [v_Q v_D; -v_D v_Q] = ∂(v_D, v_Q)/∂(φ, V_n).
  Matrix2 f_matrix() const;

  /// Same voltage, currents negated (power-flow reversal).
  OperatingPoint reversed() const { return {v_d_, v_q_, -i_d_, -i_q_}; }

  /// Operating point delivering (p, q) to the network at voltage (v_d, v_q).
  static OperatingPoint from_power(double v_d, double v_q, double p, double q);

 private:
  double v_d_;
  double v_q_;
  double i_d_;
  double i_q_;
};

}  // namespace dqpass
