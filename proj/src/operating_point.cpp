#include "dqpass/operating_point.hpp"

#include <cmath>

#include "dqpass/error.hpp"

namespace dqpass {

OperatingPoint::OperatingPoint(double v_d, double v_q, double i_d, double i_q)
    : v_d_(v_d), v_q_(v_q), i_d_(i_d), i_q_(i_q) {
  if (!std::isfinite(v_d) || !std::isfinite(v_q) || !std::isfinite(i_d) ||
      !std::isfinite(i_q)) {
    throw InputError("operating point entries must be finite");
  }
  if (v_d == 0.0 && v_q == 0.0) {
    throw DegenerateVoltage("operating point has zero terminal voltage");
  }
}

double OperatingPoint::voltage() const noexcept { return std::hypot(v_d_, v_q_); }

double OperatingPoint::angle() const noexcept { return std::atan2(v_d_, v_q_); }

Matrix2 OperatingPoint::e_matrix() const {
  Matrix2 e;
  e << v_d_, v_q_, -v_q_, v_d_;
  return e;
}

Matrix2 OperatingPoint::c_matrix() const {
  Matrix2 c;
  c << i_d_, i_q_, i_q_, -i_d_;
  return c;
}

Matrix2 OperatingPoint::f_matrix() const {
  Matrix2 f;
  f << v_q_, v_d_, -v_d_, v_q_;
  return f;
}

OperatingPoint OperatingPoint::from_power(double v_d, double v_q, double p, double q) {
  // [P; Q] = [v_D v_Q; -v_Q v_D] [i_D; i_Q]
  const double v2 = v_d * v_d + v_q * v_q;
  if (v2 == 0.0) throw DegenerateVoltage("operating point has zero terminal voltage");
  const double i_d = (v_d * p - v_q * q) / v2;
  const double i_q = (v_q * p + v_d * q) / v2;
  return {v_d, v_q, i_d, i_q};
}

}  // namespace dqpass
