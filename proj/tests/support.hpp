#pragma once

// Shared fixtures for the unit tests: random stable models and small helpers.

#include <random>

#include "dqpass/lti.hpp"
#include "dqpass/operating_point.hpp"

namespace dqpass::fixtures {

/// Random stable real model with `n` states and 2 ports. Poles are drawn with
/// magnitudes in [w_lo, w_hi] rad/s.
inline RationalModel random_stable(std::mt19937& rng, int n, double w_lo = 1.0,
                                   double w_hi = 100.0, ModelKind kind = ModelKind::I) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  int i = 0;
  while (i < n) {
    const double mag = std::exp(std::log(w_lo) + u(rng) * (std::log(w_hi) - std::log(w_lo)));
    if (i + 1 < n && u(rng) < 0.6) {
      const double re = -mag * (0.05 + 0.5 * u(rng));
      a(i, i) = re;
      a(i, i + 1) = mag;
      a(i + 1, i) = -mag;
      a(i + 1, i + 1) = re;
      i += 2;
    } else {
      a(i, i) = -mag;
      i += 1;
    }
  }
  // Similarity transform so the test does not see a block-diagonal A.
  Matrix t(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) t(r, c) = g(rng);
  }
  t += 3.0 * Matrix::Identity(n, n);
  RationalModel m;
  m.A = t * a * t.inverse();
  m.B = Matrix(n, 2);
  m.C = Matrix(2, n);
  m.D = Matrix(2, 2);
  for (int r = 0; r < n; ++r) {
    m.B(r, 0) = g(rng);
    m.B(r, 1) = g(rng);
    m.C(0, r) = g(rng);
    m.C(1, r) = g(rng);
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) m.D(r, c) = g(rng);
  }
  m.D += 2.0 * Matrix::Identity(2, 2);
  m.kind = kind;
  return m;
}

inline OperatingPoint random_op(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double v = 0.9 + 0.2 * (0.5 * (u(rng) + 1.0));
  const double phi = 0.5 * u(rng);
  return {v * std::sin(phi), v * std::cos(phi), u(rng), u(rng)};
}

inline double max_rel_diff(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace dqpass::fixtures
