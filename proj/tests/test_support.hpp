#pragma once

#include <cmath>
#include <random>

#include "aodecomp/core.hpp"

namespace aodecomp::testing {

/// Deterministic generator for hand-rolled property tests.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Point2 point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }

  Matrix2 matrix(double lo, double hi) {
    return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
  }

  /// Random strictly-inside PSD diffusion (|correlation| < 0.95).
  DiffusionParams diffusion() {
    const double d11 = uniform(0.1, 2.0);
    const double d22 = uniform(0.1, 2.0);
    const double d12 = uniform(-0.95, 0.95) * std::sqrt(d11 * d22);
    return {d11, d12, d22};
  }

  /// Random A with |trace(A)| > min_trace.
  Matrix2 matrix_with_trace(double min_trace) {
    for (;;) {
      const Matrix2 a = matrix(-2.0, 2.0);
      if (std::abs(a.trace()) > min_trace) return a;
    }
  }

  /// Random A with both eigenvalue real parts negative (trace < 0, det > 0).
  Matrix2 stable_matrix() {
    for (;;) {
      const Matrix2 a = matrix(-2.0, 2.0);
      if (a.trace() < -0.1 && a.det() > 0.05) return a;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Brute-force 2x2 inverse by solving A X = I column by column with
/// Cramer's rule; independent of invert2's adjugate form.
inline Matrix2 cramer_inverse(const Matrix2& m) {
  const double det = m.a11 * m.a22 - m.a21 * m.a12;
  auto solve = [&](double b1, double b2) {
    return Point2{(b1 * m.a22 - m.a12 * b2) / det, (m.a11 * b2 - b1 * m.a21) / det};
  };
  const Point2 c1 = solve(1.0, 0.0);
  const Point2 c2 = solve(0.0, 1.0);
  return {c1.x1, c2.x1, c1.x2, c2.x2};
}

inline bool near(const Point2& a, const Point2& b, double tol) {
  return std::abs(a.x1 - b.x1) <= tol && std::abs(a.x2 - b.x2) <= tol;
}

inline bool near(const Matrix2& a, const Matrix2& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

}  // namespace aodecomp::testing
