#pragma once

// Pointwise decomposition of a nonlinear planar field with known potential:
//   (s I + t J) f(x) = -grad phi(x),   S = s I,  T = t J,
// and, where s I + t J is invertible,
//   f(x) = -(d I + q J) grad phi(x),   d I + q J = (s I + t J)^-1.

#include <cmath>
#include <optional>
#include <string>

#include "aodecomp/core.hpp"
#include "aodecomp/system.hpp"

namespace aodecomp {

class EquilibriumPoint : public Error {
 public:
  explicit EquilibriumPoint(const Point2& at)
      : Error("decomposition undefined at equilibrium (" + std::to_string(at.x1) + ", " +
              std::to_string(at.x2) + ")"),
        at_(at) {}
  const Point2& at() const { return at_; }

 private:
  Point2 at_;
};

inline bool is_equilibrium(const Point2& f_val, const Point2& x, const Tolerances& tol = {}) {
  return f_val.norm() <= tol.equilibrium * (1.0 + x.norm());
}

/// s = -(grad phi . f) / (f . f).
inline double friction_scalar(const Point2& f_val, const Point2& grad_phi,
                              const Tolerances& tol = {}) {
  if (f_val.norm() <= tol.equilibrium) throw EquilibriumPoint(f_val);
  return -grad_phi.dot(f_val) / f_val.norm_sq();
}

/// t = (f1 d2phi - f2 d1phi) / (f . f), the unique antisymmetric
/// coefficient completing (s I + t J) f = -grad phi.
inline double transverse_scalar(const Point2& f_val, const Point2& grad_phi,
                                const Tolerances& tol = {}) {
  if (f_val.norm() <= tol.equilibrium) throw EquilibriumPoint(f_val);
  return (f_val.x1 * grad_phi.x2 - f_val.x2 * grad_phi.x1) / f_val.norm_sq();
}

struct PointDecomposition {
  Point2 at;
  double s = 0.0;
  double t = 0.0;
  std::optional<double> d;
  std::optional<double> q;
  bool singular_on_isopotential = false;
  Point2 f_val;
  Point2 grad_phi;

  Matrix2 s_plus_t() const { return s * Matrix2::identity() + t * Matrix2::rotation_generator(); }
};

/// Decomposition from already evaluated f(x) and grad phi(x).
inline PointDecomposition decompose_at(const Point2& x, const Point2& f_val, const Point2& grad_phi,
                                       const Tolerances& tol = {}) {
  if (is_equilibrium(f_val, x, tol)) throw EquilibriumPoint(x);
  PointDecomposition out;
  out.at = x;
  out.f_val = f_val;
  out.grad_phi = grad_phi;
  const double ff = f_val.norm_sq();
  out.s = -grad_phi.dot(f_val) / ff;
  out.t = (f_val.x1 * grad_phi.x2 - f_val.x2 * grad_phi.x1) / ff;
  // (s I + t J)^-1 = (s I - t J) / (s^2 + t^2) since J^2 = -I.
  const double mag = out.s * out.s + out.t * out.t;
  if (mag <= tol.singular_frame) {
    out.singular_on_isopotential = true;
  } else {
    out.d = out.s / mag;
    out.q = -out.t / mag;
  }
  return out;
}

inline PointDecomposition point_decomposition(const SystemSpec& sys, const Point2& x,
                                              const Tolerances& tol = {}) {
  require_finite(x, "point_decomposition");
  const ScalarField phi = potential_of(sys, tol);
  return decompose_at(x, drift(sys, x), phi.gradient(x, tol), tol);
}

}  // namespace aodecomp
