#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "aodecomp/tolerances.hpp"

namespace aodecomp {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(double det)
      : Error("singular matrix (det = " + std::to_string(det) + ")"), det_(det) {}
  double det() const { return det_; }

 private:
  double det_;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class InvalidDiffusion : public Error {
 public:
  using Error::Error;
};

class MissingPotential : public Error {
 public:
  explicit MissingPotential(const std::string& system)
      : Error("system '" + system + "' has no potential") {}
};

// ---------------------------------------------------------------------------
// Point2 / Matrix2
// ---------------------------------------------------------------------------

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
  double dot(const Point2& o) const { return x1 * o.x1 + x2 * o.x2; }
  double norm_sq() const { return dot(*this); }
  double norm() const { return std::hypot(x1, x2); }

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Point2 operator-(Point2 a) { return {-a.x1, -a.x2}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x1, s * a.x2}; }
  friend Point2 operator*(Point2 a, double s) { return s * a; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline void require_finite(const Point2& x, const char* what) {
  if (!x.finite()) throw NonFinite(std::string(what) + ": non-finite coordinate");
}

/// Dense 2x2 real matrix, row-major entries.
struct Matrix2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static constexpr Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Matrix2 zero() { return {}; }
  static constexpr Matrix2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
  /// J = [[0, 1], [-1, 0]], the generator of every antisymmetric 2x2 matrix.
  static constexpr Matrix2 rotation_generator() { return {0.0, 1.0, -1.0, 0.0}; }

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
  Matrix2 transpose() const { return {a11, a21, a12, a22}; }
  double max_norm() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  }
  double frobenius() const {
    return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
  }
  bool finite() const {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) &&
           std::isfinite(a22);
  }

  Point2 operator*(const Point2& x) const {
    return {a11 * x.x1 + a12 * x.x2, a21 * x.x1 + a22 * x.x2};
  }
  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend Matrix2 operator-(const Matrix2& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
  friend Matrix2 operator*(double s, const Matrix2& a) {
    return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
  }
  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Largest entrywise absolute difference.
inline double max_abs_diff(const Matrix2& a, const Matrix2& b) { return (a - b).max_norm(); }

/// Antisymmetric 2x2 matrix q * J.
struct AntisymScalar {
  double q = 0.0;

  Matrix2 matrix() const { return q * Matrix2::rotation_generator(); }
  friend bool operator==(const AntisymScalar&, const AntisymScalar&) = default;
};

/// Symmetric positive-semidefinite diffusion matrix [[d11, d12], [d12, d22]].
class DiffusionParams {
 public:
  DiffusionParams(double d11, double d12, double d22) : d11_(d11), d12_(d12), d22_(d22) {
    if (!std::isfinite(d11) || !std::isfinite(d12) || !std::isfinite(d22)) {
      throw InvalidDiffusion("diffusion entries must be finite");
    }
    if (!admissible(d11, d12, d22)) {
      std::ostringstream msg;
      msg << "diffusion (d11=" << d11 << ", d12=" << d12 << ", d22=" << d22
          << ") is not positive semidefinite";
      throw InvalidDiffusion(msg.str());
    }
  }

  static DiffusionParams identity() { return {1.0, 0.0, 1.0}; }
  static DiffusionParams zero() { return {0.0, 0.0, 0.0}; }

  /// d11 >= 0, d22 >= 0 and d11*d22 - d12^2 >= 0, compared exactly.
  static bool admissible(double d11, double d12, double d22) {
    return d11 >= 0.0 && d22 >= 0.0 && d11 * d22 - d12 * d12 >= 0.0;
  }

  double d11() const { return d11_; }
  double d12() const { return d12_; }
  double d22() const { return d22_; }
  Matrix2 matrix() const { return {d11_, d12_, d12_, d22_}; }

  friend bool operator==(const DiffusionParams&, const DiffusionParams&) = default;

 private:
  double d11_, d12_, d22_;
};

// ---------------------------------------------------------------------------
// Basic matrix operations
// ---------------------------------------------------------------------------

struct SymAntisymParts {
  Matrix2 sym;
  AntisymScalar antisym;
};

/// M = sym + antisym.q * J with sym = (M + M^T)/2.
inline SymAntisymParts sym_antisym_split(const Matrix2& m) {
  const double off = 0.5 * (m.a12 + m.a21);
  return {{m.a11, off, off, m.a22}, {0.5 * (m.a12 - m.a21)}};
}

inline bool is_singular(const Matrix2& m, const Tolerances& tol = {}) {
  const double scale = m.max_norm();
  return std::abs(m.det()) <= tol.singular_det * (1.0 + scale * scale);
}

/// Adjugate over determinant. Throws SingularMatrix below the relative
/// determinant threshold.
inline Matrix2 invert2(const Matrix2& m, const Tolerances& tol = {}) {
  if (!m.finite()) throw NonFinite("invert2: non-finite entry");
  const double det = m.det();
  if (is_singular(m, tol)) throw SingularMatrix(det);
  const double inv = 1.0 / det;
  return {inv * m.a22, -inv * m.a12, -inv * m.a21, inv * m.a11};
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

/// Per-coordinate central-difference step.
inline double fd_step(double xi, const Tolerances& tol = {}) {
  return tol.fd_step * (1.0 + std::abs(xi));
}

template <typename Fn>
Point2 finite_difference_gradient(const Fn& fn, const Point2& x, const Tolerances& tol = {}) {
  const double h1 = fd_step(x.x1, tol);
  const double h2 = fd_step(x.x2, tol);
  return {(fn(Point2{x.x1 + h1, x.x2}) - fn(Point2{x.x1 - h1, x.x2})) / (2.0 * h1),
          (fn(Point2{x.x1, x.x2 + h2}) - fn(Point2{x.x1, x.x2 - h2})) / (2.0 * h2)};
}

template <typename Fn>
Matrix2 finite_difference_jacobian(const Fn& fn, const Point2& x, const Tolerances& tol = {}) {
  const double h1 = fd_step(x.x1, tol);
  const double h2 = fd_step(x.x2, tol);
  const Point2 d1 = (1.0 / (2.0 * h1)) * (fn(Point2{x.x1 + h1, x.x2}) - fn(Point2{x.x1 - h1, x.x2}));
  const Point2 d2 = (1.0 / (2.0 * h2)) * (fn(Point2{x.x1, x.x2 + h2}) - fn(Point2{x.x1, x.x2 - h2}));
  return {d1.x1, d2.x1, d1.x2, d2.x2};
}

enum class GradientMode { Analytic, FiniteDifference };

/// phi: R^2 -> R with an analytic gradient when one is supplied.
class ScalarField {
 public:
  using ValueFn = std::function<double(const Point2&)>;
  using GradientFn = std::function<Point2(const Point2&)>;

  explicit ScalarField(ValueFn value, GradientFn gradient = {})
      : value_(std::move(value)), gradient_(std::move(gradient)) {
    if (!value_) throw std::invalid_argument("ScalarField requires a value function");
  }

  double operator()(const Point2& x) const { return value_(x); }

  Point2 gradient(const Point2& x, const Tolerances& tol = {}) const {
    if (gradient_) return gradient_(x);
    return finite_difference_gradient(value_, x, tol);
  }

  GradientMode mode() const {
    return gradient_ ? GradientMode::Analytic : GradientMode::FiniteDifference;
  }

 private:
  ValueFn value_;
  GradientFn gradient_;
};

/// f: R^2 -> R^2 with optional analytic divergence and Jacobian.
class VectorField {
 public:
  using EvalFn = std::function<Point2(const Point2&)>;
  using DivergenceFn = std::function<double(const Point2&)>;
  using JacobianFn = std::function<Matrix2(const Point2&)>;

  explicit VectorField(EvalFn eval, DivergenceFn divergence = {}, JacobianFn jacobian = {})
      : eval_(std::move(eval)), divergence_(std::move(divergence)), jacobian_(std::move(jacobian)) {
    if (!eval_) throw std::invalid_argument("VectorField requires an evaluation function");
  }

  Point2 operator()(const Point2& x) const { return eval_(x); }

  Matrix2 jacobian(const Point2& x, const Tolerances& tol = {}) const {
    if (jacobian_) return jacobian_(x);
    return finite_difference_jacobian(eval_, x, tol);
  }

  /// Analytic divergence, else trace of the analytic Jacobian, else
  /// central differences.
  double divergence(const Point2& x, const Tolerances& tol = {}) const {
    if (divergence_) return divergence_(x);
    return jacobian(x, tol).trace();
  }

  bool has_analytic_divergence() const { return static_cast<bool>(divergence_); }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }

  /// The same field with f replaced by -f.
  VectorField negated() const {
    EvalFn e = [f = eval_](const Point2& x) { return -f(x); };
    DivergenceFn d;
    if (divergence_) d = [g = divergence_](const Point2& x) { return -g(x); };
    JacobianFn j;
    if (jacobian_) j = [g = jacobian_](const Point2& x) { return -g(x); };
    return VectorField(std::move(e), std::move(d), std::move(j));
  }

 private:
  EvalFn eval_;
  DivergenceFn divergence_;
  JacobianFn jacobian_;
};

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

/// x' = A x. D and q are optional: D defaults to the identity and q is
/// solved from the gyration constraint when absent.
struct LinearSystem {
  Matrix2 a;
  std::optional<DiffusionParams> diffusion;
  std::optional<double> gyration;
};

/// x' = f(x), optionally with a known potential.
struct AnalyticSystem {
  VectorField field;
  std::optional<ScalarField> potential;
};

struct SystemSpec {
  std::string name;
  std::variant<LinearSystem, AnalyticSystem> kind;

  bool is_linear() const { return std::holds_alternative<LinearSystem>(kind); }
  const LinearSystem* linear() const { return std::get_if<LinearSystem>(&kind); }
  const AnalyticSystem* analytic() const { return std::get_if<AnalyticSystem>(&kind); }
};

}  // namespace aodecomp
