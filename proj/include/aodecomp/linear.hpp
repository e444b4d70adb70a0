#pragma once

// Decomposition of a planar linear system x' = A x into
//   A = -[D + Q] U,   [D + Q]^-1 = S + T,
// with D symmetric PSD (free input), Q = q J antisymmetric (solved),
// S symmetric PSD, T = t J antisymmetric and U symmetric. The potential is
// phi(x) = x^T U x / 2 so that grad phi = U x.
//
// The construction never branches on the Jordan type of A: the only
// equation solved is the scalar gyration constraint
//   trace(A) q = -a21 d11 + (a11 - a22) d12 + a12 d22.

#include <cmath>
#include <sstream>
#include <string>
#include <variant>

#include "aodecomp/core.hpp"

namespace aodecomp {

class AsymmetricU : public Error {
 public:
  AsymmetricU(const Matrix2& u, double gap)
      : Error("U = -[D+Q]^-1 A is not symmetric (gap " + std::to_string(gap) +
              "); q does not satisfy the gyration constraint"),
        u_(u),
        gap_(gap) {}
  const Matrix2& u() const { return u_; }
  double gap() const { return gap_; }

 private:
  Matrix2 u_;
  double gap_;
};

class InconsistentGyration : public Error {
 public:
  InconsistentGyration(double residual, std::string constraint)
      : Error("trace(A) = 0 and the gyration constraint is violated (residual " +
              std::to_string(residual) + "); required: " + constraint),
        residual_(residual),
        constraint_(std::move(constraint)) {}
  double residual() const { return residual_; }
  const std::string& constraint() const { return constraint_; }

 private:
  double residual_;
  std::string constraint_;
};

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

struct RealDistinct {
  double lambda1;  // larger root
  double lambda2;
};
struct RepeatedDiagonalizable {
  double lambda;
};
struct RepeatedDefective {
  double lambda;
};
struct ComplexPair {
  double alpha;
  double beta;  // > 0
};

using SpectralClass =
    std::variant<RealDistinct, RepeatedDiagonalizable, RepeatedDefective, ComplexPair>;

inline SpectralClass classify_spectrum(const Matrix2& a, const Tolerances& tol = {}) {
  const double tr = a.trace();
  const double disc = tr * tr - 4.0 * a.det();
  const double scale = 1.0 + a.max_norm();
  const double thresh = tol.spectral * scale * scale;
  if (disc > thresh) {
    const double root = std::sqrt(disc);
    // Avoid cancellation in the smaller-magnitude root.
    const double big = tr >= 0.0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
    const double small = big != 0.0 ? a.det() / big : 0.0;
    const double l1 = std::max(big, small);
    const double l2 = std::min(big, small);
    return RealDistinct{l1, l2};
  }
  if (disc < -thresh) return ComplexPair{0.5 * tr, 0.5 * std::sqrt(-disc)};
  const double lambda = 0.5 * tr;
  const Matrix2 n = a - lambda * Matrix2::identity();
  if (n.max_norm() <= std::sqrt(tol.spectral) * scale) return RepeatedDiagonalizable{lambda};
  return RepeatedDefective{lambda};
}

inline std::string spectral_class_name(const SpectralClass& c) {
  struct {
    std::string operator()(const RealDistinct&) const { return "RealDistinct"; }
    std::string operator()(const RepeatedDiagonalizable&) const { return "RepeatedDiagonalizable"; }
    std::string operator()(const RepeatedDefective&) const { return "RepeatedDefective"; }
    std::string operator()(const ComplexPair&) const { return "ComplexPair"; }
  } visitor;
  return std::visit(visitor, c);
}

// ---------------------------------------------------------------------------
// Gyration constraint
// ---------------------------------------------------------------------------

/// Right-hand side of trace(A) q = -a21 d11 + (a11 - a22) d12 + a12 d22.
inline double gyration_rhs(const Matrix2& a, const DiffusionParams& d) {
  return -a.a21 * d.d11() + (a.a11 - a.a22) * d.d12() + a.a12 * d.d22();
}

inline bool trace_is_zero(const Matrix2& a, const Tolerances& tol = {}) {
  return std::abs(a.trace()) <= tol.trace_zero * (1.0 + a.max_norm());
}

/// What a trace-free A demands of D: c1 d11 + c2 d12 + c3 d22 = 0, read
/// together with D PSD.
inline std::string gyration_constraint_note(const Matrix2& a, const Tolerances& tol = {}) {
  const double c1 = -a.a21;
  const double c2 = a.a11 - a.a22;
  const double c3 = a.a12;
  const double eps = tol.trace_zero * (1.0 + a.max_norm());
  const bool z1 = std::abs(c1) <= eps;
  const bool z2 = std::abs(c2) <= eps;
  const bool z3 = std::abs(c3) <= eps;
  if (z1 && z2 && z3) return "none (any D)";
  // trace(C D) = 0 with C = [[c1, c2/2], [c2/2, c3]]; a definite C leaves
  // only D = 0.
  if (c1 * c3 - 0.25 * c2 * c2 > eps * eps) return "d11 = d22 = d12 = 0";
  if (z1 && z3) return "d12 = 0";
  if (z2 && z3) return "d11 = d12 = 0";
  if (z1 && z2) return "d22 = d12 = 0";
  std::ostringstream s;
  s.precision(17);
  s << c1 << "*d11 + " << c2 << "*d12 + " << c3 << "*d22 = 0";
  return s.str();
}

struct UniqueQ {
  double q;
};
struct FamilyQ {
  std::string note;  // constraint on D that holds for every q
  double default_q;
};
struct InconsistentQ {
  double residual;  // the non-vanishing right-hand side
};

using QSolution = std::variant<UniqueQ, FamilyQ, InconsistentQ>;

inline std::string q_solution_branch(const QSolution& s) {
  if (std::holds_alternative<UniqueQ>(s)) return "Unique";
  if (std::holds_alternative<FamilyQ>(s)) return "Family";
  return "Inconsistent";
}

inline constexpr double kFamilyDefaultQ = 1.0;

inline QSolution solve_gyration(const Matrix2& a, const DiffusionParams& d,
                                const Tolerances& tol = {}) {
  const double rhs = gyration_rhs(a, d);
  if (!trace_is_zero(a, tol)) return UniqueQ{rhs / a.trace()};
  const double scale = (1.0 + a.max_norm()) * (1.0 + d.matrix().max_norm());
  if (std::abs(rhs) <= tol.trace_zero * scale) {
    return FamilyQ{gyration_constraint_note(a, tol), kFamilyDefaultQ};
  }
  return InconsistentQ{rhs};
}

/// Frobenius norm of A Q + Q A^T - (A D - D A^T).
inline double lyapunov_equation_residual(const Matrix2& a, const DiffusionParams& d,
                                         AntisymScalar q) {
  const Matrix2 qm = q.matrix();
  const Matrix2 dm = d.matrix();
  return (a * qm + qm * a.transpose() - (a * dm - dm * a.transpose())).frobenius();
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

struct LinearDecomposition {
  Matrix2 a;
  DiffusionParams d = DiffusionParams::identity();
  AntisymScalar q;
  Matrix2 s;          // symmetric PSD
  AntisymScalar t;    // T = t J
  Matrix2 u;          // symmetric

  Matrix2 d_plus_q() const { return d.matrix() + q.matrix(); }
  Matrix2 s_plus_t() const { return s + t.matrix(); }
};

inline LinearDecomposition assemble_decomposition(const Matrix2& a, const DiffusionParams& d,
                                                  AntisymScalar q, const Tolerances& tol = {}) {
  if (!a.finite() || !std::isfinite(q.q)) throw NonFinite("assemble_decomposition: non-finite input");
  const Matrix2 dq = d.matrix() + q.matrix();
  const Matrix2 inv = invert2(dq, tol);
  const auto [s, t] = sym_antisym_split(inv);

  // The two routes -[D+Q]^-1 A and -A^T [D-Q]^-1 are transposes of each
  // other, so their agreement is exactly the symmetry of U.
  const Matrix2 u_left = -(inv * a);
  const Matrix2 u_right = -(a.transpose() * invert2(d.matrix() - q.matrix(), tol));
  const double gap = max_abs_diff(u_left, u_right);
  if (gap > tol.u_agreement * (1.0 + u_left.max_norm())) throw AsymmetricU(u_left, gap);

  LinearDecomposition out;
  out.a = a;
  out.d = d;
  out.q = q;
  out.s = s;
  out.t = t;
  out.u = sym_antisym_split(u_left).sym;
  return out;
}

/// phi(x) = x^T U x / 2 with analytic gradient U x (symmetric part of U).
inline ScalarField quadratic_potential(const Matrix2& u) {
  const Matrix2 us = sym_antisym_split(u).sym;
  return ScalarField([us](const Point2& x) { return 0.5 * x.dot(us * x); },
                     [us](const Point2& x) { return us * x; });
}

/// x' = -(D + Q) U x.
inline Point2 reconstruct_drift(const LinearDecomposition& dec, const Point2& x) {
  return -(dec.d_plus_q() * (dec.u * x));
}

/// Coefficients of phi(x) = c11 x1^2 + c12 x1 x2 + c22 x2^2.
struct QuadraticCoefficients {
  double c11, c12, c22;
};

inline QuadraticCoefficients potential_coefficients(const Matrix2& u) {
  const Matrix2 us = sym_antisym_split(u).sym;
  return {0.5 * us.a11, us.a12, 0.5 * us.a22};
}

/// Result of resolving a LinearSystem into a decomposition.
struct LinearConstruction {
  QSolution branch;
  LinearDecomposition decomposition;
};

/// D defaults to the identity; q is taken from the system when given,
/// otherwise solved. Throws InconsistentGyration when no q exists.
inline LinearConstruction construct_linear(const LinearSystem& sys, const Tolerances& tol = {}) {
  const DiffusionParams d = sys.diffusion.value_or(DiffusionParams::identity());
  QSolution branch = solve_gyration(sys.a, d, tol);
  double q = 0.0;
  if (sys.gyration) {
    q = *sys.gyration;
  } else if (const auto* u = std::get_if<UniqueQ>(&branch)) {
    q = u->q;
  } else if (const auto* f = std::get_if<FamilyQ>(&branch)) {
    q = f->default_q;
  } else {
    throw InconsistentGyration(std::get<InconsistentQ>(branch).residual,
                               gyration_constraint_note(sys.a, tol));
  }
  return {branch, assemble_decomposition(sys.a, d, AntisymScalar{q}, tol)};
}

}  // namespace aodecomp
