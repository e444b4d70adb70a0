#pragma once

// Two dissipation criteria and their comparison:
//   dissipation power  H_P = x'^T S x'
//   divergence         div f = sum_i df_i/dx_i
// For any decomposition built here |dphi/dt| = H_P, since
//   grad phi . x' = -x'^T (S + T) x' = -x'^T S x'.

#include <cmath>
#include <optional>
#include <string>

#include "aodecomp/core.hpp"
#include "aodecomp/field.hpp"
#include "aodecomp/linear.hpp"
#include "aodecomp/system.hpp"

namespace aodecomp {

class NotPSD : public Error {
 public:
  explicit NotPSD(const Matrix2& s)
      : Error("friction matrix is not positive semidefinite (trace " + std::to_string(s.trace()) +
              ", det " + std::to_string(s.det()) + ")"),
        s_(s) {}
  const Matrix2& s() const { return s_; }

 private:
  Matrix2 s_;
};

inline bool is_psd(const Matrix2& s, const Tolerances& tol = {}) {
  const double slack = tol.psd_slack * (1.0 + s.max_norm());
  const Matrix2 sym = sym_antisym_split(s).sym;
  return sym.a11 >= -slack && sym.a22 >= -slack && sym.det() >= -slack * (1.0 + s.max_norm());
}

/// H_P = x'^T S x'. Throws NotPSD when S fails the PSD check.
inline double dissipation_power(const Matrix2& s, const Point2& xdot, const Tolerances& tol = {}) {
  if (!is_psd(s, tol)) throw NotPSD(s);
  return xdot.dot(s * xdot);
}

/// A system with its potential and (for linear systems) its decomposition
/// resolved once, for repeated pointwise evaluation.
class ResolvedSystem {
 public:
  explicit ResolvedSystem(SystemSpec sys, const Tolerances& tol = {})
      : sys_(std::move(sys)), tol_(tol) {
    if (const auto* lin = sys_.linear()) {
      // An inconsistent linear system still has a drift and divergence.
      try {
        linear_ = construct_linear(*lin, tol_);
        potential_ = quadratic_potential(linear_->decomposition.u);
      } catch (const InconsistentGyration& e) {
        inconsistency_ = e;
      }
    } else if (sys_.analytic()->potential) {
      potential_ = *sys_.analytic()->potential;
    }
  }

  const SystemSpec& spec() const { return sys_; }
  const Tolerances& tolerances() const { return tol_; }
  bool has_potential() const { return potential_.has_value(); }
  const std::optional<LinearConstruction>& linear() const { return linear_; }

  Point2 drift(const Point2& x) const { return aodecomp::drift(sys_, x); }

  double divergence(const Point2& x) const {
    if (const auto* lin = sys_.linear()) return lin->a.trace();
    return sys_.analytic()->field.divergence(x, tol_);
  }

  const ScalarField& potential() const {
    if (inconsistency_) throw *inconsistency_;
    if (!potential_) throw MissingPotential(sys_.name);
    return *potential_;
  }

  double phi(const Point2& x) const { return potential()(x); }
  Point2 grad_phi(const Point2& x) const { return potential().gradient(x, tol_); }
  double phi_rate(const Point2& x) const { return grad_phi(x).dot(drift(x)); }

  /// S at x: the constant S of the linear construction, or s(x) I from the
  /// pointwise decomposition (zero at equilibria, where x' = 0 anyway).
  Matrix2 friction(const Point2& x) const {
    if (linear_) return linear_->decomposition.s;
    const Point2 f = drift(x);
    if (is_equilibrium(f, x, tol_)) return Matrix2::zero();
    return decompose_at(x, f, grad_phi(x), tol_).s * Matrix2::identity();
  }

  double dissipation_power(const Point2& x) const {
    return aodecomp::dissipation_power(friction(x), drift(x), tol_);
  }

 private:
  SystemSpec sys_;
  Tolerances tol_;
  std::optional<ScalarField> potential_;
  std::optional<LinearConstruction> linear_;
  std::optional<InconsistentGyration> inconsistency_;
};

/// Exactly trace(A) for linear systems; analytic or finite-difference
/// divergence otherwise.
inline double divergence(const SystemSpec& sys, const Point2& x, const Tolerances& tol = {}) {
  if (const auto* lin = sys.linear()) return lin->a.trace();
  return sys.analytic()->field.divergence(x, tol);
}

/// dphi/dt = grad phi(x) . f(x).
inline double phi_rate(const SystemSpec& sys, const Point2& x, const Tolerances& tol = {}) {
  return potential_of(sys, tol).gradient(x, tol).dot(drift(sys, x));
}

enum class PowerVerdict { Conservative, Dissipative };
enum class DivergenceVerdict { Conservative, Dissipative, Expanding };

inline std::string to_string(PowerVerdict v) {
  return v == PowerVerdict::Conservative ? "Conservative" : "Dissipative";
}
inline std::string to_string(DivergenceVerdict v) {
  switch (v) {
    case DivergenceVerdict::Conservative: return "Conservative";
    case DivergenceVerdict::Dissipative: return "Dissipative";
    case DivergenceVerdict::Expanding: return "Expanding";
  }
  return "";
}

inline PowerVerdict power_verdict(double h_p, const Tolerances& tol = {}) {
  return std::abs(h_p) <= tol.zero_verdict ? PowerVerdict::Conservative : PowerVerdict::Dissipative;
}

inline DivergenceVerdict divergence_verdict(double div, const Tolerances& tol = {}) {
  if (std::abs(div) <= tol.zero_verdict) return DivergenceVerdict::Conservative;
  return div < 0.0 ? DivergenceVerdict::Dissipative : DivergenceVerdict::Expanding;
}

/// Expanding never agrees with either power verdict.
inline bool criteria_agree(PowerVerdict p, DivergenceVerdict d) {
  return (p == PowerVerdict::Conservative && d == DivergenceVerdict::Conservative) ||
         (p == PowerVerdict::Dissipative && d == DivergenceVerdict::Dissipative);
}

/// Pointwise comparison of the two criteria. The power-side fields are
/// empty for divergence-only reports.
struct DissipationReport {
  Point2 at;
  std::optional<double> h_p;
  double div_f = 0.0;
  std::optional<double> phi_rate;
  std::optional<double> identity_gap;  // | |phi_rate| - h_p |
  std::optional<PowerVerdict> verdict_power;
  DivergenceVerdict verdict_divergence = DivergenceVerdict::Conservative;
  std::optional<bool> agree;

  friend bool operator==(const DissipationReport&, const DissipationReport&) = default;
};

inline DissipationReport divergence_report(const ResolvedSystem& sys, const Point2& x) {
  require_finite(x, "report");
  DissipationReport r;
  r.at = x;
  r.div_f = sys.divergence(x);
  r.verdict_divergence = divergence_verdict(r.div_f, sys.tolerances());
  return r;
}

inline DissipationReport report(const ResolvedSystem& sys, const Point2& x) {
  DissipationReport r = divergence_report(sys, x);
  const double rate = sys.phi_rate(x);
  const double hp = sys.dissipation_power(x);
  r.h_p = hp;
  r.phi_rate = rate;
  r.identity_gap = std::abs(std::abs(rate) - hp);
  r.verdict_power = power_verdict(hp, sys.tolerances());
  r.agree = criteria_agree(*r.verdict_power, r.verdict_divergence);
  return r;
}

inline DissipationReport report(const SystemSpec& sys, const Point2& x, const Tolerances& tol = {}) {
  return report(ResolvedSystem(sys, tol), x);
}

}  // namespace aodecomp
