#pragma once

#include <optional>

#include "aodecomp/core.hpp"
#include "aodecomp/linear.hpp"

namespace aodecomp {

inline Point2 drift(const SystemSpec& sys, const Point2& x) {
  if (const auto* lin = sys.linear()) return lin->a * x;
  return sys.analytic()->field(x);
}

inline Matrix2 drift_jacobian(const SystemSpec& sys, const Point2& x, const Tolerances& tol = {}) {
  if (const auto* lin = sys.linear()) return lin->a;
  return sys.analytic()->field.jacobian(x, tol);
}

inline bool has_potential(const SystemSpec& sys) {
  if (sys.is_linear()) return true;
  return sys.analytic()->potential.has_value();
}

/// The potential of the system: given for analytic systems, x^T U x / 2 of
/// the linear construction otherwise. Throws MissingPotential or
/// InconsistentGyration.
inline ScalarField potential_of(const SystemSpec& sys, const Tolerances& tol = {}) {
  if (const auto* lin = sys.linear()) {
    return quadratic_potential(construct_linear(*lin, tol).decomposition.u);
  }
  const auto& pot = sys.analytic()->potential;
  if (!pot) throw MissingPotential(sys.name);
  return *pot;
}

/// x' = -f: same potential, reversed flow. Always yields an analytic system.
inline SystemSpec time_reversed(const SystemSpec& sys, const Tolerances& tol = {}) {
  SystemSpec out;
  out.name = sys.name + "_reversed";
  if (const auto* lin = sys.linear()) {
    const Matrix2 a = lin->a;
    VectorField f([a](const Point2& x) { return -(a * x); },
                  [a](const Point2&) { return -a.trace(); },
                  [a](const Point2&) { return -a; });
    out.kind = AnalyticSystem{std::move(f), potential_of(sys, tol)};
  } else {
    const auto& an = *sys.analytic();
    out.kind = AnalyticSystem{an.field.negated(), an.potential};
  }
  return out;
}

}  // namespace aodecomp
