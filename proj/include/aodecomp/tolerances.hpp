#pragma once

#include <cstdlib>
#include <optional>
#include <string>

namespace aodecomp {

/// Every numeric threshold used by the library, gathered in one place.
///
/// Library operations take a `const Tolerances&` defaulting to the values
/// below. The command-line tool overrides `zero_verdict` (the master
/// tolerance) from the `AODECOMP_TOL` environment variable.
struct Tolerances {
  /// invert2 rejects |det| <= singular_det * (1 + max|m_ij|^2).
  double singular_det = 1e-12;
  /// Central-difference step is fd_step * (1 + |x_i|) per coordinate.
  double fd_step = 1e-6;
  /// trace(A) counts as zero when |trace| <= trace_zero * (1 + max|a_ij|).
  double trace_zero = 1e-10;
  /// Discriminant of the characteristic polynomial counts as zero below
  /// spectral * (1 + max|a_ij|)^2.
  double spectral = 1e-10;
  /// Equilibrium when ||f(x)|| <= equilibrium * (1 + ||x||).
  double equilibrium = 1e-10;
  /// S + T is treated as singular on the point when s^2 + t^2 <= this.
  double singular_frame = 1e-20;
  /// Master tolerance: |value| <= zero_verdict is "Conservative".
  double zero_verdict = 1e-9;
  /// Slack for positive-semidefiniteness checks on S.
  double psd_slack = 1e-12;
  /// U computed as -[D+Q]^-1 A and -A^T [D-Q]^-1 must agree to this.
  double u_agreement = 1e-9;
  /// Any state coordinate beyond this magnitude is a blow-up.
  double blowup = 1e12;
  /// Largest accepted step increase of phi for a monotone trajectory.
  double monotone_slack = 1e-9;
};

/// Reads AODECOMP_TOL into `zero_verdict`. Unset or unparsable values leave
/// the defaults untouched; the parsed value is returned so callers can
/// report it.
inline std::optional<double> apply_env_override(Tolerances& tol,
                                                const char* var = "AODECOMP_TOL") {
  const char* raw = std::getenv(var);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0)) return std::nullopt;
  tol.zero_verdict = v;
  return v;
}

}  // namespace aodecomp
