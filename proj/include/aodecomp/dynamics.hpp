#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aodecomp/catalog.hpp"
#include "aodecomp/core.hpp"
#include "aodecomp/dissipation.hpp"

namespace aodecomp {

struct TrajectorySample {
  double t = 0.0;
  Point2 x;
  std::optional<double> phi;
  std::optional<double> phi_rate;
  std::optional<double> h_p;
  double div_f = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  std::string method = "rk4";
};

/// Thrown when a state coordinate leaves [-blowup, blowup] or turns
/// non-finite. Carries every sample computed before the blow-up.
class TrajectoryBlowUp : public NonFinite {
 public:
  TrajectoryBlowUp(Trajectory partial, double t)
      : NonFinite("trajectory blew up at t = " + std::to_string(t)),
        partial_(std::move(partial)),
        t_(t) {}
  const Trajectory& partial() const { return partial_; }
  double time() const { return t_; }

 private:
  Trajectory partial_;
  double t_;
};

/// One classical fourth-order Runge-Kutta step.
template <typename State, typename Rhs>
State rk4_step(const Rhs& rhs, const State& x, double dt) {
  const State k1 = rhs(x);
  const State k2 = rhs(x + (0.5 * dt) * k1);
  const State k3 = rhs(x + (0.5 * dt) * k2);
  const State k4 = rhs(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline std::size_t step_count(double dt, double t_end) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= dt");
  return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
}

namespace detail {

inline TrajectorySample sample_at(const ResolvedSystem& sys, double t, const Point2& x) {
  TrajectorySample s;
  s.t = t;
  s.x = x;
  s.div_f = sys.divergence(x);
  if (sys.has_potential()) {
    s.phi = sys.phi(x);
    s.phi_rate = sys.phi_rate(x);
    try {
      s.h_p = sys.dissipation_power(x);
    } catch (const NotPSD&) {
      // S(x) < 0 where phi increases (time-reversed flows); H_P undefined.
    }
  }
  return s;
}

inline bool escaped(const Point2& x, const Tolerances& tol) {
  return !x.finite() || std::abs(x.x1) > tol.blowup || std::abs(x.x2) > tol.blowup;
}

}  // namespace detail

/// Fixed-step RK4 from x0 over [0, t_end]; samples at t_i = i dt.
inline Trajectory integrate(const ResolvedSystem& sys, const Point2& x0, double dt, double t_end) {
  require_finite(x0, "integrate");
  const std::size_t n = step_count(dt, t_end);
  const Tolerances& tol = sys.tolerances();
  Trajectory traj;
  traj.dt = dt;
  traj.samples.reserve(n + 1);
  traj.samples.push_back(detail::sample_at(sys, 0.0, x0));
  auto rhs = [&sys](const Point2& x) { return sys.drift(x); };
  Point2 x = x0;
  for (std::size_t i = 1; i <= n; ++i) {
    x = rk4_step(rhs, x, dt);
    const double t = static_cast<double>(i) * dt;
    if (detail::escaped(x, tol)) throw TrajectoryBlowUp(std::move(traj), t);
    traj.samples.push_back(detail::sample_at(sys, t, x));
  }
  return traj;
}

inline Trajectory integrate(const SystemSpec& sys, const Point2& x0, double dt, double t_end,
                            const Tolerances& tol = {}) {
  return integrate(ResolvedSystem(sys, tol), x0, dt, t_end);
}

struct PolarSample {
  double t;
  double r;
  double theta;
};

struct PolarTrajectory {
  std::vector<PolarSample> samples;
  double dt = 0.0;
};

namespace detail {
struct Polar {
  double r, theta;
  friend Polar operator+(Polar a, Polar b) { return {a.r + b.r, a.theta + b.theta}; }
  friend Polar operator*(double s, Polar a) { return {s * a.r, s * a.theta}; }
};
}  // namespace detail

/// RK4 on r' = r - r^3, theta' = 1.
inline PolarTrajectory integrate_polar(double r0, double theta0, double dt, double t_end) {
  if (!(r0 > 0.0)) throw std::invalid_argument("integrate_polar: r0 must be positive");
  const std::size_t n = step_count(dt, t_end);
  auto rhs = [](const detail::Polar& p) { return detail::Polar{p.r - p.r * p.r * p.r, 1.0}; };
  PolarTrajectory out;
  out.dt = dt;
  out.samples.reserve(n + 1);
  detail::Polar p{r0, theta0};
  out.samples.push_back({0.0, p.r, p.theta});
  for (std::size_t i = 1; i <= n; ++i) {
    p = rk4_step(rhs, p, dt);
    out.samples.push_back({static_cast<double>(i) * dt, p.r, p.theta});
  }
  return out;
}

/// r(t) of r' = r - r^3: r^2 = r0^2 e^{2t} / (1 - r0^2 + r0^2 e^{2t}).
inline double radial_solution(double r0, double t) {
  const double g = r0 * r0 * std::exp(2.0 * t);
  return std::sqrt(g / (1.0 - r0 * r0 + g));
}

/// Largest phi(t + dt) - phi(t) over consecutive samples (0 for fewer than
/// two samples). Throws MissingPotential without a phi column.
inline double check_monotonicity(const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    if (!traj.samples[i].phi) throw MissingPotential("trajectory");
    if (i > 0) worst = std::max(worst, *traj.samples[i].phi - *traj.samples[i - 1].phi);
  }
  return worst;
}

/// Max distance between the Cartesian RK4 trajectory of the builtin limit
/// cycle and the polar RK4 trajectory mapped back to Cartesian.
inline double cartesian_polar_agreement(const Point2& x0, double dt, double t_end) {
  if (!(x0.norm() > 0.0)) throw std::invalid_argument("cartesian_polar_agreement: x0 must be nonzero");
  const Trajectory cart = integrate(catalog::get("hopf_limit_cycle").spec, x0, dt, t_end);
  const PolarTrajectory pol = integrate_polar(x0.norm(), std::atan2(x0.x2, x0.x1), dt, t_end);
  double worst = 0.0;
  for (std::size_t i = 0; i < cart.samples.size(); ++i) {
    const PolarSample& p = pol.samples[i];
    const Point2 mapped{p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
    worst = std::max(worst, (cart.samples[i].x - mapped).norm());
  }
  return worst;
}

struct Box {
  double xmin, xmax, ymin, ymax;

  std::string describe() const {
    std::ostringstream s;
    s << "[" << xmin << ", " << xmax << "] x [" << ymin << ", " << ymax << "]";
    return s.str();
  }
};

struct Definition2Report {
  struct Violation {
    Point2 x;
    double phi_rate;
  };
  std::vector<Violation> nonincreasing_violations;
  double max_phi_rate = -std::numeric_limits<double>::infinity();
  double empirical_infimum = std::numeric_limits<double>::infinity();
  Point2 infimum_at;
  std::string region;
  /// phi along 8 rays at radii 10, 100, 1000 stays above the grid infimum.
  bool radial_probe_passed = false;
  double radial_probe_min = std::numeric_limits<double>::infinity();
  /// Plain-language scope of the result; a grid is a partial certificate.
  std::string statement;
};

/// Samples dphi/dt and phi on a samples_per_axis^2 grid over `region`.
inline Definition2Report definition2_check(const ResolvedSystem& sys, const Box& region,
                                           int samples_per_axis) {
  if (samples_per_axis < 2) throw std::invalid_argument("samples_per_axis must be >= 2");
  if (!(region.xmin < region.xmax) || !(region.ymin < region.ymax)) {
    throw std::invalid_argument("definition2_check: empty region");
  }
  const ScalarField& phi = sys.potential();
  const double tol = sys.tolerances().monotone_slack;
  Definition2Report rep;
  rep.region = region.describe();
  const int n = samples_per_axis;
  for (int j = 0; j < n; ++j) {
    const double y = region.ymin + (region.ymax - region.ymin) * j / (n - 1);
    for (int i = 0; i < n; ++i) {
      const Point2 x{region.xmin + (region.xmax - region.xmin) * i / (n - 1), y};
      const double rate = sys.phi_rate(x);
      rep.max_phi_rate = std::max(rep.max_phi_rate, rate);
      if (rate > tol) rep.nonincreasing_violations.push_back({x, rate});
      const double v = phi(x);
      if (v < rep.empirical_infimum) {
        rep.empirical_infimum = v;
        rep.infimum_at = x;
      }
    }
  }
  for (double radius : {10.0, 100.0, 1000.0}) {
    for (int k = 0; k < 8; ++k) {
      const double ang = k * std::numbers::pi / 4.0;
      rep.radial_probe_min =
          std::min(rep.radial_probe_min, phi(Point2{radius * std::cos(ang), radius * std::sin(ang)}));
    }
  }
  rep.radial_probe_passed = rep.radial_probe_min > rep.empirical_infimum;

  std::ostringstream s;
  if (rep.nonincreasing_violations.empty()) {
    s << "no violation of dphi/dt <= 0 found on region " << rep.region;
  } else {
    s << rep.nonincreasing_violations.size() << " grid points with dphi/dt > 0 on region "
      << rep.region;
  }
  s << "; grid infimum " << rep.empirical_infimum << "; radial probe "
    << (rep.radial_probe_passed ? "above" : "NOT above")
    << " the grid infimum. Grid sampling is a partial certificate only.";
  rep.statement = s.str();
  return rep;
}

inline Definition2Report definition2_check(const SystemSpec& sys, const Box& region,
                                           int samples_per_axis, const Tolerances& tol = {}) {
  return definition2_check(ResolvedSystem(sys, tol), region, samples_per_axis);
}

}  // namespace aodecomp
