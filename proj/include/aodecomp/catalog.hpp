#pragma once

// Builtin example systems. Each potential-bearing entry carries closed-form
// expected pieces (S, T, D, Q, phi, grad phi, div f, H_P) written out
// independently of the general construction, so tests can compare the two.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aodecomp/core.hpp"
#include "aodecomp/linear.hpp"

namespace aodecomp {

class UnknownSystem : public Error {
 public:
  explicit UnknownSystem(const std::string& name) : Error("unknown system '" + name + "'") {}
};

struct ExpectedPieces {
  std::function<Matrix2(const Point2&)> friction;
  std::function<double(const Point2&)> transverse;
  /// D(x); empty where the frame is singular.
  std::function<std::optional<Matrix2>(const Point2&)> diffusion;
  /// q(x) with Q = q J; empty where the frame is singular.
  std::function<std::optional<double>(const Point2&)> gyration;
  std::function<double(const Point2&)> potential;
  std::function<Point2(const Point2&)> potential_gradient;
  std::function<double(const Point2&)> divergence;
  std::function<double(const Point2&)> dissipation_power;
};

struct CatalogEntry {
  std::string name;
  SystemSpec spec;
  std::optional<ExpectedPieces> expected;
  std::string provenance;
};

namespace detail {

inline ExpectedPieces constant_linear_pieces(const Matrix2& a, const Matrix2& s, double t,
                                             const DiffusionParams& d, double q, const Matrix2& u,
                                             std::function<double(const Point2&)> h_p) {
  ExpectedPieces e;
  e.friction = [s](const Point2&) { return s; };
  e.transverse = [t](const Point2&) { return t; };
  e.diffusion = [dm = d.matrix()](const Point2&) -> std::optional<Matrix2> { return dm; };
  e.gyration = [q](const Point2&) -> std::optional<double> { return q; };
  e.potential = [u](const Point2& x) { return 0.5 * x.dot(u * x); };
  e.potential_gradient = [u](const Point2& x) { return u * x; };
  e.divergence = [tr = a.trace()](const Point2&) { return tr; };
  e.dissipation_power = std::move(h_p);
  return e;
}

inline SystemSpec linear_spec(std::string name, const Matrix2& a, const DiffusionParams& d,
                              double q) {
  return SystemSpec{std::move(name), LinearSystem{a, d, q}};
}

// x1' = -x2 + x1 (1 - r^2), x2' = x1 + x2 (1 - r^2);
// phi = r^2 (r^2 - 2) / 4.
inline CatalogEntry hopf_limit_cycle() {
  auto f = [](const Point2& x) {
    const double u = 1.0 - x.norm_sq();
    return Point2{-x.x2 + x.x1 * u, x.x1 + x.x2 * u};
  };
  auto div = [](const Point2& x) { return 2.0 * (1.0 - 2.0 * x.norm_sq()); };
  auto jac = [](const Point2& x) {
    const double u = 1.0 - x.norm_sq();
    return Matrix2{u - 2.0 * x.x1 * x.x1, -1.0 - 2.0 * x.x1 * x.x2,
                   1.0 - 2.0 * x.x1 * x.x2, u - 2.0 * x.x2 * x.x2};
  };
  auto phi = [](const Point2& x) {
    const double r2 = x.norm_sq();
    return 0.25 * r2 * (r2 - 2.0);
  };
  auto grad = [](const Point2& x) { return (x.norm_sq() - 1.0) * x; };

  ExpectedPieces e;
  e.friction = [](const Point2& x) {
    const double u = 1.0 - x.norm_sq();
    return (u * u / (1.0 + u * u)) * Matrix2::identity();
  };
  e.transverse = [](const Point2& x) {
    const double u = 1.0 - x.norm_sq();
    return u / (1.0 + u * u);
  };
  e.diffusion = [](const Point2& x) -> std::optional<Matrix2> {
    if (x.norm_sq() == 1.0) return std::nullopt;
    return Matrix2::identity();
  };
  // The printed form has +1/(1 - r^2); inverting S + T gives the opposite
  // sign with J = [[0, 1], [-1, 0]].
  e.gyration = [](const Point2& x) -> std::optional<double> {
    const double u = 1.0 - x.norm_sq();
    if (u == 0.0) return std::nullopt;
    return -1.0 / u;
  };
  e.potential = phi;
  e.potential_gradient = grad;
  e.divergence = div;
  e.dissipation_power = [](const Point2& x) {
    const double r2 = x.norm_sq();
    return r2 * (r2 - 1.0) * (r2 - 1.0);
  };

  CatalogEntry c;
  c.name = "hopf_limit_cycle";
  c.spec = SystemSpec{c.name, AnalyticSystem{VectorField(f, div, jac), ScalarField(phi, grad)}};
  c.expected = std::move(e);
  c.provenance = "limit-cycle system with known potential phi = r^2 (r^2 - 2) / 4";
  return c;
}

// Case 1(i): A = diag(l1, l2), l1 + l2 != 0.
inline CatalogEntry stable_node() {
  const double l1 = -1.0, l2 = -2.0;
  const DiffusionParams d(1.0, 0.3, 1.0);
  const double sum = l1 + l2;
  const double q = (l1 - l2) / sum * d.d12();
  const double k = sum * sum / (d.d11() * d.d22() * sum * sum - 4.0 * l1 * l2 * d.d12() * d.d12());
  const Matrix2 s = k * Matrix2{d.d22(), -d.d12(), -d.d12(), d.d11()};
  const double t = k * d.d12() * (l2 - l1) / sum;
  const double cross = -2.0 * l1 * l2 / sum * d.d12();
  const Matrix2 u = -k * Matrix2{l1 * d.d22(), cross, cross, l2 * d.d11()};
  const Matrix2 a = Matrix2::diag(l1, l2);
  auto hp = [=](const Point2& x) {
    return k * (d.d22() * l1 * l1 * x.x1 * x.x1 - 2.0 * d.d12() * l1 * l2 * x.x1 * x.x2 +
                d.d11() * l2 * l2 * x.x2 * x.x2);
  };
  return {"stable_node", linear_spec("stable_node", a, d, q),
          constant_linear_pieces(a, s, t, d, q, u, hp),
          "Jordan type diag(l1, l2), l1 + l2 != 0 (l1 = -1, l2 = -2)"};
}

// Case 1(ii): A = diag(l1, -l1); d12 forced to 0, q free.
inline CatalogEntry saddle_tracezero() {
  const double l1 = 1.0;
  const DiffusionParams d = DiffusionParams::identity();
  const double q = kFamilyDefaultQ;
  const double c = 1.0 / (d.d11() * d.d22() + q * q);
  const Matrix2 s = c * Matrix2::diag(d.d22(), d.d11());
  const double t = -q * c;
  const Matrix2 u = -l1 * c * Matrix2{d.d22(), q, q, -d.d11()};
  const Matrix2 a = Matrix2::diag(l1, -l1);
  auto hp = [=](const Point2& x) {
    return l1 * l1 * (d.d22() * x.x1 * x.x1 + d.d11() * x.x2 * x.x2) * c;
  };
  return {"saddle_tracezero", linear_spec("saddle_tracezero", a, d, q),
          constant_linear_pieces(a, s, t, d, q, u, hp),
          "Jordan type diag(l1, -l1), trace zero, q arbitrary (l1 = 1)"};
}

// Case 2(i): A = l1 I, l1 != 0, q = 0.
inline CatalogEntry repeated_diagonal() {
  const double l1 = -1.0;
  const DiffusionParams d(1.0, 0.3, 1.0);
  const double det = d.d11() * d.d22() - d.d12() * d.d12();
  const Matrix2 s = (1.0 / det) * Matrix2{d.d22(), -d.d12(), -d.d12(), d.d11()};
  // The printed U has denominator d11 d22 + d12^2; S and direct inversion
  // both give d11 d22 - d12^2.
  const Matrix2 u = -l1 * s;
  const Matrix2 a = l1 * Matrix2::identity();
  auto hp = [=](const Point2& x) {
    return l1 * l1 *
           (d.d22() * x.x1 * x.x1 - 2.0 * d.d12() * x.x1 * x.x2 + d.d11() * x.x2 * x.x2) / det;
  };
  return {"repeated_diagonal", linear_spec("repeated_diagonal", a, d, 0.0),
          constant_linear_pieces(a, s, 0.0, d, 0.0, u, hp),
          "Jordan type l1 I, l1 != 0 (l1 = -1)"};
}

// Case 2(ii): A = 0, conservative and trivially decomposed.
inline CatalogEntry zero_matrix() {
  const DiffusionParams d = DiffusionParams::identity();
  const Matrix2 a = Matrix2::zero();
  return {"zero_matrix", linear_spec("zero_matrix", a, d, 0.0),
          constant_linear_pieces(a, Matrix2::identity(), 0.0, d, 0.0, Matrix2::zero(),
                                 [](const Point2&) { return 0.0; }),
          "Jordan type l1 I with l1 = 0 (conservative)"};
}

// Case 3(i): A = [[l, 0], [1, l]], l != 0, q = -d11 / (2 l).
inline CatalogEntry defective() {
  const double l = -1.0;
  const DiffusionParams d(1.0, 0.3, 1.0);
  const double d11 = d.d11(), d12 = d.d12(), d22 = d.d22();
  const double q = -d11 / (2.0 * l);
  const double k = 4.0 * l * l / (4.0 * l * l * (d11 * d22 - d12 * d12) + d11 * d11);
  const Matrix2 s = k * Matrix2{d22, -d12, -d12, d11};
  const double t = k * d11 / (2.0 * l);
  const double cross = -d12 * l + 0.5 * d11;
  const Matrix2 u = -k * Matrix2{d22 * l - d12 + d11 / (2.0 * l), cross, cross, d11 * l};
  const Matrix2 a{l, 0.0, 1.0, l};
  // The printed H_P squares d22 in the x1^2 coefficient; x'^T S x' has it
  // linear, as in the printed dphi/dt.
  auto hp = [=](const Point2& x) {
    return k * ((l * l * d22 - 2.0 * l * d12 + d11) * x.x1 * x.x1 +
                2.0 * (-l * l * d12 + l * d11) * x.x1 * x.x2 + l * l * d11 * x.x2 * x.x2);
  };
  return {"defective", linear_spec("defective", a, d, q),
          constant_linear_pieces(a, s, t, d, q, u, hp),
          "Jordan type [[l, 0], [1, l]], l != 0 (l = -1)"};
}

// Case 3(ii): A = [[0, 0], [1, 0]], D = diag(0, d22), q free.
inline CatalogEntry defective_nilpotent() {
  const DiffusionParams d(0.0, 0.0, 1.0);
  const double q = kFamilyDefaultQ;
  const Matrix2 a{0.0, 0.0, 1.0, 0.0};
  const Matrix2 s = (1.0 / (q * q)) * Matrix2::diag(d.d22(), 0.0);
  const double t = -1.0 / q;
  const Matrix2 u = (1.0 / q) * Matrix2::diag(1.0, 0.0);
  return {"defective_nilpotent", linear_spec("defective_nilpotent", a, d, q),
          constant_linear_pieces(a, s, t, d, q, u, [](const Point2&) { return 0.0; }),
          "Jordan type [[0, 0], [1, 0]] with d11 = d12 = 0 (conservative)"};
}

// Case 4(i): A = [[alpha, beta], [-beta, alpha]], alpha != 0.
inline CatalogEntry stable_spiral() {
  const double al = -1.0, be = 2.0;
  const DiffusionParams d(1.0, 0.3, 1.0);
  const double d11 = d.d11(), d12 = d.d12(), d22 = d.d22();
  const double q = be * (d11 + d22) / (2.0 * al);
  const double k = 4.0 * al * al /
                   (4.0 * al * al * (d11 * d22 - d12 * d12) + be * be * (d11 + d22) * (d11 + d22));
  const Matrix2 s = k * Matrix2{d22, -d12, -d12, d11};
  const double t = -k * q;
  const double m = be * be * (d11 + d22) / (2.0 * al);
  const double cross = -d12 * al + 0.5 * be * (d22 - d11);
  const Matrix2 u = -k * Matrix2{d22 * al + d12 * be + m, cross, cross, d11 * al - d12 * be + m};
  const Matrix2 a{al, be, -be, al};
  auto hp = [=](const Point2& x) {
    return k * ((al * al * d22 + 2.0 * al * be * d12 + be * be * d11) * x.x1 * x.x1 +
                2.0 * (al * be * d22 - (al * al - be * be) * d12 - al * be * d11) * x.x1 * x.x2 +
                (be * be * d22 - 2.0 * al * be * d12 + al * al * d11) * x.x2 * x.x2);
  };
  return {"stable_spiral", linear_spec("stable_spiral", a, d, q),
          constant_linear_pieces(a, s, t, d, q, u, hp),
          "Jordan type [[alpha, beta], [-beta, alpha]], alpha != 0 (alpha = -1, beta = 2)"};
}

// Case 4(ii): A = [[0, beta], [-beta, 0]] forces D = 0; q free.
inline CatalogEntry center_conservative() {
  const double be = 1.0;
  const DiffusionParams d = DiffusionParams::zero();
  const double q = kFamilyDefaultQ;
  const Matrix2 a{0.0, be, -be, 0.0};
  const Matrix2 u = (-be / q) * Matrix2::identity();
  return {"center_conservative", linear_spec("center_conservative", a, d, q),
          constant_linear_pieces(a, Matrix2::zero(), -1.0 / q, d, q, u,
                                 [](const Point2&) { return 0.0; }),
          "Jordan type [[0, beta], [-beta, 0]], D forced to 0 (beta = 1, conservative)"};
}

// Relaxation oscillator with no closed-form potential; divergence only.
inline CatalogEntry van_der_pol() {
  const double mu = 1.0;
  auto f = [mu](const Point2& x) {
    return Point2{x.x2, mu * (1.0 - x.x1 * x.x1) * x.x2 - x.x1};
  };
  auto div = [mu](const Point2& x) { return mu * (1.0 - x.x1 * x.x1); };
  CatalogEntry c;
  c.name = "van_der_pol";
  c.spec = SystemSpec{c.name, AnalyticSystem{VectorField(f, div), std::nullopt}};
  c.provenance = "van der Pol oscillator (mu = 1); no known potential, divergence-only fixture";
  return c;
}

inline const std::map<std::string, CatalogEntry>& registry() {
  static const std::map<std::string, CatalogEntry> entries = [] {
    std::map<std::string, CatalogEntry> m;
    for (auto make : {hopf_limit_cycle, stable_node, saddle_tracezero, repeated_diagonal,
                      zero_matrix, defective, defective_nilpotent, stable_spiral,
                      center_conservative, van_der_pol}) {
      CatalogEntry e = make();
      std::string key = e.name;
      m.emplace(std::move(key), std::move(e));
    }
    return m;
  }();
  return entries;
}

}  // namespace detail

namespace catalog {

inline const CatalogEntry& get(const std::string& name) {
  const auto& reg = detail::registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw UnknownSystem(name);
  return it->second;
}

inline std::vector<std::string> list() {
  std::vector<std::string> names;
  for (const auto& [name, entry] : detail::registry()) names.push_back(name);
  return names;
}

}  // namespace catalog
}  // namespace aodecomp
