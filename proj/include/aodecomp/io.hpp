#pragma once

// JSON and CSV encodings of the library's result types.
//
// CSV: '.' decimal, ',' separator, '\n' line endings, mandatory header,
// numbers in %.17g form (locale independent). JSON numbers use the shortest
// representation that round-trips to the same double.

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>

#include "json.hpp"

#include "aodecomp/dissipation.hpp"
#include "aodecomp/dynamics.hpp"
#include "aodecomp/field.hpp"
#include "aodecomp/linear.hpp"

namespace aodecomp {

using json = nlohmann::json;

/// 17 significant digits, shortest of fixed/scientific, never locale-aware.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// JSON conversions
// ---------------------------------------------------------------------------

inline void to_json(json& j, const Point2& p) { j = json{{"x1", p.x1}, {"x2", p.x2}}; }
inline void from_json(const json& j, Point2& p) {
  p.x1 = j.at("x1").get<double>();
  p.x2 = j.at("x2").get<double>();
}

inline void to_json(json& j, const Matrix2& m) {
  j = json{{"a11", m.a11}, {"a12", m.a12}, {"a21", m.a21}, {"a22", m.a22}};
}
inline void from_json(const json& j, Matrix2& m) {
  m.a11 = j.at("a11").get<double>();
  m.a12 = j.at("a12").get<double>();
  m.a21 = j.at("a21").get<double>();
  m.a22 = j.at("a22").get<double>();
}

inline json diffusion_to_json(const DiffusionParams& d) {
  return json{{"d11", d.d11()}, {"d12", d.d12()}, {"d22", d.d22()}};
}
inline DiffusionParams diffusion_from_json(const json& j) {
  return {j.at("d11").get<double>(), j.at("d12").get<double>(), j.at("d22").get<double>()};
}

namespace detail {
template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}
template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}
}  // namespace detail

inline PowerVerdict power_verdict_from_string(const std::string& s) {
  if (s == "Conservative") return PowerVerdict::Conservative;
  if (s == "Dissipative") return PowerVerdict::Dissipative;
  throw std::invalid_argument("unknown power verdict '" + s + "'");
}

inline DivergenceVerdict divergence_verdict_from_string(const std::string& s) {
  if (s == "Conservative") return DivergenceVerdict::Conservative;
  if (s == "Dissipative") return DivergenceVerdict::Dissipative;
  if (s == "Expanding") return DivergenceVerdict::Expanding;
  throw std::invalid_argument("unknown divergence verdict '" + s + "'");
}

inline void to_json(json& j, const DissipationReport& r) {
  j = json{{"at", r.at},
           {"h_p", detail::optional_to_json(r.h_p)},
           {"div_f", r.div_f},
           {"phi_rate", detail::optional_to_json(r.phi_rate)},
           {"identity_gap", detail::optional_to_json(r.identity_gap)},
           {"verdict_power", r.verdict_power ? json(to_string(*r.verdict_power)) : json(nullptr)},
           {"verdict_divergence", to_string(r.verdict_divergence)},
           {"agree", detail::optional_to_json(r.agree)}};
}

inline void from_json(const json& j, DissipationReport& r) {
  r.at = j.at("at").get<Point2>();
  r.h_p = detail::optional_from_json<double>(j, "h_p");
  r.div_f = j.at("div_f").get<double>();
  r.phi_rate = detail::optional_from_json<double>(j, "phi_rate");
  r.identity_gap = detail::optional_from_json<double>(j, "identity_gap");
  if (auto v = detail::optional_from_json<std::string>(j, "verdict_power")) {
    r.verdict_power = power_verdict_from_string(*v);
  } else {
    r.verdict_power.reset();
  }
  r.verdict_divergence = divergence_verdict_from_string(j.at("verdict_divergence").get<std::string>());
  r.agree = detail::optional_from_json<bool>(j, "agree");
}

inline void to_json(json& j, const PointDecomposition& p) {
  j = json{{"at", p.at},
           {"s", p.s},
           {"t", p.t},
           {"d", detail::optional_to_json(p.d)},
           {"q", detail::optional_to_json(p.q)},
           {"singular_on_isopotential", p.singular_on_isopotential},
           {"f", p.f_val},
           {"grad_phi", p.grad_phi}};
}

inline void from_json(const json& j, PointDecomposition& p) {
  p.at = j.at("at").get<Point2>();
  p.s = j.at("s").get<double>();
  p.t = j.at("t").get<double>();
  p.d = detail::optional_from_json<double>(j, "d");
  p.q = detail::optional_from_json<double>(j, "q");
  p.singular_on_isopotential = j.at("singular_on_isopotential").get<bool>();
  p.f_val = j.at("f").get<Point2>();
  p.grad_phi = j.at("grad_phi").get<Point2>();
}

inline json linear_decomposition_to_json(const LinearDecomposition& dec) {
  const QuadraticCoefficients c = potential_coefficients(dec.u);
  return json{{"A", dec.a},
              {"D", diffusion_to_json(dec.d)},
              {"Q", json{{"q", dec.q.q}}},
              {"S", dec.s},
              {"T", json{{"t", dec.t.q}}},
              {"U", dec.u},
              {"phi", json{{"c11", c.c11}, {"c12", c.c12}, {"c22", c.c22}}}};
}

inline LinearDecomposition linear_decomposition_from_json(const json& j) {
  LinearDecomposition dec;
  dec.a = j.at("A").get<Matrix2>();
  dec.d = diffusion_from_json(j.at("D"));
  dec.q = AntisymScalar{j.at("Q").at("q").get<double>()};
  dec.s = j.at("S").get<Matrix2>();
  dec.t = AntisymScalar{j.at("T").at("t").get<double>()};
  dec.u = j.at("U").get<Matrix2>();
  return dec;
}

inline json spectral_class_to_json(const SpectralClass& c) {
  struct {
    json operator()(const RealDistinct& v) const {
      return {{"type", "RealDistinct"}, {"lambda1", v.lambda1}, {"lambda2", v.lambda2}};
    }
    json operator()(const RepeatedDiagonalizable& v) const {
      return {{"type", "RepeatedDiagonalizable"}, {"lambda", v.lambda}};
    }
    json operator()(const RepeatedDefective& v) const {
      return {{"type", "RepeatedDefective"}, {"lambda", v.lambda}};
    }
    json operator()(const ComplexPair& v) const {
      return {{"type", "ComplexPair"}, {"alpha", v.alpha}, {"beta", v.beta}};
    }
  } visitor;
  return std::visit(visitor, c);
}

inline json q_solution_to_json(const QSolution& s) {
  struct {
    json operator()(const UniqueQ& v) const { return {{"branch", "Unique"}, {"q", v.q}}; }
    json operator()(const FamilyQ& v) const {
      return {{"branch", "Family"}, {"constraint", v.note}, {"default_q", v.default_q}};
    }
    json operator()(const InconsistentQ& v) const {
      return {{"branch", "Inconsistent"}, {"residual", v.residual}};
    }
  } visitor;
  return std::visit(visitor, s);
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

inline void write_trajectory_header(std::ostream& out) {
  out << "t,x1,x2,phi,phi_rate,h_p,div_f\n";
}

inline void write_trajectory_rows(std::ostream& out, const Trajectory& traj) {
  for (const auto& s : traj.samples) {
    out << format_number(s.t) << ',' << format_number(s.x.x1) << ',' << format_number(s.x.x2)
        << ',' << format_optional(s.phi) << ',' << format_optional(s.phi_rate) << ','
        << format_optional(s.h_p) << ',' << format_number(s.div_f) << '\n';
  }
}

inline void write_polar_csv(std::ostream& out, const PolarTrajectory& traj) {
  out << "t,r,theta\n";
  for (const auto& s : traj.samples) {
    out << format_number(s.t) << ',' << format_number(s.r) << ',' << format_number(s.theta) << '\n';
  }
}

inline json trajectory_to_json(const Trajectory& traj) {
  json rows = json::array();
  for (const auto& s : traj.samples) {
    rows.push_back({s.t, s.x.x1, s.x.x2, detail::optional_to_json(s.phi),
                    detail::optional_to_json(s.phi_rate), detail::optional_to_json(s.h_p), s.div_f});
  }
  return {{"method", traj.method},
          {"dt", traj.dt},
          {"columns", {"t", "x1", "x2", "phi", "phi_rate", "h_p", "div_f"}},
          {"rows", std::move(rows)}};
}

inline json polar_trajectory_to_json(const PolarTrajectory& traj) {
  json rows = json::array();
  for (const auto& s : traj.samples) rows.push_back({s.t, s.r, s.theta});
  return {{"method", "rk4"}, {"dt", traj.dt}, {"columns", {"t", "r", "theta"}}, {"rows", rows}};
}

}  // namespace aodecomp
