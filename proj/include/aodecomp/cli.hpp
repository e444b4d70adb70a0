#pragma once

// Command-line front end. `run_cli` is the whole program; tools/aodecomp.cpp
// only forwards argv and the standard streams.
//
// Exit codes: 0 success, 1 usage or input error, 2 inconsistent
// decomposition request, 3 numerical blow-up.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aodecomp/catalog.hpp"
#include "aodecomp/dissipation.hpp"
#include "aodecomp/dynamics.hpp"
#include "aodecomp/field.hpp"
#include "aodecomp/io.hpp"
#include "aodecomp/linear.hpp"

namespace aodecomp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInconsistent = 2;
inline constexpr int kExitBlowUp = 3;

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Parses "v1,v2,...,vn" into exactly n finite doubles.
inline std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() ||
        !std::isfinite(v)) {
      throw UsageError(flag + ": cannot parse '" + item + "' as a number");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  if (out.size() != n) {
    throw UsageError(flag + ": expected " + std::to_string(n) + " comma-separated values, got " +
                     std::to_string(out.size()));
  }
  return out;
}

inline Point2 parse_point(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, 2, flag);
  return {v[0], v[1]};
}

enum class Quantity { Potential, VectorField, Divergence, DissipationPower, PhiRate, CriteriaAgreement };

inline Quantity parse_quantity(const std::string& s) {
  if (s == "potential") return Quantity::Potential;
  if (s == "vector_field") return Quantity::VectorField;
  if (s == "divergence") return Quantity::Divergence;
  if (s == "dissipation_power") return Quantity::DissipationPower;
  if (s == "phi_rate") return Quantity::PhiRate;
  if (s == "criteria_agreement") return Quantity::CriteriaAgreement;
  throw UsageError("--quantity: unknown quantity '" + s + "'");
}

struct GridRequest {
  double xmin, xmax, ymin, ymax;
  int nx, ny;
  Quantity quantity = Quantity::Potential;

  Point2 point(int i, int j) const {
    return {xmin + (xmax - xmin) * i / (nx - 1), ymin + (ymax - ymin) * j / (ny - 1)};
  }
};

inline GridRequest parse_grid(const std::string& text) {
  const auto v = parse_list(text, 6, "--grid");
  GridRequest g{v[0], v[1], v[2], v[3], 0, 0};
  if (!(g.xmin < g.xmax) || !(g.ymin < g.ymax)) {
    throw UsageError("--grid: bounds must satisfy xmin < xmax and ymin < ymax");
  }
  if (v[4] != std::floor(v[4]) || v[5] != std::floor(v[5]) || v[4] < 2 || v[5] < 2 ||
      v[4] > 1e6 || v[5] > 1e6) {
    throw UsageError("--grid: nx and ny must be integers >= 2");
  }
  g.nx = static_cast<int>(v[4]);
  g.ny = static_cast<int>(v[5]);
  return g;
}

namespace detail {

struct Options {
  std::string system;
  std::string matrix;
  std::string diffusion;
  std::optional<double> q;
  std::vector<std::string> at;
  std::string x0;
  double dt = 1e-3;
  std::optional<double> t_end;
  bool polar = false;
  std::string grid;
  std::string quantity;
  std::string format;
  std::string out;
  bool divergence_only = false;
};

inline SystemSpec resolve_system(const Options& o) {
  if (!o.system.empty() && !o.matrix.empty()) throw UsageError("give either --system or --matrix, not both");
  if (!o.system.empty()) {
    if (!o.diffusion.empty() || o.q) throw UsageError("--d and --q apply to --matrix only");
    try {
      return catalog::get(o.system).spec;
    } catch (const UnknownSystem& e) {
      throw UsageError(e.what());
    }
  }
  if (o.matrix.empty()) throw UsageError("one of --system or --matrix is required");
  const auto a = parse_list(o.matrix, 4, "--matrix");
  LinearSystem lin{Matrix2{a[0], a[1], a[2], a[3]}, std::nullopt, o.q};
  if (!o.diffusion.empty()) {
    const auto d = parse_list(o.diffusion, 3, "--d");
    try {
      lin.diffusion = DiffusionParams(d[0], d[1], d[2]);
    } catch (const InvalidDiffusion& e) {
      throw UsageError(std::string("--d: ") + e.what());
    }
  }
  return SystemSpec{"matrix", lin};
}

/// Output sink: the --out file when given, else stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError("--out: cannot open '" + path + "' for writing");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline std::string format_or(const Options& o, const std::string& dflt) {
  const std::string f = o.format.empty() ? dflt : o.format;
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  return f;
}

inline void emit_json(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

// --------------------------------------------------------------------------
// decompose
// --------------------------------------------------------------------------

inline json linear_residuals(const LinearDecomposition& dec) {
  const Matrix2 id = Matrix2::identity();
  double drift = 0.0;
  double frame = 0.0;
  for (const Point2 x : {Point2{1.0, 0.0}, Point2{0.0, 1.0}, Point2{1.0, 1.0}}) {
    drift = std::max(drift, (reconstruct_drift(dec, x) - dec.a * x).norm());
    frame = std::max(frame, (dec.s_plus_t() * (dec.a * x) + dec.u * x).norm());
  }
  return {{"lyapunov", lyapunov_equation_residual(dec.a, dec.d, dec.q)},
          {"inverse", max_abs_diff(dec.s_plus_t() * dec.d_plus_q(), id)},
          {"u_symmetry", max_abs_diff(dec.u, dec.u.transpose())},
          {"drift", drift},
          {"frame", frame}};
}

inline json point_residuals(const PointDecomposition& p) {
  json r{{"frame", (p.s_plus_t() * p.f_val + p.grad_phi).norm()}};
  if (p.d && p.q) {
    const Matrix2 dq = *p.d * Matrix2::identity() + *p.q * Matrix2::rotation_generator();
    r["inverse_frame"] = (-(dq * p.grad_phi) - p.f_val).norm();
  } else {
    r["inverse_frame"] = nullptr;
  }
  return r;
}

inline int cmd_decompose(const Options& o, std::ostream& out, std::ostream& err,
                         const Tolerances& tol) {
  if (format_or(o, "json") != "json") throw UsageError("decompose emits JSON only");
  if (o.at.size() > 1) throw UsageError("decompose takes at most one --at");
  const SystemSpec sys = resolve_system(o);
  std::optional<Point2> at;
  if (!o.at.empty()) at = parse_point(o.at.front(), "--at");

  json doc{{"system", sys.name}};
  if (const auto* lin = sys.linear()) {
    doc["kind"] = "linear";
    doc["A"] = lin->a;
    doc["spectral_class"] = spectral_class_to_json(classify_spectrum(lin->a, tol));
    const DiffusionParams d = lin->diffusion.value_or(DiffusionParams::identity());
    const QSolution branch = solve_gyration(lin->a, d, tol);
    doc["q_solution"] = q_solution_to_json(branch);
    if (std::holds_alternative<InconsistentQ>(branch) && !lin->gyration) {
      const std::string constraint = gyration_constraint_note(lin->a, tol);
      doc["error"] = {{"kind", "Inconsistent"}, {"constraint", constraint}};
      Sink sink(o.out, out);
      emit_json(sink.stream(), doc);
      err << "decompose: trace(A) = 0 and the gyration constraint cannot hold for D = ("
          << format_number(d.d11()) << ", " << format_number(d.d12()) << ", "
          << format_number(d.d22()) << "); residual "
          << format_number(std::get<InconsistentQ>(branch).residual)
          << ". Re-choose D so that: " << constraint << "\n";
      return kExitInconsistent;
    }
    LinearConstruction built;
    try {
      built = construct_linear(*lin, tol);
    } catch (const AsymmetricU& e) {
      doc["error"] = {{"kind", "AsymmetricU"}, {"U", e.u()}, {"gap", e.gap()}};
      Sink sink(o.out, out);
      emit_json(sink.stream(), doc);
      err << "decompose: " << e.what() << "\n";
      return kExitInconsistent;
    }
    doc["decomposition"] = linear_decomposition_to_json(built.decomposition);
    doc["residuals"] = linear_residuals(built.decomposition);
  } else {
    doc["kind"] = "analytic";
    if (!sys.analytic()->potential) throw UsageError("system '" + sys.name + "' has no potential");
  }

  if (at) {
    try {
      const PointDecomposition p = point_decomposition(sys, *at, tol);
      doc["point"] = p;
      doc["point_residuals"] = point_residuals(p);
    } catch (const EquilibriumPoint& e) {
      if (!sys.is_linear()) throw UsageError(e.what());
      doc["point"] = nullptr;
      doc["point_error"] = e.what();
    }
  } else if (!sys.is_linear()) {
    throw UsageError("decompose of a nonlinear system needs --at x1,x2");
  }

  Sink sink(o.out, out);
  emit_json(sink.stream(), doc);
  return kExitOk;
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err,
                        const Tolerances& tol) {
  const std::string fmt = format_or(o, "csv");
  if (o.x0.empty()) throw UsageError("simulate needs --x0 x1,x2");
  if (!o.t_end) throw UsageError("simulate needs --t-end");
  const Point2 x0 = parse_point(o.x0, "--x0");
  try {
    step_count(o.dt, *o.t_end);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SystemSpec sys = resolve_system(o);

  if (o.polar) {
    if (sys.name != "hopf_limit_cycle") throw UsageError("--polar is only defined for hopf_limit_cycle");
    if (!(x0.norm() > 0.0)) throw UsageError("--polar needs a nonzero --x0");
    const PolarTrajectory traj = integrate_polar(x0.norm(), std::atan2(x0.x2, x0.x1), o.dt, *o.t_end);
    Sink sink(o.out, out);
    if (fmt == "csv") {
      write_polar_csv(sink.stream(), traj);
    } else {
      emit_json(sink.stream(), polar_trajectory_to_json(traj));
    }
    return kExitOk;
  }

  const ResolvedSystem resolved(sys, tol);
  Sink sink(o.out, out);
  try {
    const Trajectory traj = integrate(resolved, x0, o.dt, *o.t_end);
    if (fmt == "csv") {
      write_trajectory_header(sink.stream());
      write_trajectory_rows(sink.stream(), traj);
    } else {
      emit_json(sink.stream(), trajectory_to_json(traj));
    }
    return kExitOk;
  } catch (const TrajectoryBlowUp& e) {
    if (fmt == "csv") {
      write_trajectory_header(sink.stream());
      write_trajectory_rows(sink.stream(), e.partial());
      sink.stream() << "# truncated at t=" << format_number(e.time()) << ": state exceeded "
                    << format_number(tol.blowup) << "\n";
    } else {
      json doc = trajectory_to_json(e.partial());
      doc["truncated_at"] = e.time();
      emit_json(sink.stream(), doc);
    }
    err << "simulate: " << e.what() << "\n";
    return kExitBlowUp;
  }
}

// --------------------------------------------------------------------------
// report
// --------------------------------------------------------------------------

inline std::vector<Point2> report_points(const Options& o) {
  std::vector<Point2> pts;
  for (const auto& a : o.at) pts.push_back(parse_point(a, "--at"));
  if (!o.grid.empty()) {
    const GridRequest g = parse_grid(o.grid);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) pts.push_back(g.point(i, j));
    }
  }
  if (pts.empty()) throw UsageError("report needs --at x1,x2 (repeatable) or --grid");
  return pts;
}

inline int cmd_report(const Options& o, std::ostream& out, std::ostream& err, const Tolerances& tol) {
  const std::string fmt = format_or(o, "json");
  const SystemSpec sys = resolve_system(o);
  const std::vector<Point2> pts = report_points(o);
  const ResolvedSystem resolved(sys, tol);
  if (!o.divergence_only && !resolved.has_potential()) {
    if (const auto* lin = sys.linear()) {
      const DiffusionParams d = lin->diffusion.value_or(DiffusionParams::identity());
      err << "report: no decomposition exists for this matrix and D; required: "
          << gyration_constraint_note(lin->a, tol) << " (residual "
          << format_number(gyration_rhs(lin->a, d)) << ")\n";
      return kExitInconsistent;
    }
    throw UsageError("system '" + sys.name +
                     "' has no potential; H_P and dphi/dt need one (use --divergence-only)");
  }

  std::vector<DissipationReport> rows;
  rows.reserve(pts.size());
  std::size_t disagreements = 0;
  for (const Point2& x : pts) {
    rows.push_back(o.divergence_only ? divergence_report(resolved, x) : report(resolved, x));
    if (rows.back().agree && !*rows.back().agree) ++disagreements;
  }

  Sink sink(o.out, out);
  if (fmt == "json") {
    json doc{{"system", sys.name},
             {"tolerance", tol.zero_verdict},
             {"points", rows},
             {"summary",
              {{"points", rows.size()},
               {"disagreements", o.divergence_only ? json(nullptr) : json(disagreements)}}}};
    emit_json(sink.stream(), doc);
  } else {
    auto& s = sink.stream();
    s << "x1,x2,h_p,div_f,phi_rate,identity_gap,verdict_power,verdict_divergence,agree\n";
    for (const auto& r : rows) {
      s << format_number(r.at.x1) << ',' << format_number(r.at.x2) << ',' << format_optional(r.h_p)
        << ',' << format_number(r.div_f) << ',' << format_optional(r.phi_rate) << ','
        << format_optional(r.identity_gap) << ','
        << (r.verdict_power ? to_string(*r.verdict_power) : "") << ','
        << to_string(r.verdict_divergence) << ','
        << (r.agree ? (*r.agree ? "true" : "false") : "") << '\n';
    }
    s << "# summary: points=" << rows.size();
    if (!o.divergence_only) s << ", disagreements=" << disagreements;
    s << '\n';
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// grid
// --------------------------------------------------------------------------

inline int cmd_grid(const Options& o, std::ostream& out, std::ostream& err, const Tolerances& tol) {
  const std::string fmt = format_or(o, "csv");
  if (o.grid.empty()) throw UsageError("grid needs --grid xmin,xmax,ymin,ymax,nx,ny");
  if (o.quantity.empty()) throw UsageError("grid needs --quantity");
  GridRequest g = parse_grid(o.grid);
  g.quantity = parse_quantity(o.quantity);
  const SystemSpec sys = resolve_system(o);
  const ResolvedSystem resolved(sys, tol);
  const bool needs_potential = g.quantity != Quantity::VectorField && g.quantity != Quantity::Divergence;
  if (needs_potential && !resolved.has_potential()) {
    if (const auto* lin = sys.linear()) {
      err << "grid: no decomposition exists for this matrix and D; required: "
          << gyration_constraint_note(lin->a, tol) << "\n";
      return kExitInconsistent;
    }
    throw UsageError("quantity '" + o.quantity + "' needs a potential; system '" + sys.name +
                     "' has none");
  }

  const bool vec = g.quantity == Quantity::VectorField;
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Point2 x = g.point(i, j);
      switch (g.quantity) {
        case Quantity::Potential: rows.push_back({x.x1, x.x2, resolved.phi(x)}); break;
        case Quantity::VectorField: {
          const Point2 f = resolved.drift(x);
          rows.push_back({x.x1, x.x2, f.x1, f.x2});
          break;
        }
        case Quantity::Divergence: rows.push_back({x.x1, x.x2, resolved.divergence(x)}); break;
        case Quantity::DissipationPower: rows.push_back({x.x1, x.x2, resolved.dissipation_power(x)}); break;
        case Quantity::PhiRate: rows.push_back({x.x1, x.x2, resolved.phi_rate(x)}); break;
        case Quantity::CriteriaAgreement:
          rows.push_back({x.x1, x.x2, *report(resolved, x).agree ? 1.0 : 0.0});
          break;
      }
    }
  }

  Sink sink(o.out, out);
  const std::vector<std::string> cols =
      vec ? std::vector<std::string>{"x1", "x2", "f1", "f2"} : std::vector<std::string>{"x1", "x2", "value"};
  if (fmt == "csv") {
    auto& s = sink.stream();
    for (std::size_t c = 0; c < cols.size(); ++c) s << (c ? "," : "") << cols[c];
    s << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) s << (c ? "," : "") << format_number(r[c]);
      s << '\n';
    }
  } else {
    emit_json(sink.stream(), json{{"system", sys.name},
                                  {"quantity", o.quantity},
                                  {"nx", g.nx},
                                  {"ny", g.ny},
                                  {"columns", cols},
                                  {"rows", rows}});
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// catalog
// --------------------------------------------------------------------------

inline int cmd_catalog(const Options& o, std::ostream& out, std::ostream&, const Tolerances&) {
  const std::string fmt = format_or(o, "json");
  Sink sink(o.out, out);
  if (fmt == "json") {
    json arr = json::array();
    for (const auto& name : catalog::list()) {
      const CatalogEntry& e = catalog::get(name);
      arr.push_back({{"name", e.name},
                     {"kind", e.spec.is_linear() ? "linear" : "analytic"},
                     {"has_potential", has_potential(e.spec)},
                     {"provenance", e.provenance}});
    }
    emit_json(sink.stream(), arr);
  } else {
    sink.stream() << "name,kind,has_potential,provenance\n";
    for (const auto& name : catalog::list()) {
      const CatalogEntry& e = catalog::get(name);
      sink.stream() << e.name << ',' << (e.spec.is_linear() ? "linear" : "analytic") << ','
                    << (has_potential(e.spec) ? "true" : "false") << ',' << csv_quote(e.provenance)
                    << '\n';
    }
  }
  return kExitOk;
}

}  // namespace detail

/// Runs the tool with the given arguments (args[0] is the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar friction/transverse/potential decomposition toolkit", "aodecomp"};
  app.require_subcommand(1);
  detail::Options o;

  auto add_system = [&o](CLI::App* sub) {
    sub->add_option("--system", o.system, "catalog system name");
    sub->add_option("--matrix", o.matrix, "a11,a12,a21,a22 (row-major)");
    sub->add_option("--d", o.diffusion, "d11,d12,d22 (default 1,0,1)");
    sub->add_option("--q", o.q, "gyration scalar q (default: solved)");
  };
  auto add_output = [&o](CLI::App* sub) {
    sub->add_option("--format", o.format, "json|csv");
    sub->add_option("--out", o.out, "output path (default stdout)");
  };

  CLI::App* decompose = app.add_subcommand("decompose", "decompose a linear or catalog system");
  add_system(decompose);
  add_output(decompose);
  decompose->add_option("--at", o.at, "x1,x2 for the pointwise decomposition");

  CLI::App* simulate = app.add_subcommand("simulate", "integrate a trajectory (RK4)");
  add_system(simulate);
  add_output(simulate);
  simulate->add_option("--x0", o.x0, "initial state x1,x2");
  simulate->add_option("--dt", o.dt, "step (default 1e-3)");
  simulate->add_option("--t-end", o.t_end, "final time");
  simulate->add_flag("--polar", o.polar, "integrate the polar form (hopf_limit_cycle)");

  CLI::App* rep = app.add_subcommand("report", "pointwise dissipation criteria");
  add_system(rep);
  add_output(rep);
  rep->add_option("--at", o.at, "x1,x2 (repeatable)");
  rep->add_option("--grid", o.grid, "xmin,xmax,ymin,ymax,nx,ny");
  rep->add_flag("--divergence-only", o.divergence_only, "skip H_P and dphi/dt");

  CLI::App* grid = app.add_subcommand("grid", "sample a quantity on a grid");
  add_system(grid);
  add_output(grid);
  grid->add_option("--grid", o.grid, "xmin,xmax,ymin,ymax,nx,ny");
  grid->add_option("--quantity", o.quantity,
                   "potential|vector_field|divergence|dissipation_power|phi_rate|criteria_agreement");

  CLI::App* cat = app.add_subcommand("catalog", "list builtin systems");
  add_output(cat);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "aodecomp: " << e.what() << "\n";
    return kExitUsage;
  }

  Tolerances tol;
  apply_env_override(tol);

  try {
    if (decompose->parsed()) return detail::cmd_decompose(o, out, err, tol);
    if (simulate->parsed()) return detail::cmd_simulate(o, out, err, tol);
    if (rep->parsed()) return detail::cmd_report(o, out, err, tol);
    if (grid->parsed()) return detail::cmd_grid(o, out, err, tol);
    if (cat->parsed()) return detail::cmd_catalog(o, out, err, tol);
  } catch (const InconsistentGyration& e) {
    err << "aodecomp: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const UsageError& e) {
    err << "aodecomp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "aodecomp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "aodecomp: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace aodecomp::cli
