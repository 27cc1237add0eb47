#include "surfquant/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "surfquant/builtins.hpp"
#include "surfquant/conversion.hpp"
#include "surfquant/operators.hpp"
#include "surfquant/quantization.hpp"
#include "surfquant/spectrum.hpp"

namespace surfquant::cli {

namespace {

using json = nlohmann::ordered_json;

const char* const kGrammar =
    "expression grammar: expr := term ((+|-) term)*, term := factor ((*|/) factor)*,\n"
    "  factor := atom (^ integer)* | -factor,\n"
    "  atom := number | x1..x8 | sin|cos|exp|log|sqrt '(' expr ')' | '(' expr ')'";

struct Tolerances {
  double algebra = 1e-9;
  double constraint = 1e-12;
  double closed = 1e-9;
  double drift = 1e-9;
};

struct RunConfig {
  std::string command;
  SurfaceSpec spec;
  double hbar = 1.0;
  std::string hbar_source = "default";
  std::string format = "json";
  std::uint64_t seed = 42;
  std::optional<int> points;
  int grid = 512;
  int levels = 9;
  bool along_curve = false;
  Tolerances tol;
};

struct Report {
  json rows = json::array();
  json summary = json::object();
  bool pass = true;
};

class UsageError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// ---------------------------------------------------------------- surfaces

const std::map<std::string, std::vector<std::string>>& allowed_params() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"sphere", {"n", "R"}},          {"sphere-distance", {"n", "R"}}, {"circle", {"R"}},
      {"ellipse", {"a", "b"}},         {"ellipsoid", {"a", "b", "c"}},  {"parabola", {"k"}},
      {"paraboloid", {"kappa"}},       {"torus", {"R", "r"}},           {"plane", {}},
      {"cylinder-distance", {"R"}},    {"custom", {}}};
  return table;
}

void check_params(const RunConfig& cfg) {
  const auto it = allowed_params().find(cfg.spec.name);
  if (it == allowed_params().end()) throw UsageError("unknown surface '" + cfg.spec.name + "'");
  const auto& ok = it->second;
  for (const auto& [key, value] : cfg.spec.params)
    if (std::find(ok.begin(), ok.end(), key) == ok.end())
      throw UsageError("parameter --" + key + " does not apply to surface '" + cfg.spec.name + "'");
  if (!cfg.spec.kappa.empty() && cfg.spec.name != "paraboloid")
    throw UsageError("parameter --kappa does not apply to surface '" + cfg.spec.name + "'");
}

// Reference point first, then seeded samples.
std::vector<SurfacePoint> point_list(const Builtin& b, const RunConfig& cfg, int fallback, std::mt19937_64& rng) {
  const int count = cfg.points.value_or(fallback);
  if (count < 1) throw UsageError("--points must be at least 1");
  std::vector<SurfacePoint> pts{SurfacePoint{b.reference, 0.0}};
  if (count > 1) {
    for (const SurfacePoint& p : sample_points(b, rng, count - 1)) pts.push_back(p);
  }
  return pts;
}

GaugeFamily family_at(const Builtin& b, const Vec& x) {
  Builtin moved = b;
  moved.reference = x;
  return gauge_family(moved);
}

bool is_sphere(const Builtin& b) { return b.sphere_radius.has_value(); }

// ---------------------------------------------------------------- commands

Report cmd_geometry(const Builtin& b, const RunConfig& cfg, std::mt19937_64& rng) {
  Report r;
  for (const SurfacePoint& p : point_list(b, cfg, 1, rng)) {
    const GeometryReport g = shape_and_curvatures(b.surface, p);
    json row;
    row["x"] = vec_json(g.x);
    row["normal"] = vec_json(g.normal);
    row["grad_norm"] = g.grad_norm;
    row["curvatures"] = vec_json(g.curvatures);
    row["div_n"] = g.div_n;
    row["distance_residual"] = g.distance.max();
    row["distance_like"] = g.distance.distance_like(1e-6);
    r.rows.push_back(row);
  }
  r.summary["points"] = r.rows.size();
  return r;
}

Report cmd_algebra(const Builtin& b, const RunConfig& cfg, std::mt19937_64& rng) {
  Report r;
  const int n = b.surface.dim();
  const bool sphere_ordering = is_sphere(b) && b.spec.name != "sphere-distance";
  double worst_algebra = 0.0, worst_constraint = 0.0;
  for (const SurfacePoint& p : point_list(b, cfg, 20, rng)) {
    AlgebraResidual alg;
    double jacobi = 0.0, ordering = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const AlgebraResidual a = dirac_algebra_residual(b.surface, i, j, p);
        alg.coordinate = std::max(alg.coordinate, a.coordinate);
        alg.momentum = std::max(alg.momentum, a.momentum);
        alg.symmetrized = std::max(alg.symmetrized, a.symmetrized);
        if (sphere_ordering && i < j)
          ordering = std::max(ordering, sphere_ordering_residual(b.surface, i, j, p.x).residual);
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) jacobi = std::max(jacobi, jacobi_residual(b.surface, i, j, k, p.x).residual);
    const double constraint = constraint_identity_residual(b.surface, p).residual;
    json row;
    row["x"] = vec_json(p.x);
    row["coordinate"] = alg.coordinate;
    row["momentum"] = alg.momentum;
    row["symmetrized"] = alg.symmetrized;
    row["jacobi"] = jacobi;
    row["sphere_ordering"] = sphere_ordering ? json(ordering) : json(nullptr);
    row["constraint"] = constraint;
    r.rows.push_back(row);
    worst_algebra = std::max({worst_algebra, alg.max(), jacobi, ordering});
    worst_constraint = std::max(worst_constraint, constraint);
  }
  r.pass = worst_algebra < cfg.tol.algebra && worst_constraint < cfg.tol.constraint;
  r.summary["points"] = r.rows.size();
  r.summary["max_algebra_residual"] = worst_algebra;
  r.summary["max_constraint_residual"] = worst_constraint;
  return r;
}

// V_q rows along a traced closed plane curve, for plotting.
Report potential_along_curve(const Builtin& b, const RunConfig& cfg) {
  if (b.surface.dim() != 2) throw UsageError("--along-curve needs a plane curve (dimension 2)");
  const int count = cfg.points.value_or(64);
  if (count < 2) throw UsageError("--points must be at least 2 with --along-curve");
  const CurveTrace trace = trace_curve(b.surface, SurfacePoint{b.reference, 0.0}, 1e-3);
  Report r;
  std::size_t v = 0;
  for (int j = 0; j < count; ++j) {
    const double target = trace.length * j / count;
    while (v + 1 < trace.arclength.size() && trace.arclength[v + 1] <= target) ++v;
    const SurfacePoint p{trace.vertices[v], 0.0};
    json row;
    row["s"] = trace.arclength[v];
    row["x"] = vec_json(p.x);
    row["curvature"] = trace.curvature[v];
    row["vq_gauge"] = quantum_potential_general(b.surface, p, cfg.hbar).value;
    row["vq_distance_form"] = quantum_potential_distance(b.surface, p, cfg.hbar);
    r.rows.push_back(row);
  }
  r.summary["length"] = trace.length;
  r.summary["points"] = r.rows.size();
  return r;
}

Report cmd_potential(const Builtin& b, const RunConfig& cfg, std::mt19937_64& rng) {
  if (cfg.along_curve) return potential_along_curve(b, cfg);
  Report r;
  bool ambiguous = false;
  double worst = 0.0;
  auto check = [&](json& row, double value, double expected) {
    const double err = std::abs(value - expected);
    row["expected"] = expected;
    row["error"] = err;
    const bool ok = close(value, expected, cfg.tol.closed);
    row["pass"] = ok;
    worst = std::max(worst, err);
    r.pass = r.pass && ok;
  };
  for (const SurfacePoint& p : point_list(b, cfg, 1, rng)) {
    const GaugeFamily fam = family_at(b, p.x);
    const AmbiguityReport amb = ambiguity_report(fam, p.x, cfg.hbar);
    const GeometryReport geo = shape_and_curvatures(b.surface, p);
    const std::vector<double> kappa(geo.curvatures.data(), geo.curvatures.data() + geo.curvatures.size());
    for (const PotentialReport& pr : amb.rows) {
      json row;
      row["x"] = vec_json(p.x);
      row["gauge"] = pr.gauge;
      row["method"] = to_string(pr.method);
      row["value"] = pr.value;
      if (pr.gauge == "tangent-paraboloid") {
        check(row, pr.value, quantum_potential_paraboloid(kappa, cfg.hbar));
        row["closed_form"] = to_string(PotentialMethod::paraboloid_closed_form);
      } else if (pr.gauge == "distance") {
        check(row, pr.value, quantum_potential_distance(b.surface, p, cfg.hbar));
        row["closed_form"] = to_string(PotentialMethod::distance_curvature_form);
      } else if (is_sphere(b)) {
        check(row, pr.value, quantum_potential_sphere(b.surface.dim(), *b.sphere_radius, cfg.hbar));
        row["closed_form"] = to_string(PotentialMethod::sphere_closed_form);
      } else if (b.spec.name == "paraboloid" && p.x.norm() == 0.0) {
        check(row, pr.value, quantum_potential_paraboloid(kappa, cfg.hbar));
        row["closed_form"] = to_string(PotentialMethod::paraboloid_closed_form);
      } else {
        row["expected"] = nullptr;
        row["error"] = nullptr;
        row["pass"] = nullptr;
        row["closed_form"] = nullptr;
      }
      r.rows.push_back(row);
    }
    ambiguous = ambiguous || amb.ambiguous;
  }
  r.summary["ambiguity"] = ambiguous ? "AMBIGUOUS" : "UNAMBIGUOUS";
  r.summary["max_closed_form_error"] = worst;
  return r;
}

Report cmd_ambiguity(const Builtin& b, const RunConfig& cfg, std::mt19937_64& rng) {
  Report r;
  bool ambiguous = false;
  for (const SurfacePoint& p : point_list(b, cfg, 1, rng)) {
    const AmbiguityReport amb = ambiguity_report(family_at(b, p.x), p.x, cfg.hbar);
    json row;
    row["x"] = vec_json(p.x);
    for (const PotentialReport& pr : amb.rows) row["vq_" + pr.gauge] = pr.value;
    row["recommended"] = amb.recommended;
    row["spread"] = amb.spread;
    row["flag"] = amb.ambiguous ? "AMBIGUOUS" : "UNAMBIGUOUS";
    r.rows.push_back(row);
    ambiguous = ambiguous || amb.ambiguous;
  }
  r.summary["ambiguity"] = ambiguous ? "AMBIGUOUS" : "UNAMBIGUOUS";
  r.summary["recommended_method"] = to_string(PotentialMethod::distance_curvature_form);
  return r;
}

Report cmd_drift(const Builtin& b, const RunConfig& cfg, std::mt19937_64& rng) {
  Report r;
  const bool parabola = b.spec.name == "parabola";
  const double k = parabola ? (b.spec.params.count("k") ? b.spec.params.at("k") : 1.0) : 0.0;
  double worst = 0.0;
  for (const SurfacePoint& p : point_list(b, cfg, 10, rng)) {
    const Vec d = drift_term(b.surface, p);
    const Vec nv = normal(b.surface, p.x).normal;
    const Vec dn = normal_jacobian(b.surface, p.x).transpose() * nv;
    const double res = (d + dn).cwiseAbs().maxCoeff();
    json row;
    row["x"] = vec_json(p.x);
    row["drift"] = vec_json(d);
    row["normal_flow_residual"] = res;
    worst = std::max(worst, res);
    bool ok = res < cfg.tol.drift;
    if (parabola) {
      const double q = 1.0 + k * k * p.x[0] * p.x[0];
      const double expected = -k * k * p.x[0] / (q * q);
      row["expected_x1"] = expected;
      row["error_x1"] = std::abs(d[0] - expected);
      worst = std::max(worst, std::abs(d[0] - expected));
      ok = ok && std::abs(d[0] - expected) < cfg.tol.drift;
    }
    row["pass"] = ok;
    r.pass = r.pass && ok;
    r.rows.push_back(row);
  }
  r.summary["max_residual"] = worst;
  return r;
}

Report cmd_spectrum(const Builtin& b, const RunConfig& cfg) {
  if (b.surface.dim() != 2) throw UsageError("spectrum needs a plane curve (dimension 2)");
  const SpectrumResult s =
      curve_spectrum(b.surface, SurfacePoint{b.reference, 0.0}, cfg.grid, cfg.levels, cfg.hbar);
  Report r;
  for (std::size_t i = 0; i < s.podolsky.size(); ++i) {
    json row;
    row["level"] = i;
    row["podolsky"] = s.podolsky[i];
    row["dirac"] = s.dirac[i];
    row["gap"] = s.gaps[i];
    row["multiplicity"] = s.multiplicity[i];
    if (is_sphere(b)) {
      const double m = static_cast<double>((i + 1) / 2);
      row["continuum"] = cfg.hbar * cfg.hbar * m * m / (2.0 * *b.sphere_radius * *b.sphere_radius);
    }
    r.rows.push_back(row);
  }
  r.summary["grid"] = s.grid;
  r.summary["length"] = s.length;
  r.summary["step"] = s.step;
  return r;
}

Report cmd_conversion(const Builtin& b, const RunConfig& cfg, std::mt19937_64& rng) {
  Report r;
  const int n = b.surface.dim();
  std::string text;
  for (int i = 1; i <= n; ++i) text += (i > 1 ? "+x" : "x") + std::to_string(i) + "^2";
  const Expr g = parse(text, n);
  std::optional<Verdict> overall;
  for (const SurfacePoint& p : point_list(b, cfg, 1, rng)) {
    const Proportionality q = proportionality_residual(b.surface, p);
    const ConversionDiagnosis d = c_system_analysis(b.surface, p);
    json row;
    row["x"] = vec_json(p.x);
    row["proportionality_factor"] = q.factor;
    row["proportionality_residual"] = q.residual;
    row["g_equation_residual"] = g_equation_residual(b.surface, g, p);
    row["unknowns"] = d.unknowns;
    row["rank"] = d.rank;
    row["verdict"] = to_string(d.verdict);
    if (n >= 2 && distance_gauge_residuals(b.surface, p).distance_like(1e-6)) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      Mat block(n - 1, n - 1);
      for (int a = 0; a < n - 1; ++a)
        for (int c = 0; c <= a; ++c) block(a, c) = block(c, a) = u(rng);
      const ReductionResidual red = distance_reduction_check(b.surface, p, best_axis(b.surface, p), block);
      row["reduction_mixed"] = red.mixed;
      row["reduction_normal"] = red.normal;
    } else {
      row["reduction_mixed"] = nullptr;
      row["reduction_normal"] = nullptr;
    }
    r.rows.push_back(row);
    overall = !overall || *overall == d.verdict ? d.verdict : Verdict::inconclusive;
  }
  r.summary["verdict"] = to_string(overall.value_or(Verdict::inconclusive));
  return r;
}

Report cmd_selftest(const RunConfig& cfg) {
  Report r;
  auto add = [&](const std::string& name, double value, double expected, double tol) {
    json row;
    row["check"] = name;
    row["value"] = value;
    row["expected"] = expected;
    row["error"] = std::abs(value - expected);
    const bool ok = close(value, expected, tol);
    row["pass"] = ok;
    r.pass = r.pass && ok;
    r.rows.push_back(row);
  };
  const double h2 = cfg.hbar * cfg.hbar;
  auto make = [](const std::string& name, std::map<std::string, double> params = {}) {
    SurfaceSpec s;
    s.name = name;
    s.params = std::move(params);
    return make_surface(s);
  };

  const Builtin sphere = make("sphere");
  const SurfacePoint pole{sphere.reference, 0.0};
  const AmbiguityReport amb = ambiguity_report(gauge_family(sphere), sphere.reference, cfg.hbar);
  add("sphere quadratic gauge", amb.rows.front().value, 0.5 * h2, cfg.tol.closed);
  add("sphere tangent paraboloid gauge", amb.rows.back().value, 1.0 * h2, cfg.tol.closed);

  SurfaceSpec pspec;
  pspec.name = "paraboloid";
  pspec.kappa = {1.0, 2.0};
  const Builtin parab = make_surface(pspec);
  add("paraboloid vertex", quantum_potential_general(parab.surface, {parab.reference, 0.0}, cfg.hbar).value,
      quantum_potential_paraboloid(pspec.kappa, cfg.hbar), cfg.tol.closed);

  const Builtin sd = make("sphere-distance");
  add("distance gauge", quantum_potential_general(sd.surface, {sd.reference, 0.0}, cfg.hbar).value,
      quantum_potential_distance(sd.surface, {sd.reference, 0.0}, cfg.hbar), cfg.tol.closed);
  add("harmonic l=1", lb_apply(sd.surface, parse("x3", 3), {sd.reference, 0.0}).value, -2.0, cfg.tol.closed);

  const Builtin parabola = make("parabola");
  add("parabola drift", drift_term(parabola.surface, {parabola.reference, 0.0})[0], -0.25, cfg.tol.drift);

  const Builtin ell = make("ellipsoid");
  std::mt19937_64 rng(cfg.seed);
  const SurfacePoint q = sample_points(ell, rng, 1).front();
  add("ellipsoid algebra", dirac_algebra_residual(ell.surface, 0, 1, q).max(), 0.0, cfg.tol.algebra);

  const Builtin circle = make("circle");
  const SpectrumResult spec = curve_spectrum(circle.surface, {circle.reference, 0.0}, 64, 3, cfg.hbar);
  add("circle gap", spec.gaps[1], h2 / 8.0, cfg.tol.closed);

  add("sphere conversion solvable", c_system_analysis(sphere.surface, pole).verdict == Verdict::solvable, 1.0, 0.0);
  add("parabola conversion obstructed",
      c_system_analysis(parabola.surface, {parabola.reference, 0.0}).verdict == Verdict::obstructed, 1.0, 0.0);
  r.summary["checks"] = r.rows.size();
  return r;
}

// ---------------------------------------------------------------- output

std::string format_number(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string scalar_text(const json& v, int digits) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>(), digits);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Row objects flattened to (column, cell); arrays become key_1, key_2, ...
std::vector<std::pair<std::string, std::string>> flatten(const json& row, int digits) {
  std::vector<std::pair<std::string, std::string>> cells;
  for (auto it = row.begin(); it != row.end(); ++it) {
    if (it.value().is_array()) {
      for (std::size_t i = 0; i < it.value().size(); ++i)
        cells.emplace_back(it.key() + "_" + std::to_string(i + 1), scalar_text(it.value()[i], digits));
    } else {
      cells.emplace_back(it.key(), scalar_text(it.value(), digits));
    }
  }
  return cells;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::map<std::string, std::string>> rows;
};

Table tabulate(const json& rows, int digits) {
  Table t;
  for (const json& row : rows) {
    std::map<std::string, std::string> cells;
    for (auto& [key, cell] : flatten(row, digits)) {
      if (std::find(t.columns.begin(), t.columns.end(), key) == t.columns.end()) t.columns.push_back(key);
      cells[key] = cell;
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_csv(const json& rows, std::ostream& out) {
  const Table t = tabulate(rows, 17);
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_cell(t.columns[c]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto it = row.find(t.columns[c]);
      out << (c ? "," : "") << csv_cell(it == row.end() ? "" : it->second);
    }
    out << "\n";
  }
}

void write_text(const json& doc, std::ostream& out) {
  const json& surface = doc["surface"];
  out << doc["command"].get<std::string>() << " on " << surface["name"].get<std::string>() << " (dim "
      << surface["dim"].get<int>() << "): f = " << surface["expression"].get<std::string>() << "\n";
  out << "hbar = " << format_number(doc["hbar"].get<double>(), 10) << ", seed = " << doc["seed"].get<std::uint64_t>()
      << "\n\n";
  const Table t = tabulate(doc["rows"], 10);
  std::vector<std::size_t> width;
  for (const std::string& c : t.columns) {
    std::size_t w = c.size();
    for (const auto& row : t.rows) {
      const auto it = row.find(c);
      if (it != row.end()) w = std::max(w, it->second.size());
    }
    width.push_back(w);
  }
  auto line = [&](const std::function<std::string(std::size_t)>& cell) {
    std::string s;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      std::string v = cell(c);
      s += (c ? "  " : "") + std::string(width[c] - v.size(), ' ') + v;
    }
    out << s << "\n";
  };
  line([&](std::size_t c) { return t.columns[c]; });
  for (const auto& row : t.rows)
    line([&](std::size_t c) {
      const auto it = row.find(t.columns[c]);
      return it == row.end() ? std::string() : it->second;
    });
  out << "\n";
  for (auto it = doc["summary"].begin(); it != doc["summary"].end(); ++it)
    out << it.key() << ": " << scalar_text(it.value(), 10) << "\n";
}

json header(const RunConfig& cfg, const Builtin* b) {
  json h;
  h["schema"] = 1;
  h["command"] = cfg.command;
  json s;
  if (b) {
    s["name"] = b->spec.name;
    s["dim"] = b->surface.dim();
    s["expression"] = b->surface.f().to_string();
    json params = json::object();
    for (const auto& [k, v] : b->spec.params) params[k] = v;
    if (!b->spec.kappa.empty()) params["kappa"] = b->spec.kappa;
    s["params"] = params;
    s["reference"] = vec_json(b->reference);
  } else {
    s["name"] = "builtin-suite";
    s["dim"] = 0;
    s["expression"] = "";
  }
  h["surface"] = s;
  h["hbar"] = cfg.hbar;
  h["hbar_source"] = cfg.hbar_source;
  h["seed"] = cfg.seed;
  h["tolerances"] = {{"algebra", cfg.tol.algebra},
                     {"constraint", cfg.tol.constraint},
                     {"closed_form", cfg.tol.closed},
                     {"drift", cfg.tol.drift}};
  return h;
}

// ---------------------------------------------------------------- parsing

void resolve_hbar(RunConfig& cfg, const std::optional<double>& flag) {
  if (flag) {
    cfg.hbar = *flag;
    cfg.hbar_source = "flag";
  } else if (const char* env = std::getenv("SURFQUANT_HBAR"); env && *env) {
    char* end = nullptr;
    cfg.hbar = std::strtod(env, &end);
    if (end == env || *end != '\0') throw UsageError(std::string("SURFQUANT_HBAR is not a number: '") + env + "'");
    cfg.hbar_source = "environment";
  }
  if (!(std::isfinite(cfg.hbar) && cfg.hbar > 0.0)) throw UsageError("hbar must be positive");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum mechanics on implicit surfaces: geometry, operator algebra and quantum potentials",
               "surfquant"};
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig cfg;
  std::string surface = "sphere";
  std::optional<double> n, big_r, small_r, a, bb, c, k, hbar;
  std::optional<int> dim;
  std::optional<std::string> f;
  std::vector<double> kappa, point;

  app.add_option("--surface", surface, "builtin surface name")->capture_default_str();
  app.add_option("--n", n, "ambient dimension of a sphere");
  app.add_option("--R", big_r, "radius (sphere, circle, cylinder) or major radius (torus)");
  app.add_option("--r", small_r, "minor radius of the torus");
  app.add_option("--a", a, "semi-axis a");
  app.add_option("--b", bb, "semi-axis b");
  app.add_option("--c", c, "semi-axis c");
  app.add_option("--k", k, "parabola curvature at the vertex");
  app.add_option("--kappa", kappa, "paraboloid principal curvatures")->delimiter(',');
  app.add_option("--f", f, "custom gauge function, e.g. \"x1^2+x2^2-1\"");
  app.add_option("--dim", dim, "dimension of the custom gauge");
  app.add_option("--point", point, "start point, projected onto the surface")->delimiter(',');
  app.add_option("--hbar", hbar, "reduced Planck constant (overrides SURFQUANT_HBAR)");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed of the point sampler")->capture_default_str();
  app.add_option("--points", cfg.points, "number of points (reference point first)");
  app.add_option("--grid", cfg.grid, "grid size for spectrum")->capture_default_str();
  app.add_option("--levels", cfg.levels, "number of levels for spectrum")->capture_default_str();
  app.add_flag("--along-curve", cfg.along_curve, "potential: sample V_q along a traced plane curve");
  app.add_option("--tol-algebra", cfg.tol.algebra, "commutator residual tolerance")->capture_default_str();
  app.add_option("--tol-constraint", cfg.tol.constraint, "constraint identity tolerance")->capture_default_str();
  app.add_option("--tol-closed", cfg.tol.closed, "closed-form comparison tolerance")->capture_default_str();
  app.add_option("--tol-drift", cfg.tol.drift, "drift comparison tolerance")->capture_default_str();

  const std::vector<std::pair<std::string, std::string>> commands{
      {"geometry", "normal, shape operator and principal curvatures"},
      {"algebra-check", "commutator algebra of the projected momenta"},
      {"potential", "quantum potential per gauge with closed-form checks"},
      {"ambiguity", "gauge dependence of the quantum potential"},
      {"drift", "first-order drift of the normal-splitting Laplacian"},
      {"spectrum", "Podolsky and Dirac levels on a closed plane curve"},
      {"conversion", "pointwise solvability of the abelian conversion"},
      {"selftest", "built-in battery of reference checks"}};
  for (const auto& [name, help] : commands)
    app.add_subcommand(name, help)->callback([&cfg, name = name] { cfg.command = name; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  Report report;
  json doc;
  try {
    resolve_hbar(cfg, hbar);
    if (cfg.command != "selftest") {
      SurfaceSpec& spec = cfg.spec;
      if (f) {
        if (app.count("--surface")) throw UsageError("use either --surface or --f, not both");
        if (!dim) throw UsageError("--f needs --dim");
        spec.name = "custom";
        spec.expression = *f;
        spec.dim = *dim;
      } else {
        spec.name = surface;
        if (dim) throw UsageError("--dim only applies to --f");
      }
      const std::pair<const char*, const std::optional<double>*> named[] = {
          {"n", &n}, {"R", &big_r}, {"r", &small_r}, {"a", &a}, {"b", &bb}, {"c", &c}, {"k", &k}};
      for (const auto& [key, value] : named)
        if (*value) spec.params[key] = **value;
      spec.kappa = kappa;
      spec.point = point;
      check_params(cfg);
    }

    if (cfg.command == "selftest") {
      report = cmd_selftest(cfg);
      doc = header(cfg, nullptr);
    } else {
      const Builtin b = make_surface(cfg.spec);
      doc = header(cfg, &b);
      std::mt19937_64 rng(cfg.seed);
      if (cfg.command == "geometry") report = cmd_geometry(b, cfg, rng);
      else if (cfg.command == "algebra-check") report = cmd_algebra(b, cfg, rng);
      else if (cfg.command == "potential") report = cmd_potential(b, cfg, rng);
      else if (cfg.command == "ambiguity") report = cmd_ambiguity(b, cfg, rng);
      else if (cfg.command == "drift") report = cmd_drift(b, cfg, rng);
      else if (cfg.command == "spectrum") report = cmd_spectrum(b, cfg);
      else report = cmd_conversion(b, cfg, rng);
    }
  } catch (const ParseError& e) {
    err << "error: " << e.diagnostic().to_string() << "\n" << kGrammar << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\nrun 'surfquant --help' for usage\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }

  report.summary["status"] = report.pass ? "pass" : "fail";
  doc["rows"] = report.rows;
  doc["summary"] = report.summary;
  if (cfg.format == "json")
    out << doc.dump(2) << "\n";
  else if (cfg.format == "csv")
    write_csv(doc["rows"], out);
  else
    write_text(doc, out);
  if (!report.pass) err << "check failed: see the rows with pass = false\n";
  return report.pass ? kExitPass : kExitCheckFailed;
}

}  // namespace surfquant::cli
