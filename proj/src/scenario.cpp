#include "hma/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hma {

using nlohmann::json;

namespace {

std::string at(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(at(path, key), "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long>();
}

template <class T, class Fn>
void optional_field(const json& j, const std::string& path, const char* key, T& out, Fn&& conv) {
  if (j.contains(key)) out = static_cast<T>(conv(j.at(key), at(path, key)));
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

std::vector<int> wavevector_of(const json& j, const std::string& path, const std::vector<int>& sizes) {
  if (!j.is_array() || j.size() != sizes.size()) {
    throw ConfigError(path, "expected " + std::to_string(sizes.size()) + " integer wavenumbers");
  }
  std::vector<int> k;
  for (std::size_t a = 0; a < j.size(); ++a) {
    const long v = integer(j[a], at(path, a));
    if (2 * std::labs(v) >= sizes[a]) {
      throw ConfigError(at(path, a), "wavenumber " + std::to_string(v) + " is not below the Nyquist limit " +
                                         std::to_string(sizes[a] / 2));
    }
    k.push_back(static_cast<int>(v));
  }
  return k;
}

std::vector<TrigMode> modes_of(const json& j, const std::string& path, const std::vector<int>& sizes) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of modes");
  std::vector<TrigMode> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = at(path, i);
    only_keys(j[i], p, {"k", "cos", "sin"});
    if (!j[i].contains("k")) throw ConfigError(at(p, "k"), "missing");
    TrigMode m;
    m.k = wavevector_of(j[i]["k"], at(p, "k"), sizes);
    optional_field(j[i], p, "cos", m.c, number);
    optional_field(j[i], p, "sin", m.s, number);
    out.push_back(std::move(m));
  }
  return out;
}

cplx entry_of(const json& j, const std::string& path) {
  if (j.is_number()) return number(j, path);
  if (j.is_array() && j.size() == 2) return {number(j[0], at(path, 0)), number(j[1], at(path, 1))};
  throw ConfigError(path, "expected a number or a [re, im] pair");
}

HMat matrix_of(const json& j, const std::string& path, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw ConfigError(path, "expected an n x n matrix");
  HMat a(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) throw ConfigError(at(path, r), "expected a row of n entries");
    for (int c = 0; c < n; ++c) a(r, c) = entry_of(row[static_cast<std::size_t>(c)], at(at(path, r), c));
  }
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-14) throw ConfigError(path, "matrix is not Hermitian");
  return a;
}

MetricSpec metric_of(const json& j, int n, const std::vector<int>& sizes) {
  const std::string path = "metric";
  if (!j.is_object() || !j.contains("family")) throw ConfigError(at(path, "family"), "missing");
  const std::string fam = j["family"].is_string() ? j["family"].get<std::string>() : "";
  MetricSpec m;
  m.base = identity_matrix(n);
  if (fam == "flat_kahler") {
    m.family = MetricFamily::flat_kahler;
    only_keys(j, path, {"family", "base"});
  } else if (fam == "kahler_potential") {
    m.family = MetricFamily::kahler_potential;
    only_keys(j, path, {"family", "base", "potential"});
  } else if (fam == "conformal_kahler") {
    m.family = MetricFamily::conformal_kahler;
    only_keys(j, path, {"family", "base", "potential", "v"});
  } else if (fam == "hermitian_perturbed") {
    m.family = MetricFamily::hermitian_perturbed;
    only_keys(j, path, {"family", "base", "potential", "modes"});
  } else {
    throw ConfigError(at(path, "family"), "unknown metric family '" + fam + "'");
  }
  if (j.contains("base")) m.base = matrix_of(j["base"], at(path, "base"), n);
  if (j.contains("potential")) m.potential = modes_of(j["potential"], at(path, "potential"), sizes);
  if (j.contains("v")) m.conformal = modes_of(j["v"], at(path, "v"), sizes);
  if (j.contains("modes")) {
    const json& arr = j["modes"];
    if (!arr.is_array()) throw ConfigError(at(path, "modes"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = at(at(path, "modes"), i);
      only_keys(arr[i], p, {"k", "cos", "sin"});
      if (!arr[i].contains("k")) throw ConfigError(at(p, "k"), "missing");
      MatrixMode mm;
      mm.k = wavevector_of(arr[i]["k"], at(p, "k"), sizes);
      mm.c = arr[i].contains("cos") ? matrix_of(arr[i]["cos"], at(p, "cos"), n) : HMat(HMat::Zero(n, n));
      mm.s = arr[i].contains("sin") ? matrix_of(arr[i]["sin"], at(p, "sin"), n) : HMat(HMat::Zero(n, n));
      m.perturbation.push_back(std::move(mm));
    }
  }
  return m;
}

double phase(const std::vector<int>& k, const std::array<double, kMaxAxes>& x) {
  double a = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) a += k[i] * x[i];
  return a;
}

}  // namespace

const char* family_name(MetricFamily f) {
  switch (f) {
    case MetricFamily::flat_kahler: return "flat_kahler";
    case MetricFamily::kahler_potential: return "kahler_potential";
    case MetricFamily::conformal_kahler: return "conformal_kahler";
    case MetricFamily::hermitian_perturbed: return "hermitian_perturbed";
  }
  return "?";
}

ScalarField evaluate_modes(const TorusGrid& grid, const std::vector<TrigMode>& modes) {
  return ScalarField::sample(grid, [&](const auto& x) {
    double s = 0.0;
    for (const TrigMode& m : modes) {
      const double a = phase(m.k, x);
      s += m.c * std::cos(a) + m.s * std::sin(a);
    }
    return s;
  });
}

TorusGrid Scenario::grid() const { return TorusGrid::build(n, sizes); }

HermitianField Scenario::build_metric() const {
  const TorusGrid g = grid();
  HermitianField h = HermitianField::sample(g, [&](const auto& x) {
    HMat a = metric.base;
    for (const MatrixMode& m : metric.perturbation) {
      const double ph = phase(m.k, x);
      a += std::cos(ph) * m.c + std::sin(ph) * m.s;
    }
    return a;
  });
  if (!metric.potential.empty()) h = h + ddbar(evaluate_modes(g, metric.potential));
  if (!metric.conformal.empty()) {
    h = h.scaled(map(evaluate_modes(g, metric.conformal), [](double v) { return std::exp(v); }));
  }
  std::size_t where = 0;
  const double lo = min_eigenvalue(h, &where);
  if (!(lo > 0.0)) {
    throw ConfigError("metric", "not positive definite (eigenvalue " + std::to_string(lo) + " at point " +
                                    std::to_string(where) + ")");
  }
  return h;
}

std::optional<ScalarField> Scenario::phi_star() const {
  if (f.manufactured.empty()) return std::nullopt;
  return evaluate_modes(grid(), f.manufactured);
}

ScalarField Scenario::build_f(const HermitianField& m) const {
  ScalarField out = f.manufactured.empty() ? evaluate_modes(grid(), f.modes) : manufacture(m, *phi_star());
  if (f.sup_zero) out = out - sup(out);
  return out + f.shift;
}

SolveOptions Scenario::solve_options() const {
  SolveOptions o = solve;
  if (!initial_guess.empty()) o.initial_guess = evaluate_modes(grid(), initial_guess);
  return o;
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, "", {"name", "n", "grid", "metric", "F", "solve", "gauduchon", "diagnostics", "seed"});
  Scenario s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("name", "expected a string");
    s.name = j["name"].get<std::string>();
  }
  if (!j.contains("n")) throw ConfigError("n", "missing");
  s.n = static_cast<int>(integer(j["n"], "n"));
  if (s.n != 2 && s.n != 3) throw ConfigError("n", "must be 2 or 3");
  if (!j.contains("grid") || !j["grid"].is_array()) throw ConfigError("grid", "expected an array of axis sizes");
  for (std::size_t a = 0; a < j["grid"].size(); ++a) {
    const long v = integer(j["grid"][a], at("grid", a));
    if (v < 4 || v % 2 != 0) throw ConfigError(at("grid", a), "axis size must be even and >= 4, got " + std::to_string(v));
    s.sizes.push_back(static_cast<int>(v));
  }
  if (static_cast<int>(s.sizes.size()) != 2 * s.n) {
    throw ConfigError("grid", "expected " + std::to_string(2 * s.n) + " axis sizes");
  }
  if (j.contains("seed")) {
    const long v = integer(j["seed"], "seed");
    if (v < 0) throw ConfigError("seed", "must be nonnegative");
    s.seed = static_cast<std::uint64_t>(v);
  }

  if (!j.contains("metric")) throw ConfigError("metric", "missing");
  s.metric = metric_of(j["metric"], s.n, s.sizes);

  if (j.contains("F")) {
    const json& f = j["F"];
    only_keys(f, "F", {"modes", "manufactured", "normalization", "shift"});
    if (f.contains("modes")) s.f.modes = modes_of(f["modes"], "F.modes", s.sizes);
    if (f.contains("manufactured")) s.f.manufactured = modes_of(f["manufactured"], "F.manufactured", s.sizes);
    if (f.contains("normalization")) {
      const std::string v = f["normalization"].is_string() ? f["normalization"].get<std::string>() : "";
      if (v == "sup_zero") s.f.sup_zero = true;
      else if (v != "raw") throw ConfigError("F.normalization", "expected 'raw' or 'sup_zero'");
    }
    optional_field(f, "F", "shift", s.f.shift, number);
  }

  if (j.contains("solve")) {
    const json& o = j["solve"];
    only_keys(o, "solve", {"residual_tol", "max_newton_iters", "krylov_tol", "krylov_restart", "krylov_max_iters",
                           "damping", "min_step", "positivity_floor", "continuity_steps", "initial_guess"});
    optional_field(o, "solve", "residual_tol", s.solve.residual_tol, number);
    optional_field(o, "solve", "max_newton_iters", s.solve.max_newton_iters, integer);
    optional_field(o, "solve", "krylov_tol", s.solve.krylov_tol, number);
    optional_field(o, "solve", "krylov_restart", s.solve.krylov_restart, integer);
    optional_field(o, "solve", "krylov_max_iters", s.solve.krylov_max_iters, integer);
    optional_field(o, "solve", "damping", s.solve.damping, number);
    optional_field(o, "solve", "min_step", s.solve.min_step, number);
    optional_field(o, "solve", "positivity_floor", s.solve.positivity_floor, number);
    optional_field(o, "solve", "continuity_steps", s.solve.continuity_steps, integer);
    if (o.contains("initial_guess")) s.initial_guess = modes_of(o["initial_guess"], "solve.initial_guess", s.sizes);
    try {
      s.solve.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("solve", e.what());
    }
  }

  if (j.contains("gauduchon")) {
    const json& o = j["gauduchon"];
    only_keys(o, "gauduchon", {"tol", "max_iterations", "degeneracy_threshold"});
    optional_field(o, "gauduchon", "tol", s.gauduchon.tol, number);
    optional_field(o, "gauduchon", "max_iterations", s.gauduchon.max_iterations, integer);
    optional_field(o, "gauduchon", "degeneracy_threshold", s.gauduchon.degeneracy_threshold, number);
  }

  if (j.contains("diagnostics")) {
    const json& o = j["diagnostics"];
    only_keys(o, "diagnostics", {"checks", "lemma1_p", "moser_p0", "moser_pmax", "sublevel_p0", "induction_p",
                                 "trace_a", "trace_ceiling", "pointwise_trials", "pointwise_eps"});
    DiagnosticsOptions& d = s.diagnostics;
    if (o.contains("checks")) {
      if (!o["checks"].is_array()) throw ConfigError("diagnostics.checks", "expected an array of names");
      const auto& names = check_names();
      for (std::size_t i = 0; i < o["checks"].size(); ++i) {
        const json& c = o["checks"][i];
        const std::string name = c.is_string() ? c.get<std::string>() : "";
        if (std::find(names.begin(), names.end(), name) == names.end()) {
          throw ConfigError(at("diagnostics.checks", i), "unknown check '" + name + "'");
        }
        s.checks.push_back(name);
      }
    }
    if (o.contains("lemma1_p")) d.lemma1_p = number_list(o["lemma1_p"], "diagnostics.lemma1_p");
    if (o.contains("trace_a")) d.trace_a = number_list(o["trace_a"], "diagnostics.trace_a");
    optional_field(o, "diagnostics", "moser_p0", d.moser_p0, number);
    optional_field(o, "diagnostics", "moser_pmax", d.moser_pmax, number);
    optional_field(o, "diagnostics", "sublevel_p0", d.sublevel_p0, number);
    optional_field(o, "diagnostics", "induction_p", d.induction_p, number);
    optional_field(o, "diagnostics", "trace_ceiling", d.trace_ceiling, number);
    optional_field(o, "diagnostics", "pointwise_trials", d.pointwise_trials, integer);
    optional_field(o, "diagnostics", "pointwise_eps", d.pointwise_eps, number);
    if (d.pointwise_trials < 1) throw ConfigError("diagnostics.pointwise_trials", "must be positive");
    if (!(d.pointwise_eps > 0.0 && d.pointwise_eps <= 1.0)) throw ConfigError("diagnostics.pointwise_eps", "must lie in (0,1]");
    if (!(d.moser_p0 >= 1.0)) throw ConfigError("diagnostics.moser_p0", "must be >= 1");
  }
  s.diagnostics.seed = s.seed;
  s.diagnostics.solve_residual_tol = s.solve.residual_tol;
  s.gauduchon.seed = s.seed;

  s.build_metric();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("<file>", "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace hma
