#include "hma/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hma/diagnostics.hpp"
#include "hma/field_file.hpp"
#include "hma/gauduchon.hpp"
#include "hma/ma_solver.hpp"
#include "hma/scenario.hpp"

namespace hma {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver gave up; the report has already been written.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  const auto fail = [&](const char* cls, const std::string& what, int code) {
    err << "error[" << cls << "]: " << what << '\n';
    return code;
  };
  try {
    fn();
    return kExitOk;
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const IoError& e) {
    return fail("io", e.what(), kExitIo);
  } catch (const FieldFileError& e) {
    return fail("io", e.what(), kExitIo);
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), kExitIo);
  } catch (const KernelDegeneracyError& e) {
    return fail("kernel-degeneracy", e.what(), kExitKernelDegeneracy);
  } catch (const GauduchonError& e) {
    return fail("convergence", e.what(), kExitNonConvergence);
  } catch (const ConvergenceError& e) {
    return fail("convergence", e.what(), kExitNonConvergence);
  } catch (const NonConvergence& e) {
    return fail("convergence", e.what(), kExitNonConvergence);
  } catch (const KrylovError& e) {
    return fail("convergence", e.what(), kExitNonConvergence);
  } catch (const PositivityError& e) {
    return fail("convergence", e.what(), kExitNonConvergence);
  } catch (const CheckFailure& e) {
    return fail("check", e.what(), kExitCheckFailure);
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}

Scenario load(const fs::path& config, const Overrides& ov) {
  std::ifstream probe(config);
  if (!probe) throw IoError("cannot read config " + config.string());
  Scenario s = load_scenario(config);
  if (ov.seed) {
    s.seed = *ov.seed;
    s.diagnostics.seed = *ov.seed;
    s.gauduchon.seed = *ov.seed;
  }
  if (ov.tol) {
    if (!(*ov.tol > 0.0)) throw ConfigError("--tol", "must be positive");
    s.solve.residual_tol = *ov.tol;
    s.diagnostics.solve_residual_tol = *ov.tol;
  }
  if (ov.trials) {
    if (*ov.trials < 1) throw ConfigError("--trials", "must be positive");
    s.diagnostics.pointwise_trials = *ov.trials;
  }
  if (!ov.checks.empty()) s.checks = ov.checks;
  return s;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

json grid_json(const TorusGrid& g) { return {{"n", g.dim()}, {"sizes", std::vector<int>(g.sizes().begin(), g.sizes().end())}}; }

void write_iterations(const fs::path& path, const SolveReport& r) {
  std::string s = "iteration,stage,residual,step,min_eig,krylov_iters\n";
  for (const IterationRecord& h : r.history) {
    s += std::to_string(h.iteration) + "," + std::to_string(h.stage) + "," + num(h.residual) + "," + num(h.step) + "," +
         num(h.min_eig) + "," + std::to_string(h.krylov_iters) + "\n";
  }
  write_text(path, s);
}

json report_json(const SolveReport& r) {
  return {{"b", r.b},
          {"final_residual", r.final_residual},
          {"positivity_margin", r.min_eig},
          {"newton_iters", r.newton_iters},
          {"iteration_rows", r.history.size()},
          {"krylov_iters_total", r.krylov_iters_total},
          {"continuity_stages", r.continuity_stages},
          {"converged", r.converged},
          {"wall_time_s", r.wall_time},
          {"residual_history", r.residual_history()}};
}

MoserProfile moser_for(const Scenario& s, const ScalarField& phi, const HermitianField& metric) {
  const double beta = static_cast<double>(s.n) / (s.n - 1);
  const DiagnosticsOptions& d = s.diagnostics;
  const int levels = std::max(3, static_cast<int>(std::ceil(std::log(d.moser_pmax / d.moser_p0) / std::log(beta) - 1e-9)));
  return moser_profile(phi, metric, d.moser_p0, levels);
}

}  // namespace

int run_solve(const fs::path& config, const fs::path& out_dir, const Overrides& ov, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load(config, ov);
    const HermitianField metric = s.build_metric();
    const ScalarField f = s.build_f(metric);
    ensure_dir(out_dir);
    write_text(out_dir / "config.json", read_text(config));

    json summary = {{"scenario", s.name}, {"grid", grid_json(metric.grid())}, {"family", family_name(s.metric.family)},
                    {"residual_tol", s.solve.residual_tol}, {"seed", s.seed}};
    SolveReport r;
    bool ok = true;
    std::string failure;
    try {
      r = solve(metric, f, s.solve_options());
    } catch (const ConvergenceError& e) {
      r = e.best();
      ok = false;
      failure = e.what();
    }
    summary.update(report_json(r));
    if (ok) {
      write_field(out_dir / "phi.hmaf", r.phi);
      summary["sup_phi"] = sup(r.phi);
      summary["inf_phi"] = inf(r.phi);
      if (const auto star = s.phi_star()) {
        const ScalarField ref = *star - sup(*star);
        summary["phi_star_error"] = sup_abs(r.phi - ref);
      }
    }
    write_iterations(out_dir / "iterations.csv", r);
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    if (!ok) throw NonConvergence(failure);

    out << "solved " << (s.name.empty() ? config.filename().string() : s.name) << ": b = " << num(r.b)
        << ", residual = " << num(r.final_residual) << ", newton iterations = " << r.newton_iters
        << ", positivity margin = " << num(r.min_eig) << '\n';
  });
}

int run_diagnose(const fs::path& config, const fs::path& solution_dir, const Overrides& ov, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load(config, ov);
    const HermitianField metric = s.build_metric();
    const ScalarField f = s.build_f(metric);
    if (!fs::exists(solution_dir / "phi.hmaf") || !fs::exists(solution_dir / "summary.json")) {
      throw IoError("no solution in " + solution_dir.string() + " (run solve first)");
    }
    const ScalarField phi = read_scalar_field(solution_dir / "phi.hmaf");
    if (!(phi.grid() == metric.grid())) throw ConfigError("grid", "solution grid differs from the scenario grid");
    const json summary = read_json(solution_dir / "summary.json");
    if (!summary.contains("b") || !summary["b"].is_number()) throw IoError("summary.json has no numeric 'b'");
    const double b = summary["b"].get<double>();

    std::optional<ScalarField> u;
    const auto needs_u = [&](const char* name) {
      return s.checks.empty() || std::find(s.checks.begin(), s.checks.end(), name) != s.checks.end();
    };
    if (needs_u("psi_checks") || needs_u("poincare")) u = solve_gauduchon(metric, s.gauduchon).u;
    const DiagnosticsReport rep = run_diagnostics({metric, f, phi, b, u}, s.diagnostics, s.checks);

    json doc = {{"scenario", s.name}, {"theorem_checks_pass", rep.theorem_checks_pass()}, {"checks", json::array()}};
    std::string text;
    for (const CheckResult& c : rep.checks) {
      doc["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"theorem_backed", c.theorem_backed},
                               {"values", c.values},
                               {"tolerances", c.tolerances},
                               {"samples", c.samples},
                               {"note", c.note}});
      std::string line = c.name + " " + (c.pass ? "PASS" : "FAIL") + (c.theorem_backed ? " [theorem]" : " [empirical]");
      for (const auto& [k, v] : c.values) line += " " + k + "=" + num(v);
      if (!c.note.empty()) line += " (" + c.note + ")";
      text += line + "\n";
    }
    write_text(solution_dir / "diagnostics.json", doc.dump(2) + "\n");
    write_text(solution_dir / "diagnostics.txt", text);
    out << text;
    if (!rep.theorem_checks_pass()) {
      std::string failed;
      for (const CheckResult& c : rep.checks)
        if (c.theorem_backed && !c.pass) failed += (failed.empty() ? "" : ",") + c.name;
      throw CheckFailure("theorem-backed check failed: " + failed);
    }
  });
}

int run_gauduchon(const fs::path& config, const fs::path& out_dir, const Overrides& ov, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load(config, ov);
    const HermitianField metric = s.build_metric();
    ensure_dir(out_dir);
    const GauduchonResult r = solve_gauduchon(metric, s.gauduchon);
    const MetricClass c = classify_metric(metric);
    write_field(out_dir / "u.hmaf", r.u);
    json doc = {{"scenario", s.name},
                {"grid", grid_json(metric.grid())},
                {"residual", r.residual},
                {"iterations", r.iterations},
                {"krylov_iters", r.krylov_iters},
                {"complement_ratio", r.complement_ratio},
                {"sup_abs_u", sup_abs(r.u)},
                {"classify",
                 {{"d_omega", c.d_omega},
                  {"d_omega_n1", c.d_omega_n1},
                  {"ddbar_omega", c.ddbar_omega},
                  {"ddbar_omega2", c.ddbar_omega2},
                  {"ddbar_omega_n1", c.ddbar_omega_n1},
                  {"kahler", c.kahler()},
                  {"balanced", c.balanced()},
                  {"pluriclosed", c.pluriclosed()},
                  {"gauduchon", c.gauduchon()},
                  {"condition_k12", c.condition_k12()}}}};
    if (s.metric.family == MetricFamily::conformal_kahler) {
      const ScalarField v = evaluate_modes(metric.grid(), s.metric.conformal);
      doc["conformal_error"] = sup_abs(r.u - (inf(v) - v));
    }
    write_text(out_dir / "gauduchon.json", doc.dump(2) + "\n");
    out << "gauduchon factor: residual = " << num(r.residual) << ", sup|u| = " << num(sup_abs(r.u))
        << ", kahler = " << (c.kahler() ? "yes" : "no") << '\n';
  });
}

std::string plotdata_file_name(const std::string& kind) {
  if (kind.rfind("slice:", 0) == 0) {
    std::string s = "slice_" + kind.substr(6);
    for (char& ch : s) {
      if (ch == ',') ch = '_';
      if (ch == '=') ch = '-';
    }
    return s + ".csv";
  }
  return kind + ".csv";
}

int emit_plotdata(const fs::path& solution_dir, const std::string& kind, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (kind != "moser" && kind != "residual" && kind.rfind("slice:", 0) != 0) {
      throw ConfigError("--kind", "unknown plot kind '" + kind + "' (moser, residual, slice:...)");
    }
    const fs::path target = solution_dir / plotdata_file_name(kind);
    std::string csv;
    if (kind == "residual") {
      const json summary = read_json(solution_dir / "summary.json");
      csv = "iteration,residual\n";
      const auto hist = summary.at("residual_history").get<std::vector<double>>();
      for (std::size_t i = 0; i < hist.size(); ++i) csv += std::to_string(i) + "," + num(hist[i]) + "\n";
    } else {
      const ScalarField phi = read_scalar_field(solution_dir / "phi.hmaf");
      const TorusGrid& g = phi.grid();
      if (kind == "moser") {
        const Scenario s = load(solution_dir / "config.json", {});
        const MoserProfile m = moser_for(s, phi, s.build_metric());
        csv = "p,norm\n";
        for (std::size_t i = 0; i < m.p.size(); ++i) csv += num(m.p[i]) + "," + num(m.norms[i]) + "\n";
      } else {
        std::vector<int> fixed(static_cast<std::size_t>(g.axes()), -1);
        std::stringstream spec(kind.substr(6));
        std::string item;
        while (std::getline(spec, item, ',')) {
          int axis = -1, index = -1;
          char tail = 0;
          if (std::sscanf(item.c_str(), "x%d=%d%c", &axis, &index, &tail) != 2 || axis < 0 || axis >= g.axes() ||
              index < 0 || index >= g.size(axis) || fixed[static_cast<std::size_t>(axis)] != -1) {
            throw ConfigError("--kind", "bad slice term '" + item + "'");
          }
          fixed[static_cast<std::size_t>(axis)] = index;
        }
        std::vector<int> free;
        for (int a = 0; a < g.axes(); ++a)
          if (fixed[static_cast<std::size_t>(a)] == -1) free.push_back(a);
        if (free.size() != 2) throw ConfigError("--kind", "a slice must leave exactly two axes free");
        const std::string a = std::to_string(free[0]), b = std::to_string(free[1]);
        csv = "i" + a + ",i" + b + ",x" + a + ",x" + b + ",phi\n";
        AxisIndex idx{};
        for (int ax = 0; ax < g.axes(); ++ax) idx[ax] = std::max(0, fixed[static_cast<std::size_t>(ax)]);
        for (int i = 0; i < g.size(free[0]); ++i) {
          for (int j = 0; j < g.size(free[1]); ++j) {
            idx[free[0]] = i;
            idx[free[1]] = j;
            csv += std::to_string(i) + "," + std::to_string(j) + "," + num(g.coordinate(free[0], i)) + "," +
                   num(g.coordinate(free[1], j)) + "," + num(phi[g.flat_index(idx)]) + "\n";
          }
        }
      }
    }
    write_text(target, csv);
    out << "wrote " << target.string() << '\n';
  });
}

int run_verify_pointwise(int n, long trials, double eps, std::uint64_t seed, const fs::path& out_dir,
                         std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const PointwiseResult r = pointwise_ineq_sample(n, trials, eps, seed, trials);
    json doc = {{"n", n}, {"eps", eps}, {"seed", seed}, {"calibration_samples", r.calibration_samples},
                {"validation_samples", r.validation_samples}, {"levels", json::array()}};
    for (const PointwiseLevel& l : r.levels) {
      doc["levels"].push_back({{"k", l.k},
                               {"calibrated_c", l.calibrated_c},
                               {"uniform_c", l.uniform_c},
                               {"validation_max", l.validation_max},
                               {"violations", l.violations}});
      out << "k=" << l.k << " C=" << num(l.calibrated_c) << " validation_max=" << num(l.validation_max)
          << " violations=" << l.violations << '\n';
    }
    if (!out_dir.empty()) {
      ensure_dir(out_dir);
      write_text(out_dir / "pointwise.json", doc.dump(2) + "\n");
    }
    if (!r.pass()) throw CheckFailure("pointwise inequality violated on validation samples");
  });
}

}  // namespace hma
