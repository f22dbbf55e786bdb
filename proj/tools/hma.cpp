#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hma/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hermitian complex Monge-Ampere solver and estimate diagnostics"};
  app.require_subcommand(1);

  std::string config, out;
  std::string checks, kind;
  hma::Overrides ov;
  std::uint64_t seed = 0;
  double tol = 0.0;
  long trials = 0;
  int n = 2;
  double eps = 0.5;

  const auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config, "scenario JSON file");
    if (needs_config) c->required();
    sub->add_option("--out", out, "output (or solution) directory")->required();
    sub->add_option("--seed", seed, "override the scenario seed");
  };

  auto* solve = app.add_subcommand("solve", "solve the Monge-Ampere equation for a scenario");
  common(solve, true);
  solve->add_option("--tol", tol, "residual tolerance");

  auto* diagnose = app.add_subcommand("diagnose", "run estimate diagnostics on a solution directory");
  common(diagnose, true);
  diagnose->add_option("--checks", checks, "comma-separated check names");
  diagnose->add_option("--trials", trials, "pointwise sampler trials");
  diagnose->add_option("--tol", tol, "solve residual tolerance used for tolerances");

  auto* gauduchon = app.add_subcommand("gauduchon", "compute the Gauduchon conformal factor");
  common(gauduchon, true);

  auto* plot = app.add_subcommand("plotdata", "emit CSV data from a solution directory");
  plot->add_option("--out", out, "solution directory")->required();
  plot->add_option("--kind", kind, "moser | residual | slice:x2=0,x3=0")->required();

  auto* verify = app.add_subcommand("verify-pointwise", "sample the pointwise inequality");
  verify->add_option("--trials", trials, "calibration (and validation) samples")->default_val(100000);
  verify->add_option("--seed", seed, "sampler seed")->default_val(1);
  verify->add_option("--n", n, "complex dimension")->default_val(2);
  verify->add_option("--eps", eps, "epsilon in (0,1]")->default_val(0.5);
  verify->add_option("--out", out, "directory for pointwise.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[usage]: " << e.what() << '\n';
    return hma::kExitConfig;
  }

  for (CLI::App* sub : {solve, diagnose, gauduchon}) {
    if (sub->count("--seed")) ov.seed = seed;
    if (const auto* t = sub->get_option_no_throw("--tol"); t && t->count()) ov.tol = tol;
  }
  if (diagnose->count("--trials")) ov.trials = trials;
  if (!checks.empty()) {
    std::string item;
    for (char ch : checks + ",") {
      if (ch == ',') {
        if (!item.empty()) ov.checks.push_back(item);
        item.clear();
      } else {
        item += ch;
      }
    }
  }

  if (*solve) return hma::run_solve(config, out, ov, std::cout, std::cerr);
  if (*diagnose) return hma::run_diagnose(config, out, ov, std::cout, std::cerr);
  if (*gauduchon) return hma::run_gauduchon(config, out, ov, std::cout, std::cerr);
  if (*plot) return hma::emit_plotdata(out, kind, std::cout, std::cerr);
  return hma::run_verify_pointwise(n, trials, eps, seed, out, std::cout, std::cerr);
}
