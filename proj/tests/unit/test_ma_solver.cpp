#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hma/ma_solver.hpp"

using namespace hma;

namespace {

HermitianField flat(const TorusGrid& g) { return HermitianField::constant(g, identity_matrix(g.dim())); }

HermitianField perturbed(const TorusGrid& g, double amp) {
  return HermitianField::sample(g, [&](const auto& x) {
    HMat a = identity_matrix(2);
    a(0, 1) += amp * cplx(std::cos(x[0] + x[3]), 0.5 * std::sin(x[2]));
    a(1, 0) = std::conj(a(0, 1));
    a(0, 0) += amp * std::sin(x[1]);
    a(1, 1) += amp * std::cos(x[0] - x[2]);
    return a;
  });
}

ScalarField cosx0(const TorusGrid& g, double a) {
  return ScalarField::sample(g, [=](const auto& x) { return a * std::cos(x[0]); });
}

ScalarField generic_f(const TorusGrid& g) {
  return ScalarField::sample(g, [](const auto& x) {
    return 0.3 * std::cos(x[0]) * std::cos(x[2]) + 0.2 * std::sin(x[1] + x[3]) - 0.1 * std::cos(x[1] - 2 * x[2]);
  });
}

}  // namespace

TEST_CASE("options validation") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.damping = 1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = {};
  o.residual_tol = 0.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("ma_residual examples") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField id = flat(g);
  const ScalarField zero(g);
  CHECK(sup_abs(ma_residual(zero, 0.0, zero, id)) == 0.0);
  const ScalarField f = ScalarField::sample(g, [](const auto& x) { return std::sin(x[1]) + 0.2; });
  CHECK(sup_abs(ma_residual(zero, 0.0, f, id) + f) < 1e-15);

  const HermitianField pm = perturbed(g, 0.1);
  const ScalarField phi = ScalarField::sample(g, [](const auto& x) { return 0.05 * std::cos(x[0] + x[3]) + 0.02 * std::sin(x[2]); });
  const ScalarField fstar = manufacture(pm, phi);
  CHECK(sup_abs(ma_residual(phi, 0.0, fstar, pm)) < 1e-12);

  CHECK_THROWS_AS(ma_residual(cosx0(g, 8.0), 0.0, zero, id), PositivityError);
}

TEST_CASE("manufacture of a single mode") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const ScalarField zero(g);
  CHECK(sup_abs(manufacture(flat(g), zero)) == 0.0);
  // ddbar(0.1 cos x0) = diag(-0.025 cos x0, 0)
  const ScalarField f = manufacture(flat(g), cosx0(g, 0.1));
  const ScalarField expect = ScalarField::sample(g, [](const auto& x) { return std::log(1.0 - 0.025 * std::cos(x[0])); });
  CHECK(sup_abs(f - expect) < 1e-15);
}

TEST_CASE("newton_step examples") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField id = flat(g);
  const ScalarField zero(g);
  const SolveOptions opts;

  const NewtonStep s0 = newton_step(zero, 0.0, zero, id, opts);
  CHECK(sup_abs(s0.delta_phi) == 0.0);
  CHECK(s0.delta_b == 0.0);

  // R = -F; choose F = -cos(x0) so R = cos(x0), then Delta dphi = -cos gives dphi = 4 cos.
  const NewtonStep s1 = newton_step(zero, 0.0, -1.0 * cosx0(g, 1.0), id, opts);
  CHECK(sup_abs(s1.delta_phi - cosx0(g, 4.0)) < 1e-8);
  CHECK(std::abs(s1.delta_b) < 1e-8);

  // R = c: constants sit in the kernel, so the step goes entirely into b.
  const NewtonStep s2 = newton_step(zero, 0.0, ScalarField(g, -0.7), id, opts);
  CHECK(sup_abs(s2.delta_phi) < 1e-10);
  CHECK(s2.delta_b == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("positivity_margin examples") {
  const TorusGrid g = TorusGrid::build(2, {4, 4, 4, 4});
  const ScalarField zero(g);
  CHECK(positivity_margin(zero, flat(g)) == doctest::Approx(1.0));
  HMat d = HMat::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 3;
  CHECK(positivity_margin(zero, HermitianField::constant(g, d)) == doctest::Approx(2.0));
}

TEST_CASE("solve with F = 0 returns the trivial pair") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const SolveReport r = solve(perturbed(g, 0.1), ScalarField(g));
  CHECK(r.converged);
  CHECK(sup_abs(r.phi) == 0.0);
  CHECK(r.b == 0.0);
  CHECK(r.newton_iters == 0);
  CHECK(r.history.size() == 1);
}

TEST_CASE("manufactured recovery on a small grid") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField id = flat(g);
  const ScalarField phi_star = ScalarField::sample(g, [](const auto& x) {
    return 0.1 * std::cos(x[0]) + 0.05 * std::cos(x[1]) * std::cos(x[2]);
  });
  const SolveReport r = solve(id, manufacture(id, phi_star));
  REQUIRE(r.converged);
  CHECK(r.final_residual <= 1e-10);
  CHECK(sup_abs(r.phi - (phi_star - sup(phi_star))) <= 1e-8);
  CHECK(std::abs(r.b) <= 1e-8);
  CHECK(sup(r.phi) == 0.0);
  CHECK(r.min_eig >= 1e-6);

  // accepted steps strictly reduce the residual and keep positivity
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    CHECK(r.history[k].residual < r.history[k - 1].residual);
    CHECK(r.history[k].min_eig >= 1e-6);
  }
}

TEST_CASE("quadratic convergence on a manufactured non-Kahler problem") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField pm = perturbed(g, 0.1);
  const ScalarField phi_star = ScalarField::sample(g, [](const auto& x) { return 0.2 * std::cos(x[0]) * std::sin(x[3]) + 0.1 * std::cos(x[2]); });
  SolveOptions o;
  o.residual_tol = 1e-13;
  o.krylov_tol = 1e-12;
  const SolveReport r = solve(pm, manufacture(pm, phi_star), o);
  REQUIRE(r.converged);
  CHECK(sup_abs(r.phi - (phi_star - sup(phi_star))) <= 1e-10);
  // With unit steps in the asymptotic regime, log r_{k+1} / log r_k ~ 2.
  const auto h = r.residual_history();
  bool found = false;
  for (std::size_t k = 1; k + 1 < h.size(); ++k) {
    if (h[k] < 1e-2 && h[k] > 1e-7 && h[k + 1] > 1e-15) {
      const double ratio = std::log(h[k + 1]) / std::log(h[k]);
      CHECK(ratio > 1.6);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("shift covariance and uniqueness") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField pm = perturbed(g, 0.1);
  const ScalarField f = generic_f(g);
  const SolveReport a = solve(pm, f);
  const SolveReport b = solve(pm, f + 2.5);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(sup_abs(a.phi - b.phi) < 1e-10);
  CHECK(std::abs((a.b - 2.5) - b.b) < 1e-10);

  SolveOptions o;
  o.initial_guess = ScalarField::sample(g, [](const auto& x) { return 0.05 * std::sin(x[0] - x[3]) + 0.03 * std::cos(x[1]); });
  const SolveReport c = solve(pm, f, o);
  REQUIRE(c.converged);
  CHECK(sup_abs(a.phi - c.phi) < 1e-8);
  CHECK(std::abs(a.b - c.b) < 1e-8);
}

TEST_CASE("b formula on a flat Kahler metric") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField id = flat(g);
  ScalarField f = ScalarField::sample(g, [](const auto& x) { return 0.5 * std::cos(x[0]) * std::cos(x[2]); });
  f = f - sup(f);
  const SolveReport r = solve(id, f);
  REQUIRE(r.converged);
  // independent quadrature: plain sums over samples
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    s0 += 1.0;
    s1 += std::exp(f[p]);
  }
  CHECK(std::abs(r.b - std::log(s0 / s1)) <= 1e-8);
}

TEST_CASE("continuity fallback handles a deep well") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField id = flat(g);
  const ScalarField f = ScalarField::sample(g, [](const auto& x) { return -4.0 * (1 - std::cos(x[0])) * (1 - std::cos(x[2])) / 4.0; });
  SolveOptions o;
  o.continuity_steps = 4;
  const SolveReport r = solve(id, f, o);
  CHECK(r.converged);
  CHECK(r.continuity_stages == 4);
  CHECK(sup_abs(ma_residual(r.phi, r.b, f, id)) <= 1e-10);
}

TEST_CASE("solve is deterministic") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField pm = perturbed(g, 0.1);
  const SolveReport a = solve(pm, generic_f(g));
  const SolveReport b = solve(pm, generic_f(g));
  CHECK(std::memcmp(a.phi.values().data(), b.phi.values().data(), a.phi.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(&a.b, &b.b, sizeof(double)) == 0);
}

TEST_CASE("solve rejects indefinite metrics") {
  const TorusGrid g = TorusGrid::build(2, {4, 4, 4, 4});
  HMat a = identity_matrix(2);
  a(0, 0) = -1;
  CHECK_THROWS_AS(solve(HermitianField::constant(g, a), ScalarField(g)), PositivityError);
}
