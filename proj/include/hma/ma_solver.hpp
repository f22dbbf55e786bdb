#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "hma/grid.hpp"
#include "hma/hermitian.hpp"

namespace hma {

struct SolveOptions {
  int max_newton_iters = 50;
  double residual_tol = 1e-10;  // sup-norm of the log-determinant residual
  double krylov_tol = 1e-8;     // relative
  int krylov_restart = 40;
  int krylov_max_iters = 600;
  double damping = 0.5;         // line-search shrink factor
  double min_step = 1e-4;
  double positivity_floor = 1e-6;
  int continuity_steps = 1;     // > 1 solves along F_t = t F
  /// Starting iterate (its flat mean is removed). Zero when absent.
  std::optional<ScalarField> initial_guess;

  /// Throws std::invalid_argument for nonpositive tolerances or damping
  /// outside (0,1).
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  int stage = 0;            // continuity stage, 1-based
  double residual = 0.0;    // sup-norm after the step
  double step = 0.0;        // accepted step length (0 for the initial record)
  double min_eig = 0.0;     // positivity margin after the step
  int krylov_iters = 0;
};

struct SolveReport {
  ScalarField phi;          // sup phi == 0
  double b = 0.0;
  std::vector<IterationRecord> history;
  double final_residual = 0.0;
  double min_eig = 0.0;
  int newton_iters = 0;
  int krylov_iters_total = 0;
  int continuity_stages = 1;
  double wall_time = 0.0;   // seconds
  bool converged = false;

  std::vector<double> residual_history() const;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, SolveReport best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolveReport& best() const { return best_; }

 private:
  SolveReport best_;
};

class KrylovError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log(det(g + ddbar phi) / det g) - F - b. Throws PositivityError naming the
/// worst point when g + ddbar phi is not positive definite.
ScalarField ma_residual(const ScalarField& phi, double b, const ScalarField& f, const HermitianField& metric);

struct NewtonStep {
  ScalarField delta_phi;  // flat mean zero
  double delta_b = 0.0;
  int krylov_iters = 0;
};

/// Solves g_phi^{i jbar} d_i dbar_j dphi - db = -R with mean(dphi) = 0 by
/// preconditioned GMRES. Throws KrylovError on non-convergence.
NewtonStep newton_step(const ScalarField& phi, double b, const ScalarField& f, const HermitianField& metric,
                       const SolveOptions& opts);

/// Damped Newton with continuity fallback. Throws ConvergenceError carrying the
/// best iterate when every attempt fails.
SolveReport solve(const HermitianField& metric, const ScalarField& f, const SolveOptions& opts = {});

/// F := log(det(g + ddbar phi*) / det g).
ScalarField manufacture(const HermitianField& metric, const ScalarField& phi_star);

/// min over points of the smallest eigenvalue of g + ddbar phi.
double positivity_margin(const ScalarField& phi, const HermitianField& metric);

}  // namespace hma
