#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hma {

/// y = A x, both of the operator's dimension.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct GmresOptions {
  double relative_tol = 1e-8;
  int restart = 40;
  int max_iterations = 400;
};

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Restarted GMRES with right preconditioning, so the monitored residual is the
/// true residual ||b - A x|| / ||b||. x holds the initial guess on entry.
GmresResult gmres(const LinearOperator& a, const LinearOperator& preconditioner, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opts);

}  // namespace hma
