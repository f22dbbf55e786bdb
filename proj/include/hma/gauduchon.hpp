#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hma/grid.hpp"
#include "hma/hermitian.hpp"

namespace hma {

class GauduchonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operator P has a second independent near-null vector.
class KernelDegeneracyError : public GauduchonError {
 public:
  KernelDegeneracyError(const std::string& what, double ratio) : GauduchonError(what), ratio_(ratio) {}
  /// ||(P + J) y|| / ||y|| for the best complementary vector found.
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

/// w -> Re top(i ddbar(w omega^{n-1})) / top(omega_flat^n), applied spectrally to
/// the products w * c_M of w with the coefficient fields of omega^{n-1}.
/// The metric is not required to be positive definite here.
class GauduchonOperator {
 public:
  explicit GauduchonOperator(const HermitianField& metric);

  const TorusGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }

  void apply(std::span<const double> w, std::span<double> out) const;
  ScalarField apply(const ScalarField& w) const;
  /// Fourier symbol of the operator with every coefficient replaced by its flat mean.
  const std::vector<double>& flat_symbol() const { return flat_symbol_; }

 private:
  TorusGrid grid_;
  std::vector<ComplexField> coeffs_;          // omega^{n-1}, one per (n-1,n-1) monomial
  std::vector<std::vector<cplx>> symbols_;    // matching ddbar symbol, scaled and signed
  std::vector<double> flat_symbol_;
};

/// P(w). Throws std::invalid_argument unless w > 0 everywhere.
ScalarField gauduchon_defect(const ScalarField& w, const HermitianField& metric);

struct GauduchonOptions {
  double tol = 1e-10;             // on sup|P(w)| / sup|w|
  double krylov_tol = 1e-13;
  int krylov_restart = 60;
  int krylov_max_iters = 3000;
  int max_iterations = 20;        // defect-correction sweeps
  /// A complementary vector y with ||(P + J)y|| / ||y|| below this fraction of
  /// the smallest nonzero flat symbol counts as a second kernel direction.
  double degeneracy_threshold = 1e-6;
  int degeneracy_probes = 3;
  std::uint64_t seed = 1;
};

struct GauduchonResult {
  ScalarField u;         // sup u == 0
  ScalarField w;         // kernel vector, flat mean 1
  double residual = 0.0; // sup|P(w)| / sup|w|
  int iterations = 0;
  int krylov_iters = 0;
  double complement_ratio = 0.0;  // degeneracy probe measurement
};

/// Kernel vector of P, normalized to flat mean 1, by defect correction with the
/// nonsingular bordered operator P + J, J w = mean(w).
/// Throws KernelDegeneracyError when a second near-null direction shows up and
/// GauduchonError when iterations fail or w changes sign.
GauduchonResult kernel_vector(const GauduchonOperator& op, const GauduchonOptions& opts = {});

/// u with d dbar((e^u omega)^{n-1}) = 0 and sup u = 0.
GauduchonResult solve_gauduchon(const HermitianField& metric, const GauduchonOptions& opts = {});

struct MetricClass {
  double d_omega = 0.0;          // sup of d omega
  double d_omega_n1 = 0.0;       // sup of d(omega^{n-1})
  double ddbar_omega = 0.0;
  double ddbar_omega2 = 0.0;     // zero when omega^2 is already top degree
  double ddbar_omega_n1 = 0.0;
  double threshold = 1e-10;

  bool kahler() const { return d_omega <= threshold; }
  bool balanced() const { return d_omega_n1 <= threshold; }
  bool pluriclosed() const { return ddbar_omega <= threshold; }
  bool gauduchon() const { return ddbar_omega_n1 <= threshold; }
  /// d dbar omega^k = 0 for k = 1, 2.
  bool condition_k12() const { return ddbar_omega <= threshold && ddbar_omega2 <= threshold; }
};

MetricClass classify_metric(const HermitianField& metric, double threshold = 1e-10);

}  // namespace hma
