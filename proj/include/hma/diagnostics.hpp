#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hma/gauduchon.hpp"
#include "hma/grid.hpp"
#include "hma/hermitian.hpp"

namespace hma {

// Integrals of e^{-p phi} are always evaluated as e^{-p inf phi} * int e^{-p (phi - inf phi)};
// results carry the exponent of the factored-out constant where it matters.

struct Lemma1Result {
  std::vector<double> p;
  std::vector<double> q;          // from the pointwise chain-rule gradient, contracted with g^{-1}
  std::vector<double> q_wedge;    // from n * (i dphi ^ dbar phi ^ omega^{n-1}) / omega^n
  double empirical_c = 0.0;       // max_p q
  double max_route_gap = 0.0;     // max relative difference of the two routes
  bool finite = true;
};

/// Q(p) = int |d e^{-p phi/2}|_g^2 omega^n / (p int e^{-p phi} omega^n).
Lemma1Result lemma1_ratio(const ScalarField& phi, const HermitianField& metric, const std::vector<double>& p_list);

struct PointwiseLevel {
  int k = 0;
  double calibrated_c = 0.0;      // max over calibration samples
  double uniform_c = 0.0;         // max over samples of the requirement for every eps in (0,1]
  double validation_max = 0.0;    // max of lhs / rhs on validation samples with 2 * calibrated_c
  long violations = 0;
};

struct PointwiseResult {
  int n = 2;
  double eps = 0.5;
  double torsion_scale = 1.0;
  long calibration_samples = 0;
  long validation_samples = 0;
  std::vector<PointwiseLevel> levels;  // k = 0..n-2
  bool pass() const;
};

/// Samples the normal form omega = I, omega_phi = diag(lambda) with random
/// gradient and torsion, calibrates the smallest C per k on `trials` samples
/// and validates 2C on `validation` fresh ones (validation == 0 skips it).
PointwiseResult pointwise_ineq_sample(int n, long trials, double eps, std::uint64_t seed, long validation = 0,
                                      double torsion_scale = 1.0);

struct InductionLedger {
  double p = 0.0;
  double log_scale = 0.0;           // true integrals are e^{log_scale} times the stored ones
  std::vector<double> I;            // I_k, k = 0..n
  std::vector<double> G;            // G_k, k = 0..n-1
  double alpha_sum = 0.0;           // sum_k G_k
  double c_n = 0.0;                 // (p / 2^{n-1}) sum G_k / I_0
  bool nonnegative = true;          // every integrand sample >= 0
};

InductionLedger induction_ledger(const ScalarField& phi, const HermitianField& metric, double p);

struct MoserProfile {
  double beta = 0.0;
  std::vector<double> p;
  std::vector<double> norms;        // ||e^{-phi}||_{L^p(dmu)}
  double sup_value = 0.0;           // e^{-inf phi}
  double fitted_c = 0.0;
  double log_bound = 0.0;           // log prod_{j>=0} (C p0 beta^j)^{1/(p0 beta^j)}
  double ratio = 0.0;               // sup_value / norms[0]
  bool monotone = true;
  bool holds() const;
};

/// Norms at p0 * beta^j for j = 0..levels.
MoserProfile moser_profile(const ScalarField& phi, const HermitianField& metric, double p0, int levels);

struct MeasureBound {
  double c1 = 0.0;
  double threshold = 0.0;
  double measure = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// C_1 = -inf f - log int e^{-f} dmu and the sublevel set {f <= inf f + C_1 + 1}.
MeasureBound measure_bound_check(const ScalarField& f, const Measure& m);

struct SublevelCertificate {
  double p0 = 8.0;
  double c = 0.0;        // |{phi <= inf phi + c}| >= delta
  double delta = 0.0;
  MeasureBound bound;
};

SublevelCertificate sublevel_certificate(const ScalarField& phi, const HermitianField& metric, double p0 = 8.0);

struct TraceEstimate {
  std::vector<double> a;
  std::vector<double> c;   // C(A) = sup tr e^{-A (phi - inf phi)}
  double sup_trace = 0.0;
  double ceiling = 100.0;
  bool pass = false;
};

ScalarField trace_field(const ScalarField& phi, const HermitianField& metric);
TraceEstimate trace_estimate(const ScalarField& phi, const HermitianField& metric,
                             const std::vector<double>& a_list = {1, 2, 4, 8}, double ceiling = 100.0);

struct PsiChecks {
  double conformal_identity_error = 0.0;  // sup |Delta_G psi - e^{-u} Delta psi|
  double c0 = 0.0;                        // -inf Delta_G psi
  std::vector<double> p;
  std::vector<double> psi1_lhs;           // int |d psi^{(p+1)/2}|^2_G omega_G^n
  std::vector<double> psi1_rhs;           // p int psi^p omega_G^n
  double c1 = 0.0;
  double c2 = 0.0;                        // sup psi / max(int psi omega_G^n, 1)
};

PsiChecks psi_checks(const ScalarField& phi, const HermitianField& metric, const ScalarField& u,
                     const std::vector<double>& p_list = {1, 2, 4, 8});

struct PoincareResult {
  double mean = 0.0;      // omega_G^n average of psi
  double lhs = 0.0;       // ||psi - mean||_{L^2}
  double energy = 0.0;    // int |d psi|^2 omega_G^n
  double ratio = 0.0;     // lhs / sqrt(energy); 0 when both vanish
};

PoincareResult poincare_check(const ScalarField& psi, const HermitianField& gauduchon_metric);

/// sup |Ric(omega_phi) - Ric(omega) + (1/2pi) ddbar F|.
double ricci_identity_check(const ScalarField& phi, double b, const ScalarField& f, const HermitianField& metric);

struct BFormula {
  double predicted = 0.0;
  double deviation = 0.0;
  bool condition_holds = false;
};

BFormula b_formula_check(const HermitianField& metric, const ScalarField& f, double b);

// ---- report assembly ----

struct CheckResult {
  std::string name;
  bool pass = true;
  bool theorem_backed = false;
  std::map<std::string, double> values;
  std::map<std::string, double> tolerances;
  long samples = 0;
  std::string note;
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;
  const CheckResult* find(const std::string& name) const;
  /// True iff every theorem-backed check passed.
  bool theorem_checks_pass() const;
};

const std::vector<std::string>& check_names();

struct DiagnosticsOptions {
  std::vector<double> lemma1_p{8, 16, 32, 64, 128, 256, 512};
  double moser_p0 = 2.0;
  double moser_pmax = 512.0;
  double sublevel_p0 = 8.0;
  double induction_p = 32.0;
  std::vector<double> trace_a{1, 2, 4, 8};
  double trace_ceiling = 100.0;
  long pointwise_trials = 10000;
  double pointwise_eps = 0.5;
  double solve_residual_tol = 1e-10;
  double b_formula_tol = 1e-8;
  double identity_tol = 1e-10;
  std::uint64_t seed = 1;
};

struct DiagnosticsInput {
  const HermitianField& metric;
  const ScalarField& f;
  const ScalarField& phi;
  double b = 0.0;
  /// Gauduchon factor; computed on demand when absent and needed.
  std::optional<ScalarField> u;
};

/// Runs the named checks (all when `only` is empty). Throws std::invalid_argument
/// for an unknown name.
DiagnosticsReport run_diagnostics(const DiagnosticsInput& in, const DiagnosticsOptions& opts,
                                  const std::vector<std::string>& only = {});

}  // namespace hma
