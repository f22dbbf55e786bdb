#include "hma/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hma/forms.hpp"
#include "hma/ma_solver.hpp"
#include "hma/spectral.hpp"

namespace hma {

namespace {

// splitmix64 stream keyed by (seed, index): each sample owns its own stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index) : state_(mix(seed ^ mix(index + 0x632be59bd9b4e019ull))) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

ScalarField shifted_exp(const ScalarField& phi, double p) {
  const double lo = inf(phi);
  return map(phi, [p, lo](double v) { return std::exp(-p * (v - lo)); });
}

double sup_entries(const HermitianField& h) {
  double m = 0.0;
  for (const cplx& v : h.raw()) m = std::max(m, std::abs(v));
  return m;
}

Measure normalized(const Measure& m) {
  return Measure::from_density((1.0 / m.total_mass()) * m.density());
}

// n (i dphi ^ dbar phi ^ omega^{n-1}) / omega^n, expanded in the point exterior algebra.
ScalarField gradient_wedge_quotient(const ScalarField& phi, const HermitianField& metric) {
  const TorusGrid& g = metric.grid();
  const int n = g.dim();
  std::vector<ComplexField> d;
  for (int j = 0; j < n; ++j) d.push_back(spectral_partial(phi, j, false));
  ScalarField out(g);
  std::vector<cplx> v(static_cast<std::size_t>(n)), vbar(v.size());
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    for (int j = 0; j < n; ++j) {
      v[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(j)][p];
      vbar[static_cast<std::size_t>(j)] = std::conj(d[static_cast<std::size_t>(j)][p]);
    }
    const PointForm omega = PointForm::from_matrix(metric.at(p));
    const PointForm head = wedge(PointForm::one_form(v, false) * cplx(0.0, 1.0), PointForm::one_form(vbar, true));
    const cplx num = wedge(head, wedge_power(omega, n - 1)).top();
    out[p] = n * (num / wedge_power(omega, n).top()).real();
  }
  return out;
}

}  // namespace

Lemma1Result lemma1_ratio(const ScalarField& phi, const HermitianField& metric, const std::vector<double>& p_list) {
  require_same_grid(phi.grid(), metric.grid());
  const int n = metric.dim();
  const Measure vol = volume_measure(metric);
  const ScalarField grad = gradient_norm_sq(phi, metric);
  const ScalarField grad_wedge = gradient_wedge_quotient(phi, metric);

  Lemma1Result r;
  for (double p : p_list) {
    if (!(p >= 1.0)) throw std::invalid_argument("lemma1_ratio: exponents must be >= 1");
    const ScalarField h2 = shifted_exp(phi, p);
    const double denom = p * integrate(h2, vol);
    const double a = 0.25 * p * p * integrate(h2 * grad, vol) / denom;
    const double b = 0.25 * p * p * integrate(h2 * grad_wedge, vol) / denom;
    r.p.push_back(p);
    r.q.push_back(a);
    r.q_wedge.push_back(b);
    if (!std::isfinite(a) || !std::isfinite(b)) r.finite = false;
    r.empirical_c = std::max(r.empirical_c, a);
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale > 0.0) r.max_route_gap = std::max(r.max_route_gap, std::abs(a - b) / scale);
  }
  return r;
}

bool PointwiseResult::pass() const {
  for (const PointwiseLevel& l : levels)
    if (l.violations > 0) return false;
  return true;
}

namespace {

struct PointwiseSample {
  double lhs, grad, vol;
};

class PointwiseSampler {
 public:
  PointwiseSampler(int n, double torsion_scale) : n_(n), scale_(torsion_scale) {
    const PointForm omega = PointForm::from_matrix(identity_matrix(n));
    for (int m = 0; m <= n; ++m) omega_pow_.push_back(wedge_power(omega, m));
    volume_ = flat_volume(n).top();
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          basis_.push_back(wedge(PointForm::dz(n, k), wedge(PointForm::dz(n, i), PointForm::dzbar(n, j))));
  }

  // One draw of (lambda, dphi, torsion); returns the three quotients for every k <= n-2.
  std::vector<PointwiseSample> draw(CounterRng& rng) const {
    const cplx iu(0.0, 1.0);
    HMat lam = HMat::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) lam(i, i) = std::exp(-3.0 + 6.0 * rng.uniform());
    std::vector<cplx> v(static_cast<std::size_t>(n_)), vbar(v.size());
    const double mag = std::exp(-3.0 + 6.0 * rng.uniform());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = mag * cplx(rng.normal(), rng.normal());
      vbar[i] = std::conj(v[i]);
    }
    PointForm t(n_, 2, 1);
    for (const PointForm& b : basis_) t += b * (iu * cplx(rng.normal(), rng.normal()));
    const double tmax = t.max_abs();
    t = t * cplx(scale_ / tmax);

    const PointForm d = PointForm::one_form(v, false);
    const PointForm dbar = PointForm::one_form(vbar, true);
    const PointForm lhs_head = wedge(dbar * iu, t);
    const PointForm grad_head = wedge(d * iu, dbar);
    const PointForm phi_form = PointForm::from_matrix(lam);

    std::vector<PointwiseSample> out;
    PointForm phi_pow = PointForm::scalar(n_, 1.0);
    for (int k = 0; k <= n_ - 2; ++k) {
      PointwiseSample s;
      s.lhs = std::abs(wedge(wedge(lhs_head, phi_pow), omega_pow_[n_ - k - 2]).top() / volume_);
      s.grad = (wedge(wedge(grad_head, phi_pow), omega_pow_[n_ - k - 1]).top() / volume_).real();
      s.vol = (wedge(phi_pow, omega_pow_[n_ - k]).top() / volume_).real();
      out.push_back(s);
      phi_pow = wedge(phi_pow, phi_form);
    }
    return out;
  }

 private:
  int n_;
  double scale_;
  std::vector<PointForm> omega_pow_;
  std::vector<PointForm> basis_;
  cplx volume_;
};

}  // namespace

PointwiseResult pointwise_ineq_sample(int n, long trials, double eps, std::uint64_t seed, long validation,
                                      double torsion_scale) {
  if (n != 2 && n != 3) throw std::invalid_argument("pointwise_ineq_sample: n must be 2 or 3");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("pointwise_ineq_sample: eps must lie in (0,1]");
  if (trials < 1 || validation < 0) throw std::invalid_argument("pointwise_ineq_sample: sample counts must be positive");
  const PointwiseSampler sampler(n, torsion_scale);
  PointwiseResult r;
  r.n = n;
  r.eps = eps;
  r.torsion_scale = torsion_scale;
  r.calibration_samples = trials;
  r.validation_samples = validation;
  r.levels.resize(static_cast<std::size_t>(n - 1));
  for (int k = 0; k <= n - 2; ++k) r.levels[static_cast<std::size_t>(k)].k = k;

  for (long s = 0; s < trials; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    const auto samples = sampler.draw(rng);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const PointwiseSample& x = samples[k];
      PointwiseLevel& l = r.levels[k];
      l.calibrated_c = std::max(l.calibrated_c, x.lhs / (x.grad / eps + eps * x.vol));
      // sup over eps' in (0,1] of lhs / (grad/eps' + eps' vol)
      const double need = x.grad <= x.vol ? x.lhs / (2.0 * std::sqrt(x.grad * x.vol)) : x.lhs / (x.grad + x.vol);
      if (std::isfinite(need)) l.uniform_c = std::max(l.uniform_c, need);
    }
  }
  for (long s = 0; s < validation; ++s) {
    CounterRng rng(seed, (1ull << 40) + static_cast<std::uint64_t>(s));
    const auto samples = sampler.draw(rng);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const PointwiseSample& x = samples[k];
      PointwiseLevel& l = r.levels[k];
      const double c = 2.0 * l.calibrated_c;
      const double rhs = (c / eps) * x.grad + eps * c * x.vol;
      const double ratio = rhs > 0.0 ? x.lhs / rhs : (x.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      l.validation_max = std::max(l.validation_max, ratio);
      if (ratio > 1.0) ++l.violations;
    }
  }
  return r;
}

InductionLedger induction_ledger(const ScalarField& phi, const HermitianField& metric, double p) {
  require_same_grid(phi.grid(), metric.grid());
  const int n = metric.dim();
  const HermitianField gphi = metric + ddbar(phi);
  require_positive_definite(gphi, "induction_ledger: omega_phi");
  const HermitianField pairing = gradient_pairing(phi);
  const Measure vol = volume_measure(metric);
  const ScalarField h2 = shifted_exp(phi, p);

  InductionLedger r;
  r.p = p;
  r.log_scale = -p * inf(phi);
  const auto record = [&](const ScalarField& q) {
    if (inf(q) < -1e-12 * std::max(1.0, sup_abs(q))) r.nonnegative = false;
    return integrate(h2 * q, vol);
  };
  for (int k = 0; k <= n; ++k) {
    std::vector<WedgeFactor> f;
    if (k > 0) f.push_back({gphi, k});
    if (n - k > 0) f.push_back({metric, n - k});
    r.I.push_back(record(wedge_quotient(f, metric)));
  }
  for (int k = 0; k <= n - 1; ++k) {
    std::vector<WedgeFactor> f{{pairing, 1}};
    if (k > 0) f.push_back({gphi, k});
    if (n - k - 1 > 0) f.push_back({metric, n - k - 1});
    r.G.push_back(record(wedge_quotient(f, metric)));
  }
  for (double g : r.G) r.alpha_sum += g;
  r.c_n = p / std::pow(2.0, n - 1) * r.alpha_sum / r.I[0];
  return r;
}

bool MoserProfile::holds() const { return ratio <= std::exp(log_bound) * (1.0 + 1e-12); }

MoserProfile moser_profile(const ScalarField& phi, const HermitianField& metric, double p0, int levels) {
  if (!(p0 >= 1.0)) throw std::invalid_argument("moser_profile: p0 must be >= 1");
  if (levels < 3) throw std::invalid_argument("moser_profile: levels must be >= 3");
  require_same_grid(phi.grid(), metric.grid());
  const int n = metric.dim();
  const Measure mu = normalized(volume_measure(metric));
  const double lo = inf(phi);
  const ScalarField e = map(phi, [lo](double v) { return std::exp(-(v - lo)); });

  MoserProfile r;
  r.beta = static_cast<double>(n) / (n - 1);
  r.sup_value = std::exp(-lo);
  for (int j = 0; j <= levels; ++j) {
    const double p = p0 * std::pow(r.beta, j);
    r.p.push_back(p);
    r.norms.push_back(r.sup_value * lp_norm(e, p, mu));
  }
  for (std::size_t j = 0; j + 1 < r.norms.size(); ++j) {
    if (r.norms[j + 1] < r.norms[j] * (1.0 - 1e-13)) r.monotone = false;
    const double c = std::exp(r.p[j] * std::log(r.norms[j + 1] / r.norms[j])) / r.p[j];
    r.fitted_c = std::max(r.fitted_c, c);
  }
  // sum_j log(C p0 beta^j) / (p0 beta^j) in closed form.
  const double q = 1.0 / r.beta;
  const double s0 = 1.0 / (1.0 - q);
  const double s1 = q / ((1.0 - q) * (1.0 - q));
  r.log_bound = (std::log(r.fitted_c * p0) * s0 + std::log(r.beta) * s1) / p0;
  r.ratio = r.sup_value / r.norms[0];
  return r;
}

MeasureBound measure_bound_check(const ScalarField& f, const Measure& m) {
  require_same_grid(f.grid(), m.grid());
  const double lo = inf(f);
  const ScalarField e = map(f, [lo](double v) { return std::exp(-(v - lo)); });
  MeasureBound r;
  r.c1 = -std::log(integrate(e, m) / m.total_mass());
  r.threshold = lo + r.c1 + 1.0;
  r.measure = sublevel_measure(f, r.threshold, m);
  r.bound = std::exp(-r.c1) / 4.0;
  r.pass = r.measure >= r.bound;
  return r;
}

SublevelCertificate sublevel_certificate(const ScalarField& phi, const HermitianField& metric, double p0) {
  SublevelCertificate r;
  r.p0 = p0;
  r.bound = measure_bound_check(p0 * phi, normalized(volume_measure(metric)));
  r.c = (r.bound.c1 + 1.0) / p0;
  r.delta = r.bound.measure;
  return r;
}

ScalarField trace_field(const ScalarField& phi, const HermitianField& metric) {
  return trace_with(metric, metric + ddbar(phi));
}

TraceEstimate trace_estimate(const ScalarField& phi, const HermitianField& metric, const std::vector<double>& a_list,
                             double ceiling) {
  const ScalarField tr = trace_field(phi, metric);
  const ScalarField psi = phi - inf(phi);
  TraceEstimate r;
  r.ceiling = ceiling;
  r.sup_trace = sup(tr);
  for (double a : a_list) {
    const double c = sup(tr * map(psi, [a](double v) { return std::exp(-a * v); }));
    r.a.push_back(a);
    r.c.push_back(c);
    if (c <= ceiling) r.pass = true;
  }
  return r;
}

PsiChecks psi_checks(const ScalarField& phi, const HermitianField& metric, const ScalarField& u,
                     const std::vector<double>& p_list) {
  require_same_grid(phi.grid(), u.grid());
  const ScalarField psi = phi - inf(phi);
  const ScalarField eu = map(u, [](double v) { return std::exp(v); });
  const ScalarField emu = map(u, [](double v) { return std::exp(-v); });
  const HermitianField mg = metric.scaled(eu);
  const ScalarField lap_g = chern_laplacian(psi, mg);
  const ScalarField lap = emu * chern_laplacian(psi, metric);
  const Measure vol = volume_measure(mg);
  const ScalarField grad = gradient_norm_sq(psi, mg);

  PsiChecks r;
  r.conformal_identity_error = sup_abs(lap_g - lap);
  r.c0 = -inf(lap_g);
  for (double p : p_list) {
    const double half = 0.5 * (p + 1.0);
    const double lhs = half * half * integrate(map(psi, [p](double v) { return std::pow(v, p - 1.0); }) * grad, vol);
    const double rhs = p * integrate(map(psi, [p](double v) { return std::pow(v, p); }), vol);
    r.p.push_back(p);
    r.psi1_lhs.push_back(lhs);
    r.psi1_rhs.push_back(rhs);
    if (rhs > 0.0) r.c1 = std::max(r.c1, lhs / rhs);
  }
  r.c2 = sup(psi) / std::max(integrate(psi, vol), 1.0);
  return r;
}

PoincareResult poincare_check(const ScalarField& psi, const HermitianField& gauduchon_metric) {
  const Measure vol = volume_measure(gauduchon_metric);
  PoincareResult r;
  r.mean = integrate(psi, vol) / vol.total_mass();
  const ScalarField dev = psi - r.mean;
  r.lhs = std::sqrt(integrate(dev * dev, vol));
  r.energy = integrate(gradient_norm_sq(psi, gauduchon_metric), vol);
  r.ratio = r.energy > 0.0 ? r.lhs / std::sqrt(r.energy) : 0.0;
  return r;
}

double ricci_identity_check(const ScalarField& phi, double /*b*/, const ScalarField& f, const HermitianField& metric) {
  const HermitianField lhs = ricci_form(metric + ddbar(phi)) - ricci_form(metric);
  return sup_entries(lhs + ddbar(f).scaled(1.0 / kTwoPi));
}

BFormula b_formula_check(const HermitianField& metric, const ScalarField& f, double b) {
  const Measure vol = volume_measure(metric);
  const double hi = sup(f);
  const double log_ef = hi + std::log(integrate(map(f, [hi](double v) { return std::exp(v - hi); }), vol));
  BFormula r;
  r.predicted = std::log(vol.total_mass()) - log_ef;
  r.deviation = std::abs(b - r.predicted);
  r.condition_holds = classify_metric(metric).condition_k12();
  return r;
}

// ---- report ----

const CheckResult* DiagnosticsReport::find(const std::string& name) const {
  for (const CheckResult& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool DiagnosticsReport::theorem_checks_pass() const {
  for (const CheckResult& c : checks)
    if (c.theorem_backed && !c.pass) return false;
  return true;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "lemma1_ratio", "pointwise_inequality", "induction_ledger", "moser_profile", "measure_bound",  "sublevel_certificate",
      "trace_estimate", "psi_checks",         "poincare",         "ricci_identity", "b_formula"};
  return names;
}

DiagnosticsReport run_diagnostics(const DiagnosticsInput& in, const DiagnosticsOptions& opts,
                                  const std::vector<std::string>& only) {
  const auto& names = check_names();
  for (const std::string& s : only) {
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw std::invalid_argument("unknown check '" + s + "'");
    }
  }
  const auto enabled = [&](const std::string& s) {
    return only.empty() || std::find(only.begin(), only.end(), s) != only.end();
  };
  const int n = in.metric.dim();
  std::optional<ScalarField> u = in.u;
  const auto gauduchon_u = [&]() -> const ScalarField& {
    if (!u) u = solve_gauduchon(in.metric).u;
    return *u;
  };

  DiagnosticsReport rep;
  for (const std::string& name : names) {
    if (!enabled(name)) continue;
    CheckResult c;
    c.name = name;
    if (name == "lemma1_ratio") {
      const Lemma1Result r = lemma1_ratio(in.phi, in.metric, opts.lemma1_p);
      c.values["empirical_c"] = r.empirical_c;
      c.values["route_gap"] = r.max_route_gap;
      c.values["p_max"] = r.p.empty() ? 0.0 : r.p.back();
      for (std::size_t i = 0; i < r.p.size(); ++i) c.values["q_p" + std::to_string(static_cast<int>(r.p[i]))] = r.q[i];
      c.tolerances["route_gap"] = opts.identity_tol;
      c.samples = static_cast<long>(r.p.size());
      c.pass = r.finite && r.max_route_gap <= opts.identity_tol;
    } else if (name == "pointwise_inequality") {
      const PointwiseResult r =
          pointwise_ineq_sample(n, opts.pointwise_trials, opts.pointwise_eps, opts.seed, opts.pointwise_trials);
      for (const PointwiseLevel& l : r.levels) {
        const std::string k = std::to_string(l.k);
        c.values["c_k" + k] = l.calibrated_c;
        c.values["uniform_c_k" + k] = l.uniform_c;
        c.values["validation_max_k" + k] = l.validation_max;
        c.values["violations_k" + k] = static_cast<double>(l.violations);
      }
      c.values["eps"] = r.eps;
      c.samples = r.calibration_samples + r.validation_samples;
      c.pass = r.pass();
    } else if (name == "induction_ledger") {
      const InductionLedger r = induction_ledger(in.phi, in.metric, opts.induction_p);
      c.values["p"] = r.p;
      c.values["log_scale"] = r.log_scale;
      for (std::size_t k = 0; k < r.I.size(); ++k) c.values["I" + std::to_string(k)] = r.I[k];
      for (std::size_t k = 0; k < r.G.size(); ++k) c.values["G" + std::to_string(k)] = r.G[k];
      c.values["c_n"] = r.c_n;
      c.pass = r.nonnegative && std::isfinite(r.c_n);
    } else if (name == "moser_profile") {
      const double beta = static_cast<double>(n) / (n - 1);
      const int levels = std::max(3, static_cast<int>(std::ceil(std::log(opts.moser_pmax / opts.moser_p0) / std::log(beta) - 1e-9)));
      const MoserProfile r = moser_profile(in.phi, in.metric, opts.moser_p0, levels);
      c.values["beta"] = r.beta;
      c.values["fitted_c"] = r.fitted_c;
      c.values["log_bound"] = r.log_bound;
      c.values["ratio"] = r.ratio;
      c.values["p_max"] = r.p.back();
      c.values["top_norm_gap"] = std::abs(r.norms.back() - r.sup_value) / r.sup_value;
      c.tolerances["top_norm_gap"] = 0.05;
      c.samples = static_cast<long>(r.p.size());
      c.pass = r.monotone && r.holds() && c.values["top_norm_gap"] <= 0.05;
    } else if (name == "measure_bound") {
      const MeasureBound r = measure_bound_check(opts.sublevel_p0 * in.phi, normalized(volume_measure(in.metric)));
      c.theorem_backed = true;
      c.values["c1"] = r.c1;
      c.values["measure"] = r.measure;
      c.values["bound"] = r.bound;
      c.pass = r.pass;
    } else if (name == "sublevel_certificate") {
      const SublevelCertificate r = sublevel_certificate(in.phi, in.metric, opts.sublevel_p0);
      c.values["p0"] = r.p0;
      c.values["c"] = r.c;
      c.values["delta"] = r.delta;
      c.pass = r.delta >= r.bound.bound && r.delta <= 1.0;
    } else if (name == "trace_estimate") {
      const TraceEstimate r = trace_estimate(in.phi, in.metric, opts.trace_a, opts.trace_ceiling);
      c.values["sup_trace"] = r.sup_trace;
      for (std::size_t i = 0; i < r.a.size(); ++i) c.values["c_a" + std::to_string(static_cast<int>(r.a[i]))] = r.c[i];
      c.tolerances["ceiling"] = r.ceiling;
      c.pass = r.pass;
    } else if (name == "psi_checks") {
      const PsiChecks r = psi_checks(in.phi, in.metric, gauduchon_u());
      c.values["conformal_identity_error"] = r.conformal_identity_error;
      c.values["c0"] = r.c0;
      c.values["c1"] = r.c1;
      c.values["c2"] = r.c2;
      c.tolerances["conformal_identity_error"] = opts.identity_tol;
      c.pass = r.conformal_identity_error <= opts.identity_tol;
    } else if (name == "poincare") {
      const ScalarField& uu = gauduchon_u();
      const HermitianField mg = in.metric.scaled(map(uu, [](double v) { return std::exp(v); }));
      const PoincareResult r = poincare_check(in.phi - inf(in.phi), mg);
      c.values["mean"] = r.mean;
      c.values["lhs"] = r.lhs;
      c.values["energy"] = r.energy;
      c.values["ratio"] = r.ratio;
      c.pass = std::isfinite(r.ratio);
    } else if (name == "ricci_identity") {
      const double res = ricci_identity_check(in.phi, in.b, in.f, in.metric);
      c.theorem_backed = true;
      c.values["residual"] = res;
      c.tolerances["residual"] = std::max(10.0 * opts.solve_residual_tol, 1e-8);
      c.pass = res <= c.tolerances["residual"];
    } else if (name == "b_formula") {
      const BFormula r = b_formula_check(in.metric, in.f, in.b);
      c.values["b"] = in.b;
      c.values["predicted"] = r.predicted;
      c.values["deviation"] = r.deviation;
      c.values["condition_holds"] = r.condition_holds ? 1.0 : 0.0;
      c.theorem_backed = r.condition_holds;
      c.tolerances["deviation"] = opts.b_formula_tol;
      c.pass = !r.condition_holds || r.deviation <= opts.b_formula_tol;
      if (!r.condition_holds) c.note = "metric violates dd^c omega^k = 0 (k=1,2); deviation reported only";
    }
    rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace hma
