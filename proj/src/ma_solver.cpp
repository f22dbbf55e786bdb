#include "hma/ma_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "hma/krylov.hpp"
#include "hma/spectral.hpp"

namespace hma {

void SolveOptions::validate() const {
  if (max_newton_iters <= 0) throw std::invalid_argument("max_newton_iters must be positive");
  if (!(residual_tol > 0.0)) throw std::invalid_argument("residual_tol must be positive");
  if (!(krylov_tol > 0.0)) throw std::invalid_argument("krylov_tol must be positive");
  if (krylov_restart <= 0 || krylov_max_iters <= 0) throw std::invalid_argument("krylov limits must be positive");
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("damping must lie in (0,1)");
  if (!(min_step > 0.0 && min_step <= 1.0)) throw std::invalid_argument("min_step must lie in (0,1]");
  if (!(positivity_floor > 0.0)) throw std::invalid_argument("positivity_floor must be positive");
  if (continuity_steps < 1) throw std::invalid_argument("continuity_steps must be >= 1");
}

std::vector<double> SolveReport::residual_history() const {
  std::vector<double> r;
  r.reserve(history.size());
  for (const auto& h : history) r.push_back(h.residual);
  return r;
}

namespace {

// Precomputed metric data and spectral tables shared by every Newton iteration.
class MongeAmpereSystem {
 public:
  explicit MongeAmpereSystem(const HermitianField& metric)
      : metric_(metric), grid_(metric.grid()), n_(grid_.dim()), logdet_(grid_) {
    for (std::size_t p = 0; p < grid_.point_count(); ++p) {
      const double d = determinant(metric.at(p)).real();
      if (!(d > 0.0)) throw PositivityError("metric has nonpositive determinant", p, d);
      logdet_[p] = std::log(d);
    }
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) tables_.push_back(ddbar_symbol_table(grid_, i, j));
  }

  const TorusGrid& grid() const { return grid_; }
  int dim() const { return n_; }

  HermitianField hessian(std::span<const double> f) const {
    const std::vector<cplx> spec = fft_forward(grid_, f);
    HermitianField out(grid_);
    std::vector<cplx> work(spec.size());
    std::size_t t = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j, ++t) {
        const auto& table = tables_[t];
        for (std::size_t m = 0; m < spec.size(); ++m) work[m] = spec[m] * table[m];
        const std::vector<cplx> c = fft_inverse(grid_, work);
        for (std::size_t p = 0; p < c.size(); ++p) {
          if (i == j) {
            out.entry(p, i, i) = c[p].real();
          } else {
            out.entry(p, i, j) = c[p];
            out.entry(p, j, i) = std::conj(c[p]);
          }
        }
      }
    return out;
  }

  // g + H at every point.
  HMat phi_metric(const HermitianField& h, std::size_t p, double s = 1.0, const HermitianField* dh = nullptr,
                  double ds = 0.0) const {
    HMat a = metric_.at(p) + s * h.at(p);
    if (dh) a += ds * dh->at(p);
    return a;
  }

  // Positivity margin and residual for g + H; returns margin, fills residual only
  // when the margin is positive.
  double evaluate(const HermitianField& h, const HermitianField* dh, double ds, double b, const ScalarField& f,
                  ScalarField& residual, std::size_t* worst = nullptr) const {
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < grid_.point_count(); ++p) {
      const HMat a = phi_metric(h, p, 1.0, dh, ds);
      const double e = min_eigenvalue(a);
      if (e < margin) {
        margin = e;
        if (worst) *worst = p;
      }
      if (e > 0.0) residual[p] = std::log(determinant(a).real()) - logdet_[p] - f[p] - b;
    }
    return margin;
  }

  // Linearization at g_phi = g + H: y -> tr(g_phi^{-1} H(y)) - mean(y), the mean
  // slot carrying -db. Preconditioned by the same operator with the inverse
  // metric replaced by its flat average.
  struct Linearization {
    std::vector<cplx> inv;  // g_phi^{-1}, n*n per point
    std::vector<cplx> precond_symbol;
  };

  Linearization linearize(const HermitianField& h) const {
    Linearization lin;
    const std::size_t nn = static_cast<std::size_t>(n_ * n_);
    lin.inv.resize(grid_.point_count() * nn);
    std::vector<double> sums_re(nn * grid_.point_count()), sums_im(nn * grid_.point_count());
    for (std::size_t p = 0; p < grid_.point_count(); ++p) {
      const HMat ginv = inverse(phi_metric(h, p));
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          const std::size_t e = static_cast<std::size_t>(i * n_ + j);
          lin.inv[p * nn + e] = ginv(i, j);
          sums_re[e * grid_.point_count() + p] = ginv(i, j).real();
          sums_im[e * grid_.point_count() + p] = ginv(i, j).imag();
        }
    }
    std::vector<cplx> avg(nn);
    const auto count = static_cast<double>(grid_.point_count());
    for (std::size_t e = 0; e < nn; ++e) {
      const std::span<const double> re(sums_re.data() + e * grid_.point_count(), grid_.point_count());
      const std::span<const double> im(sums_im.data() + e * grid_.point_count(), grid_.point_count());
      avg[e] = cplx(pairwise_sum(re), pairwise_sum(im)) / count;
    }
    lin.precond_symbol = tabulate_symbol(grid_, [&](const Wavevector& w) {
      return cplx(contracted_ddbar_symbol(w, n_, avg), 0.0);
    });
    lin.precond_symbol[0] = -1.0;
    return lin;
  }

  void apply(const Linearization& lin, std::span<const double> y, std::span<double> out) const {
    const std::vector<cplx> spec = fft_forward(grid_, y);
    const std::size_t nn = static_cast<std::size_t>(n_ * n_);
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<cplx> work(spec.size());
    std::size_t t = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j, ++t) {
        const auto& table = tables_[t];
        for (std::size_t m = 0; m < spec.size(); ++m) work[m] = spec[m] * table[m];
        const std::vector<cplx> c = fft_inverse(grid_, work);
        for (std::size_t p = 0; p < c.size(); ++p) {
          if (i == j) {
            out[p] += lin.inv[p * nn + static_cast<std::size_t>(i * n_ + i)].real() * c[p].real();
          } else {
            out[p] += 2.0 * (lin.inv[p * nn + static_cast<std::size_t>(j * n_ + i)] * c[p]).real();
          }
        }
      }
    const double m = pairwise_sum(y) / static_cast<double>(y.size());
    for (double& v : out) v -= m;
  }

  void precondition(const Linearization& lin, std::span<const double> r, std::span<double> out) const {
    std::vector<cplx> spec = fft_forward(grid_, r);
    for (std::size_t m = 0; m < spec.size(); ++m) spec[m] /= lin.precond_symbol[m];
    const std::vector<cplx> y = fft_inverse(grid_, spec);
    for (std::size_t p = 0; p < y.size(); ++p) out[p] = y[p].real();
  }

  NewtonStep step(const HermitianField& h, const ScalarField& residual, const SolveOptions& opts) const {
    const Linearization lin = linearize(h);
    std::vector<double> rhs(residual.size()), y(residual.size(), 0.0);
    for (std::size_t p = 0; p < rhs.size(); ++p) rhs[p] = -residual[p];
    GmresOptions go;
    go.relative_tol = opts.krylov_tol;
    go.restart = opts.krylov_restart;
    go.max_iterations = opts.krylov_max_iters;
    const GmresResult gr = gmres([&](auto x, auto out) { apply(lin, x, out); },
                                 [&](auto x, auto out) { precondition(lin, x, out); }, rhs, y, go);
    // a stalled solve that still cut the linear residual well is a usable inexact direction
    if (!gr.converged && !(gr.relative_residual <= 1e-2)) {
      throw KrylovError("Krylov solve stalled at relative residual " + std::to_string(gr.relative_residual) +
                        " after " + std::to_string(gr.iterations) + " iterations");
    }
    NewtonStep s{ScalarField(grid_), 0.0, gr.iterations};
    const double m = pairwise_sum(y) / static_cast<double>(y.size());
    for (std::size_t p = 0; p < y.size(); ++p) s.delta_phi[p] = y[p] - m;
    s.delta_b = m;
    return s;
  }

 private:
  const HermitianField& metric_;
  TorusGrid grid_;
  int n_;
  ScalarField logdet_;
  std::vector<std::vector<cplx>> tables_;
};

void remove_mean(ScalarField& f) {
  const double m = mean(f);
  for (double& v : f.values()) v -= m;
}

struct StageOutcome {
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  std::string failure;
};

// Newton iterations for one right-hand side; updates phi and b in place.
StageOutcome newton_loop(const MongeAmpereSystem& sys, const ScalarField& f, double tol, int stage,
                         const SolveOptions& opts, ScalarField& phi, double& b, SolveReport& report) {
  StageOutcome out;
  HermitianField h = sys.hessian(phi.values());
  ScalarField residual(sys.grid());
  std::size_t worst = 0;
  double margin = sys.evaluate(h, nullptr, 0.0, b, f, residual, &worst);
  if (!(margin > 0.0)) {
    out.failure = "initial iterate not admissible (min eigenvalue " + std::to_string(margin) + ")";
    return out;
  }
  double rnorm = sup_abs(residual);
  report.history.push_back({0, stage, rnorm, 0.0, margin, 0});
  report.min_eig = margin;

  for (int it = 1; it <= opts.max_newton_iters; ++it) {
    if (rnorm <= tol) break;
    NewtonStep st;
    try {
      st = sys.step(h, residual, opts);
    } catch (const KrylovError& e) {
      out.failure = e.what();
      out.residual = rnorm;
      return out;
    }
    report.krylov_iters_total += st.krylov_iters;
    const HermitianField dh = sys.hessian(st.delta_phi.values());

    ScalarField trial(sys.grid());
    double s = 1.0;
    bool accepted = false;
    double trial_margin = 0.0;
    while (s >= opts.min_step) {
      trial_margin = sys.evaluate(h, &dh, s, b + s * st.delta_b, f, trial);
      if (trial_margin >= opts.positivity_floor && sup_abs(trial) < rnorm) {
        accepted = true;
        break;
      }
      s *= opts.damping;
    }
    if (!accepted) {
      out.failure = "line search stagnated at residual " + std::to_string(rnorm);
      out.residual = rnorm;
      return out;
    }
    for (std::size_t p = 0; p < phi.size(); ++p) phi[p] += s * st.delta_phi[p];
    b += s * st.delta_b;
    h = sys.hessian(phi.values());
    margin = sys.evaluate(h, nullptr, 0.0, b, f, residual);
    rnorm = sup_abs(residual);
    ++report.newton_iters;
    report.history.push_back({it, stage, rnorm, s, margin, st.krylov_iters});
    report.min_eig = margin;
  }
  out.residual = rnorm;
  out.converged = rnorm <= tol;
  if (!out.converged) out.failure = "Newton iteration cap reached at residual " + std::to_string(rnorm);
  return out;
}

}  // namespace

ScalarField ma_residual(const ScalarField& phi, double b, const ScalarField& f, const HermitianField& metric) {
  require_same_grid(phi.grid(), metric.grid());
  require_same_grid(f.grid(), metric.grid());
  const MongeAmpereSystem sys(metric);
  const HermitianField h = sys.hessian(phi.values());
  ScalarField residual(phi.grid());
  std::size_t worst = 0;
  const double margin = sys.evaluate(h, nullptr, 0.0, b, f, residual, &worst);
  if (!(margin > 0.0)) {
    throw PositivityError("g + ddbar(phi) is not positive definite at point " + std::to_string(worst) +
                              " (min eigenvalue " + std::to_string(margin) + ")",
                          worst, margin);
  }
  return residual;
}

NewtonStep newton_step(const ScalarField& phi, double b, const ScalarField& f, const HermitianField& metric,
                       const SolveOptions& opts) {
  opts.validate();
  const ScalarField residual = ma_residual(phi, b, f, metric);
  const MongeAmpereSystem sys(metric);
  if (sup_abs(residual) == 0.0) return {ScalarField(phi.grid()), 0.0, 0};
  return sys.step(sys.hessian(phi.values()), residual, opts);
}

SolveReport solve(const HermitianField& metric, const ScalarField& f, const SolveOptions& opts) {
  opts.validate();
  require_same_grid(f.grid(), metric.grid());
  require_positive_definite(metric, "solve: metric");
  const auto start = std::chrono::steady_clock::now();
  const MongeAmpereSystem sys(metric);

  ScalarField phi0(metric.grid());
  if (opts.initial_guess) {
    require_same_grid(opts.initial_guess->grid(), metric.grid());
    phi0 = *opts.initial_guess;
    remove_mean(phi0);
  }

  std::vector<int> attempts;
  if (opts.continuity_steps > 1) {
    attempts = {opts.continuity_steps};
  } else {
    attempts = {1, 4, 16};
  }

  SolveReport best;
  best.final_residual = std::numeric_limits<double>::infinity();
  int total_newton = 0;
  int total_krylov = 0;
  std::string last_failure;

  for (int stages : attempts) {
    SolveReport rep;
    rep.continuity_stages = stages;
    ScalarField phi = phi0;
    double b = 0.0;
    StageOutcome outcome;
    for (int m = 1; m <= stages; ++m) {
      const double t = static_cast<double>(m) / stages;
      const ScalarField ft = t * f;
      const double tol = (m < stages) ? std::max(opts.residual_tol, 1e-6) : opts.residual_tol;
      outcome = newton_loop(sys, ft, tol, m, opts, phi, b, rep);
      if (!outcome.converged) break;
    }
    total_newton += rep.newton_iters;
    total_krylov += rep.krylov_iters_total;
    rep.final_residual = outcome.residual;
    rep.b = b;
    const double top = sup(phi);
    rep.phi = phi - top;
    if (outcome.converged) {
      rep.converged = true;
      rep.newton_iters = total_newton;
      rep.krylov_iters_total = total_krylov;
      rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return rep;
    }
    last_failure = outcome.failure;
    if (rep.final_residual < best.final_residual || best.history.empty()) best = std::move(rep);
  }
  best.newton_iters = total_newton;
  best.krylov_iters_total = total_krylov;
  best.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  throw ConvergenceError("Monge-Ampere solve did not converge after continuity fallback: " + last_failure,
                         std::move(best));
}

ScalarField manufacture(const HermitianField& metric, const ScalarField& phi_star) {
  return ma_residual(phi_star, 0.0, ScalarField(phi_star.grid()), metric);
}

double positivity_margin(const ScalarField& phi, const HermitianField& metric) {
  require_same_grid(phi.grid(), metric.grid());
  const HermitianField gphi = metric + ddbar(phi);
  return min_eigenvalue(gphi);
}

}  // namespace hma
