#include "hma/gauduchon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hma/forms.hpp"
#include "hma/krylov.hpp"
#include "hma/spectral.hpp"

namespace hma {

namespace {

unsigned dz_bit(int j) { return 1u << (2 * j); }
unsigned dzbar_bit(int j) { return 1u << (2 * j + 1); }

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

cplx i_pow(int n) {
  static const cplx table[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  return table[n % 4];
}

}  // namespace

GauduchonOperator::GauduchonOperator(const HermitianField& metric) : grid_(metric.grid()) {
  const int n = grid_.dim();
  const auto& masks = bidegree_masks(n, n - 1, n - 1);
  const FormField power = FormField::from_points(grid_, n - 1, n - 1, [&](std::size_t p) {
    return wedge_power(PointForm::from_matrix(metric.at(p)), n - 1);
  });
  const unsigned top = (1u << (2 * n)) - 1u;
  const cplx scale = cplx(0, 1) / (factorial(n) * i_pow(n));
  flat_symbol_.assign(grid_.point_count(), 0.0);
  std::vector<cplx> flat(grid_.point_count(), 0.0);
  for (std::size_t s = 0; s < masks.size(); ++s) {
    const unsigned rest = top & ~masks[s];
    int c = -1, d = -1;
    for (int j = 0; j < n; ++j) {
      if (rest & dz_bit(j)) c = j;
      if (rest & dzbar_bit(j)) d = j;
    }
    const int sign = wedge_sign(dz_bit(c), dzbar_bit(d)) * wedge_sign(dz_bit(c) | dzbar_bit(d), masks[s]);
    std::vector<cplx> table = ddbar_symbol_table(grid_, c, d);
    for (cplx& v : table) v *= scale * static_cast<double>(sign);

    const ComplexField& coeff = power.coefficient(s);
    std::vector<double> re(coeff.size()), im(coeff.size());
    for (std::size_t p = 0; p < coeff.size(); ++p) {
      re[p] = coeff[p].real();
      im[p] = coeff[p].imag();
    }
    const cplx avg = cplx(pairwise_sum(re), pairwise_sum(im)) / static_cast<double>(coeff.size());
    for (std::size_t m = 0; m < table.size(); ++m) flat[m] += table[m] * avg;

    coeffs_.push_back(coeff);
    symbols_.push_back(std::move(table));
  }
  for (std::size_t m = 0; m < flat.size(); ++m) flat_symbol_[m] = flat[m].real();
}

void GauduchonOperator::apply(std::span<const double> w, std::span<double> out) const {
  const std::size_t count = grid_.point_count();
  std::vector<cplx> acc(count, 0.0), prod(count);
  for (std::size_t s = 0; s < coeffs_.size(); ++s) {
    for (std::size_t p = 0; p < count; ++p) prod[p] = w[p] * coeffs_[s][p];
    const std::vector<cplx> spec = fft_forward(grid_, prod);
    const auto& table = symbols_[s];
    for (std::size_t m = 0; m < count; ++m) acc[m] += table[m] * spec[m];
  }
  const std::vector<cplx> back = fft_inverse(grid_, acc);
  for (std::size_t p = 0; p < count; ++p) out[p] = back[p].real();
}

ScalarField GauduchonOperator::apply(const ScalarField& w) const {
  require_same_grid(w.grid(), grid_);
  ScalarField out(grid_);
  apply(w.values(), out.values());
  return out;
}

ScalarField gauduchon_defect(const ScalarField& w, const HermitianField& metric) {
  require_same_grid(w.grid(), metric.grid());
  for (std::size_t p = 0; p < w.size(); ++p) {
    if (!(w[p] > 0.0)) throw std::invalid_argument("gauduchon_defect: w must be positive (point " + std::to_string(p) + ")");
  }
  return GauduchonOperator(metric).apply(w);
}

namespace {

// (P + J) with J w = mean(w), and its constant-coefficient approximation.
struct ShiftedSystem {
  const GauduchonOperator& op;
  std::vector<double> precond;

  explicit ShiftedSystem(const GauduchonOperator& o) : op(o), precond(o.flat_symbol()) {
    double largest = 0.0;
    for (double v : precond) largest = std::max(largest, std::abs(v));
    if (largest == 0.0) largest = 1.0;
    for (double& v : precond) {
      if (std::abs(v) < 1e-14 * largest) v = -largest;
    }
    precond[0] = 1.0;
  }

  void apply(std::span<const double> x, std::span<double> y) const {
    op.apply(x, y);
    const double m = pairwise_sum(x) / static_cast<double>(x.size());
    for (double& v : y) v += m;
  }

  void precondition(std::span<const double> r, std::span<double> z) const {
    std::vector<cplx> spec = fft_forward(op.grid(), r);
    for (std::size_t m = 0; m < spec.size(); ++m) spec[m] /= precond[m];
    const std::vector<cplx> back = fft_inverse(op.grid(), spec);
    for (std::size_t p = 0; p < z.size(); ++p) z[p] = back[p].real();
  }

  GmresResult solve(std::span<const double> rhs, std::span<double> x, const GauduchonOptions& opts) const {
    GmresOptions go;
    go.relative_tol = opts.krylov_tol;
    go.restart = opts.krylov_restart;
    go.max_iterations = opts.krylov_max_iters;
    std::fill(x.begin(), x.end(), 0.0);
    return gmres([this](auto a, auto b) { apply(a, b); }, [this](auto a, auto b) { precondition(a, b); }, rhs, x, go);
  }
};

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

GauduchonResult kernel_vector(const GauduchonOperator& op, const GauduchonOptions& opts) {
  const TorusGrid& grid = op.grid();
  const std::size_t count = grid.point_count();
  const ShiftedSystem sys(op);
  GauduchonResult res;

  // Defect correction from w = 1: w <- w + dw with (P + J) dw = -P w. Because
  // P maps into mean-zero fields, each correction keeps mean(w) = 1 and, for an
  // exact inner solve, lands on the kernel.
  std::vector<double> x(count, 1.0), y(count), px(count), rhs(count);
  bool settled = false;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    op.apply(x, px);
    res.residual = sup_abs(px) / sup_abs(x);
    if (res.residual <= opts.tol) {
      settled = true;
      break;
    }
    if (it == opts.max_iterations) break;
    for (std::size_t p = 0; p < count; ++p) rhs[p] = -px[p];
    const GmresResult gr = sys.solve(rhs, y, opts);
    res.krylov_iters += gr.iterations;
    res.iterations = it + 1;
    if (!gr.converged) {
      throw GauduchonError("Gauduchon kernel solve: Krylov iteration stalled at relative residual " +
                           std::to_string(gr.relative_residual));
    }
    for (std::size_t p = 0; p < count; ++p) x[p] += y[p];
  }
  if (!settled) {
    throw GauduchonError("Gauduchon kernel solve did not settle; residual " + std::to_string(res.residual));
  }
  for (std::size_t p = 0; p < count; ++p) {
    if (!(x[p] > 0.0)) throw GauduchonError("Gauduchon kernel vector changes sign at point " + std::to_string(p));
  }

  // Probe for a second kernel direction: inverse iteration on the complement of w.
  double smallest_flat = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m < count; ++m) {
    const double v = std::abs(op.flat_symbol()[m]);
    if (v > 0.0) smallest_flat = std::min(smallest_flat, v);
  }
  if (!std::isfinite(smallest_flat)) smallest_flat = 1.0;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  std::vector<double> z(count), az(count);
  for (double& v : z) v = nd(rng);
  double ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= opts.degeneracy_probes; ++k) {
    const double mz = pairwise_sum(z) / static_cast<double>(count);
    for (std::size_t p = 0; p < count; ++p) z[p] -= mz * x[p];
    const double nz = sup_abs(z);
    for (double& v : z) v /= nz;
    sys.apply(z, az);
    ratio = std::min(ratio, sup_abs(az));
    if (k == opts.degeneracy_probes) break;
    const GmresResult gr = sys.solve(z, y, opts);
    res.krylov_iters += gr.iterations;
    if (!gr.converged) {
      throw KernelDegeneracyError("Gauduchon operator is singular on the complement of its kernel vector", 0.0);
    }
    z = y;
  }
  res.complement_ratio = ratio / smallest_flat;
  if (res.complement_ratio < opts.degeneracy_threshold) {
    throw KernelDegeneracyError("Gauduchon operator has a second near-null vector (ratio " +
                                    std::to_string(res.complement_ratio) + ")",
                                res.complement_ratio);
  }

  res.w = ScalarField(grid, x);
  const int n = grid.dim();
  res.u = map(res.w, [n](double v) { return std::log(v) / (n - 1); });
  res.u = res.u - sup(res.u);
  return res;
}

GauduchonResult solve_gauduchon(const HermitianField& metric, const GauduchonOptions& opts) {
  require_positive_definite(metric, "solve_gauduchon: metric");
  return kernel_vector(GauduchonOperator(metric), opts);
}

MetricClass classify_metric(const HermitianField& metric, double threshold) {
  const TorusGrid& grid = metric.grid();
  const int n = grid.dim();
  MetricClass c;
  c.threshold = threshold;
  const FormField omega = FormField::kahler_form(metric);
  c.d_omega = std::max(partial(omega).sup_norm(), partial_bar(omega).sup_norm());
  c.ddbar_omega = ddbar(omega).sup_norm();
  const FormField omega2 = wedge(omega, omega);
  c.ddbar_omega2 = (n >= 3) ? ddbar(omega2).sup_norm() : 0.0;
  if (n == 2) {
    c.d_omega_n1 = c.d_omega;
    c.ddbar_omega_n1 = c.ddbar_omega;
  } else {
    c.d_omega_n1 = std::max(partial(omega2).sup_norm(), partial_bar(omega2).sup_norm());
    c.ddbar_omega_n1 = c.ddbar_omega2;
  }
  return c;
}

}  // namespace hma
