#include "hma/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace hma {

namespace {

// FFTW's planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  explicit FftPlan(const TorusGrid& grid) : count_(grid.point_count()) {
    buffer_ = fftw_alloc_complex(count_);
    std::vector<int> dims(grid.sizes().begin(), grid.sizes().end());
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buffer_, buffer_, FFTW_FORWARD,
                             FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buffer_, buffer_, FFTW_BACKWARD,
                              FFTW_ESTIMATE);
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buffer_); }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// One plan (and work buffer) per grid shape per thread.
FftPlan& plan_for(const TorusGrid& grid) {
  thread_local std::map<std::vector<int>, std::unique_ptr<FftPlan>> cache;
  std::vector<int> key(grid.sizes().begin(), grid.sizes().end());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<FftPlan>(grid)).first;
  return *it->second;
}

void check_axis(const TorusGrid& grid, int j) {
  if (j < 0 || j >= grid.dim()) {
    throw std::out_of_range("complex axis " + std::to_string(j) + " out of range");
  }
}

}  // namespace

Wavevector wavevector(const TorusGrid& grid, std::size_t mode) {
  const AxisIndex idx = grid.multi_index(mode);
  Wavevector w;
  for (int a = 0; a < grid.axes(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const int s = grid.size(a);
    const int i = idx[ua];
    w.nyquist[ua] = (2 * i == s);
    w.k[ua] = (2 * i <= s) ? i : i - s;
  }
  return w;
}

std::vector<cplx> fft_forward(const TorusGrid& grid, std::span<const cplx> values) {
  FftPlan& plan = plan_for(grid);
  std::copy(values.begin(), values.end(), plan.data());
  plan.forward();
  return {plan.data(), plan.data() + plan.count()};
}

std::vector<cplx> fft_forward(const TorusGrid& grid, std::span<const double> values) {
  FftPlan& plan = plan_for(grid);
  cplx* d = plan.data();
  for (std::size_t i = 0; i < values.size(); ++i) d[i] = values[i];
  plan.forward();
  return {plan.data(), plan.data() + plan.count()};
}

std::vector<cplx> fft_inverse(const TorusGrid& grid, std::span<const cplx> spectrum) {
  FftPlan& plan = plan_for(grid);
  std::copy(spectrum.begin(), spectrum.end(), plan.data());
  plan.backward();
  const double scale = 1.0 / static_cast<double>(plan.count());
  std::vector<cplx> out(plan.data(), plan.data() + plan.count());
  for (cplx& v : out) v *= scale;
  return out;
}

namespace {

// kappa_j = k_{2j} - i k_{2j+1}; d/dz^j -> (i/2) kappa_j, d/dzbar^j -> (i/2) conj(kappa_j).
cplx kappa(const Wavevector& w, int j, bool drop_nyquist) {
  const auto x = static_cast<std::size_t>(2 * j);
  const auto y = x + 1;
  const double kx = (drop_nyquist && w.nyquist[x]) ? 0.0 : w.k[x];
  const double ky = (drop_nyquist && w.nyquist[y]) ? 0.0 : w.k[y];
  return {kx, -ky};
}

}  // namespace

cplx partial_symbol(const Wavevector& w, int j, bool conjugate) {
  const cplx kap = kappa(w, j, true);
  return cplx(0.0, 0.5) * (conjugate ? std::conj(kap) : kap);
}

cplx ddbar_symbol(const Wavevector& w, int i, int j) {
  if (i == j) return -0.25 * std::norm(kappa(w, i, false));
  return -0.25 * kappa(w, i, true) * std::conj(kappa(w, j, true));
}

double contracted_ddbar_symbol(const Wavevector& w, int n, std::span<const cplx> coeff) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += (coeff[static_cast<std::size_t>(i * n + i)] * ddbar_symbol(w, i, i)).real();
    for (int j = i + 1; j < n; ++j) {
      // coeff(j,i) sym(i,j) + coeff(i,j) sym(j,i) = 2 Re(coeff(j,i) sym(i,j)) for Hermitian coeff.
      s += 2.0 * (coeff[static_cast<std::size_t>(j * n + i)] * ddbar_symbol(w, i, j)).real();
    }
  }
  return s;
}

std::vector<cplx> partial_symbol_table(const TorusGrid& grid, int j, bool conjugate) {
  check_axis(grid, j);
  return tabulate_symbol(grid, [&](const Wavevector& w) { return partial_symbol(w, j, conjugate); });
}

std::vector<cplx> ddbar_symbol_table(const TorusGrid& grid, int i, int j) {
  check_axis(grid, i);
  check_axis(grid, j);
  return tabulate_symbol(grid, [&](const Wavevector& w) { return ddbar_symbol(w, i, j); });
}

ComplexField apply_multiplier(const ComplexField& f, std::span<const cplx> symbol) {
  const TorusGrid& grid = f.grid();
  std::vector<cplx> spec = fft_forward(grid, f.values());
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= symbol[m];
  return ComplexField(grid, fft_inverse(grid, spec));
}

ComplexField spectral_partial(const ComplexField& f, int j, bool conjugate) {
  const TorusGrid& grid = f.grid();
  check_axis(grid, j);
  std::vector<cplx> spec = fft_forward(grid, f.values());
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= partial_symbol(wavevector(grid, m), j, conjugate);
  return ComplexField(grid, fft_inverse(grid, spec));
}

ComplexField spectral_partial(const ScalarField& f, int j, bool conjugate) {
  return spectral_partial(to_complex(f), j, conjugate);
}

ComplexField spectral_ddbar_component(const ComplexField& f, int i, int j) {
  const TorusGrid& grid = f.grid();
  check_axis(grid, i);
  check_axis(grid, j);
  std::vector<cplx> spec = fft_forward(grid, f.values());
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= ddbar_symbol(wavevector(grid, m), i, j);
  return ComplexField(grid, fft_inverse(grid, spec));
}

}  // namespace hma
