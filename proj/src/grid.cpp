#include "hma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hma {

TorusGrid::TorusGrid(int n, std::vector<int> sizes) : n_(n), sizes_(std::move(sizes)) {
  count_ = 1;
  for (int s : sizes_) count_ *= static_cast<std::size_t>(s);
}

TorusGrid TorusGrid::build(int n, std::vector<int> sizes) {
  if (n != 2 && n != 3) {
    throw std::invalid_argument("complex dimension must be 2 or 3, got " + std::to_string(n));
  }
  if (static_cast<int>(sizes.size()) != 2 * n) {
    throw std::invalid_argument("expected " + std::to_string(2 * n) + " axis sizes, got " +
                                std::to_string(sizes.size()));
  }
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    if (sizes[a] < 4) {
      throw std::invalid_argument("axis " + std::to_string(a) + " has size " +
                                  std::to_string(sizes[a]) + " < 4");
    }
    if (sizes[a] % 2 != 0) {
      throw std::invalid_argument("axis " + std::to_string(a) + " has odd size " +
                                  std::to_string(sizes[a]));
    }
  }
  return TorusGrid(n, std::move(sizes));
}

double TorusGrid::total_volume() const { return std::pow(kTwoPi, 2 * n_); }

AxisIndex TorusGrid::multi_index(std::size_t point) const {
  AxisIndex idx{};
  for (int a = axes() - 1; a >= 0; --a) {
    const auto s = static_cast<std::size_t>(sizes_[static_cast<std::size_t>(a)]);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(point % s);
    point /= s;
  }
  return idx;
}

std::size_t TorusGrid::flat_index(const AxisIndex& idx) const {
  std::size_t p = 0;
  for (int a = 0; a < axes(); ++a) {
    const int s = sizes_[static_cast<std::size_t>(a)];
    const int i = ((idx[static_cast<std::size_t>(a)] % s) + s) % s;
    p = p * static_cast<std::size_t>(s) + static_cast<std::size_t>(i);
  }
  return p;
}

std::array<double, kMaxAxes> TorusGrid::position(std::size_t point) const {
  const AxisIndex idx = multi_index(point);
  std::array<double, kMaxAxes> x{};
  for (int a = 0; a < axes(); ++a) x[static_cast<std::size_t>(a)] = coordinate(a, idx[static_cast<std::size_t>(a)]);
  return x;
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

namespace {

constexpr std::size_t kLeaf = 128;

template <class Term>
double pairwise(std::size_t lo, std::size_t hi, const Term& term) {
  if (hi - lo <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(lo, mid, term) + pairwise(mid, hi, term);
}

ScalarField zip(const ScalarField& a, const ScalarField& b, double (*op)(double, double)) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  return out;
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
  return pairwise(0, v.size(), [&](std::size_t i) { return v[i]; });
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  return pairwise(0, a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double sup(const ScalarField& f) { return *std::max_element(f.values().begin(), f.values().end()); }
double inf(const ScalarField& f) { return *std::min_element(f.values().begin(), f.values().end()); }

double sup_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_abs(const ComplexField& f) {
  double m = 0.0;
  for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const ScalarField& f) { return pairwise_sum(f.values()) / static_cast<double>(f.size()); }

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x + y; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x - y; });
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x * y; });
}
ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a);
  for (double& v : out.values()) v *= s;
  return out;
}
ScalarField operator+(const ScalarField& a, double c) {
  ScalarField out(a);
  for (double& v : out.values()) v += c;
  return out;
}
ScalarField operator-(const ScalarField& a, double c) { return a + (-c); }
ScalarField operator-(double c, const ScalarField& a) { return (-1.0 * a) + c; }

ScalarField map(const ScalarField& f, const std::function<double(double)>& fn) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return out;
}

ScalarField real_part(const ComplexField& f) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

ComplexField to_complex(const ScalarField& f) {
  ComplexField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

Measure::Measure(ScalarField density) : density_(std::move(density)) {
  total_mass_ = density_.grid().cell_volume() * pairwise_sum(density_.values());
}

Measure Measure::flat(const TorusGrid& grid) { return Measure(ScalarField(grid, 1.0)); }

Measure Measure::from_density(ScalarField density) {
  for (double v : density.values()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("measure density must be finite and strictly positive");
    }
  }
  return Measure(std::move(density));
}

double integrate(const ScalarField& f, const Measure& m) {
  require_same_grid(f.grid(), m.grid());
  return f.grid().cell_volume() * pairwise_dot(f.values(), m.density().values());
}

double lp_norm(const ScalarField& f, double p, const Measure& m) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  require_same_grid(f.grid(), m.grid());
  const double scale = sup_abs(f);
  if (scale == 0.0) return 0.0;
  const auto rho = m.density().values();
  const double s = f.grid().cell_volume() *
                   pairwise(0, f.size(), [&](std::size_t i) {
                     return std::pow(std::abs(f[i]) / scale, p) * rho[i];
                   });
  return scale * std::pow(s / m.total_mass(), 1.0 / p);
}

double sublevel_measure(const ScalarField& f, double threshold, const Measure& m) {
  require_same_grid(f.grid(), m.grid());
  const auto rho = m.density().values();
  const double s = f.grid().cell_volume() *
                   pairwise(0, f.size(), [&](std::size_t i) { return f[i] <= threshold ? rho[i] : 0.0; });
  return std::clamp(s / m.total_mass(), 0.0, 1.0);
}

}  // namespace hma
