#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hma {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Largest supported complex dimension; real axis count is at most 2 * kMaxDim.
inline constexpr int kMaxDim = 3;
inline constexpr int kMaxAxes = 2 * kMaxDim;

using AxisIndex = std::array<int, kMaxAxes>;

/// Periodic grid on the flat torus (R/2piZ)^{2n}. Complex coordinate z^j pairs
/// the real axes (2j, 2j+1). Points are stored row-major: the last axis varies
/// fastest.
class TorusGrid {
 public:
  /// Empty placeholder grid (zero points); use build() for a real one.
  TorusGrid() = default;
  /// Throws std::invalid_argument for n outside {2,3}, a wrong axis count, or
  /// an odd or undersized (< 4) axis.
  static TorusGrid build(int n, std::vector<int> sizes);

  int dim() const { return n_; }
  int axes() const { return 2 * n_; }
  std::span<const int> sizes() const { return {sizes_.data(), sizes_.size()}; }
  int size(int axis) const { return sizes_[static_cast<std::size_t>(axis)]; }
  std::size_t point_count() const { return count_; }
  double total_volume() const;
  double cell_volume() const { return total_volume() / static_cast<double>(count_); }

  double coordinate(int axis, int index) const {
    return kTwoPi * index / sizes_[static_cast<std::size_t>(axis)];
  }
  AxisIndex multi_index(std::size_t point) const;
  std::size_t flat_index(const AxisIndex& idx) const;
  /// Real coordinates of a point, one entry per axis.
  std::array<double, kMaxAxes> position(std::size_t point) const;

  bool operator==(const TorusGrid& other) const = default;

 private:
  TorusGrid(int n, std::vector<int> sizes);

  int n_ = 0;
  std::vector<int> sizes_;
  std::size_t count_ = 0;
};

template <class T>
class GridField {
 public:
  GridField() = default;
  explicit GridField(TorusGrid grid, T fill = T{})
      : grid_(std::move(grid)), values_(grid_.point_count(), fill) {}
  GridField(TorusGrid grid, std::vector<T> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.point_count()) {
      throw std::invalid_argument("field size does not match grid point count");
    }
  }

  /// Samples fn(position) at every grid point.
  template <class Fn>
  static GridField sample(const TorusGrid& grid, Fn&& fn) {
    GridField out(grid);
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
      out.values_[p] = fn(grid.position(p));
    }
    return out;
  }

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& operator[](std::size_t i) { return values_[i]; }
  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

 private:
  TorusGrid grid_;
  std::vector<T> values_;
};

using ScalarField = GridField<double>;
using ComplexField = GridField<cplx>;

void require_same_grid(const TorusGrid& a, const TorusGrid& b);

// Deterministic reductions: pairwise summation over fixed 128-element leaves,
// splitting each range at its midpoint.
double pairwise_sum(std::span<const double> v);
double pairwise_dot(std::span<const double> a, std::span<const double> b);

double sup(const ScalarField& f);
double inf(const ScalarField& f);
double sup_abs(const ScalarField& f);
double sup_abs(const ComplexField& f);
/// Flat-measure average.
double mean(const ScalarField& f);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField operator+(const ScalarField& a, double c);
ScalarField operator-(const ScalarField& a, double c);
ScalarField operator-(double c, const ScalarField& a);
ScalarField map(const ScalarField& f, const std::function<double(double)>& fn);
ScalarField real_part(const ComplexField& f);
ComplexField to_complex(const ScalarField& f);

/// Volume form stored as a density relative to the flat coordinate volume.
class Measure {
 public:
  static Measure flat(const TorusGrid& grid);
  /// Throws std::invalid_argument unless every density value is finite and > 0.
  static Measure from_density(ScalarField density);

  const ScalarField& density() const { return density_; }
  const TorusGrid& grid() const { return density_.grid(); }
  double total_mass() const { return total_mass_; }

 private:
  explicit Measure(ScalarField density);

  ScalarField density_;
  double total_mass_ = 0.0;
};

/// cell_volume * sum f * density (periodic trapezoid rule).
double integrate(const ScalarField& f, const Measure& m);

/// (int |f|^p dm / m(M))^{1/p}. Scales by sup|f| internally so large p does
/// not overflow. Throws std::invalid_argument for p < 1.
double lp_norm(const ScalarField& f, double p, const Measure& m);

/// Normalized measure of {f <= threshold}, in [0,1].
double sublevel_measure(const ScalarField& f, double threshold, const Measure& m);

}  // namespace hma
