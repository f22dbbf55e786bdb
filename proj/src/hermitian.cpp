#include "hma/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hma/spectral.hpp"

namespace hma {

HermitianField::HermitianField(TorusGrid grid)
    : grid_(std::move(grid)), data_(grid_.point_count() * static_cast<std::size_t>(grid_.dim() * grid_.dim())) {}

HermitianField HermitianField::constant(const TorusGrid& grid, const HMat& a) {
  HermitianField out(grid);
  for (std::size_t p = 0; p < grid.point_count(); ++p) out.set(p, a);
  return out;
}

HMat HermitianField::at(std::size_t point) const {
  const int n = dim();
  HMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = entry(point, i, j);
  return a;
}

void HermitianField::set(std::size_t point, const HMat& a) {
  const int n = dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entry(point, i, j) = a(i, j);
}

ComplexField HermitianField::component(int i, int j) const {
  ComplexField c(grid_);
  for (std::size_t p = 0; p < point_count(); ++p) c[p] = entry(p, i, j);
  return c;
}

void HermitianField::set_component(int i, int j, const ComplexField& c) {
  for (std::size_t p = 0; p < point_count(); ++p) entry(p, i, j) = c[p];
}

double HermitianField::hermitian_deviation() const {
  double dev = 0.0;
  const int n = dim();
  for (std::size_t p = 0; p < point_count(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) dev = std::max(dev, std::abs(entry(p, i, j) - std::conj(entry(p, j, i))));
  return dev;
}

HermitianField HermitianField::operator+(const HermitianField& other) const {
  require_same_grid(grid_, other.grid_);
  HermitianField out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += other.data_[i];
  return out;
}

HermitianField HermitianField::operator-(const HermitianField& other) const {
  require_same_grid(grid_, other.grid_);
  HermitianField out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= other.data_[i];
  return out;
}

HermitianField HermitianField::scaled(const ScalarField& s) const {
  require_same_grid(grid_, s.grid());
  HermitianField out(*this);
  const std::size_t st = stride();
  for (std::size_t p = 0; p < point_count(); ++p)
    for (std::size_t e = 0; e < st; ++e) out.data_[p * st + e] *= s[p];
  return out;
}

HermitianField HermitianField::scaled(double s) const {
  HermitianField out(*this);
  for (cplx& v : out.data_) v *= s;
  return out;
}

TorsionTensor::TorsionTensor(TorusGrid grid)
    : grid_(std::move(grid)),
      data_(grid_.point_count() * static_cast<std::size_t>(grid_.dim() * grid_.dim() * grid_.dim())) {}

double TorsionTensor::antisymmetric_sup() const {
  const int n = dim();
  double m = 0.0;
  for (std::size_t p = 0; p < grid_.point_count(); ++p)
    for (int k = 0; k < n; ++k)
      for (int i = k + 1; i < n; ++i)
        for (int j = 0; j < n; ++j) m = std::max(m, std::abs((*this)(p, k, i, j) - (*this)(p, i, k, j)));
  return m;
}

double TorsionTensor::sup() const {
  double m = 0.0;
  for (const cplx& v : data_) m = std::max(m, std::abs(v));
  return m;
}

HMat identity_matrix(int n) { return HMat::Identity(n, n); }

cplx determinant(const HMat& a) {
  switch (a.rows()) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      return a.determinant();
  }
}

double min_eigenvalue(const HMat& a) {
  Eigen::SelfAdjointEigenSolver<HMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

HMat inverse(const HMat& a) {
  const int n = static_cast<int>(a.rows());
  const cplx d = determinant(a);
  HMat inv(n, n);
  if (n == 2) {
    inv(0, 0) = a(1, 1);
    inv(1, 1) = a(0, 0);
    inv(0, 1) = -a(0, 1);
    inv(1, 0) = -a(1, 0);
  } else if (n == 3) {
    inv(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    inv(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    inv(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    inv(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    inv(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    inv(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    inv(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    inv(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    inv(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  } else {
    return a.inverse();
  }
  return inv / d;
}

cplx mixed_discriminant(std::span<const HMat> mats) {
  const int n = static_cast<int>(mats.size());
  if (n == 0) throw std::invalid_argument("mixed_discriminant needs at least one matrix");
  const int rows = static_cast<int>(mats[0].rows());
  if (rows != n) throw std::invalid_argument("mixed_discriminant needs exactly n matrices of size n");
  // D = (1/n!) sum_{S nonempty} (-1)^{n-|S|} det(sum_{i in S} A_i)
  cplx total = 0.0;
  for (unsigned s = 1; s < (1u << n); ++s) {
    HMat sum = HMat::Zero(n, n);
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (s & (1u << i)) {
        sum += mats[static_cast<std::size_t>(i)];
        ++count;
      }
    }
    const double sign = ((n - count) % 2 == 0) ? 1.0 : -1.0;
    total += sign * determinant(sum);
  }
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return total / fact;
}

ScalarField wedge_quotient(std::span<const WedgeFactor> factors, const HermitianField& reference) {
  const TorusGrid& grid = reference.grid();
  const int n = grid.dim();
  int total = 0;
  for (const WedgeFactor& f : factors) {
    if (f.multiplicity < 0) throw std::invalid_argument("negative wedge multiplicity");
    require_same_grid(grid, f.form.get().grid());
    total += f.multiplicity;
  }
  if (total != n) {
    throw std::invalid_argument("wedge multiplicities sum to " + std::to_string(total) + ", expected " +
                                std::to_string(n));
  }
  ScalarField out(grid);
  std::vector<HMat> mats(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    std::size_t slot = 0;
    for (const WedgeFactor& f : factors) {
      const HMat a = f.form.get().at(p);
      for (int m = 0; m < f.multiplicity; ++m) mats[slot++] = a;
    }
    out[p] = (mixed_discriminant(mats) / determinant(reference.at(p))).real();
  }
  return out;
}

HermitianField ddbar(const ScalarField& f) {
  const TorusGrid& grid = f.grid();
  const int n = grid.dim();
  const std::vector<cplx> spec = fft_forward(grid, f.values());
  HermitianField out(grid);
  std::vector<cplx> work(spec.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (std::size_t m = 0; m < spec.size(); ++m) work[m] = spec[m] * ddbar_symbol(wavevector(grid, m), i, j);
      const std::vector<cplx> c = fft_inverse(grid, work);
      for (std::size_t p = 0; p < c.size(); ++p) {
        if (i == j) {
          out.entry(p, i, i) = c[p].real();
        } else {
          out.entry(p, i, j) = c[p];
          out.entry(p, j, i) = std::conj(c[p]);
        }
      }
    }
  }
  return out;
}

HermitianField gradient_pairing(const ScalarField& f) {
  const TorusGrid& grid = f.grid();
  const int n = grid.dim();
  std::vector<ComplexField> d;
  for (int j = 0; j < n; ++j) d.push_back(spectral_partial(f, j, false));
  HermitianField out(grid);
  for (std::size_t p = 0; p < grid.point_count(); ++p)
    for (int i = 0; i < n; ++i) {
      out.entry(p, i, i) = std::norm(d[static_cast<std::size_t>(i)][p]);
      for (int j = i + 1; j < n; ++j) {
        const cplx v = d[static_cast<std::size_t>(i)][p] * std::conj(d[static_cast<std::size_t>(j)][p]);
        out.entry(p, i, j) = v;
        out.entry(p, j, i) = std::conj(v);
      }
    }
  return out;
}

namespace {

double trace_inverse_product(const HMat& g, const HMat& a) { return (inverse(g) * a).trace().real(); }

}  // namespace

ScalarField trace_with(const HermitianField& metric, const HermitianField& a) {
  require_same_grid(metric.grid(), a.grid());
  ScalarField out(metric.grid());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = trace_inverse_product(metric.at(p), a.at(p));
  return out;
}

ScalarField chern_laplacian(const ScalarField& f, const HermitianField& metric) {
  require_same_grid(f.grid(), metric.grid());
  for (std::size_t p = 0; p < metric.point_count(); ++p) {
    const double d = determinant(metric.at(p)).real();
    if (!(std::abs(d) > 0.0)) throw PositivityError("chern_laplacian: singular metric", p, 0.0);
  }
  return trace_with(metric, ddbar(f));
}

ScalarField gradient_norm_sq(const ScalarField& f, const HermitianField& metric) {
  return trace_with(metric, gradient_pairing(f));
}

ScalarField determinant_field(const HermitianField& metric) {
  ScalarField out(metric.grid());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = determinant(metric.at(p)).real();
    if (!(out[p] > 0.0)) throw PositivityError("nonpositive determinant", p, out[p]);
  }
  return out;
}

HermitianField ricci_form(const HermitianField& metric) {
  ScalarField logdet = determinant_field(metric);
  for (double& v : logdet.values()) v = std::log(v);
  return ddbar(logdet).scaled(-1.0 / kTwoPi);
}

TorsionTensor torsion(const HermitianField& metric) {
  const TorusGrid& grid = metric.grid();
  const int n = grid.dim();
  TorsionTensor t(grid);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const ComplexField gij = metric.component(i, j);
      for (int k = 0; k < n; ++k) {
        const ComplexField d = spectral_partial(gij, k, false);
        for (std::size_t p = 0; p < grid.point_count(); ++p) t(p, k, i, j) = d[p];
      }
    }
  return t;
}

double min_eigenvalue(const HermitianField& field, std::size_t* where) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < field.point_count(); ++p) {
    const double e = min_eigenvalue(field.at(p));
    if (e < m) {
      m = e;
      if (where) *where = p;
    }
  }
  return m;
}

void require_positive_definite(const HermitianField& metric, const char* what) {
  std::size_t where = 0;
  const double e = min_eigenvalue(metric, &where);
  if (!(e > 0.0)) {
    throw PositivityError(std::string(what) + ": not positive definite at point " + std::to_string(where) +
                              " (min eigenvalue " + std::to_string(e) + ")",
                          where, e);
  }
}

Measure volume_measure(const HermitianField& metric) { return Measure::from_density(determinant_field(metric)); }

}  // namespace hma
