#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hma/grid.hpp"

namespace hma {

/// Small dense complex matrix, n <= 3, stack allocated.
using HMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Raised when g + ddbar(phi) (or a metric) fails to be positive definite.
class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, std::size_t point, double eigenvalue)
      : std::runtime_error(what), point_(point), eigenvalue_(eigenvalue) {}
  std::size_t point() const { return point_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  std::size_t point_;
  double eigenvalue_;
};

/// One n x n complex matrix per grid point, A(i,j) = A_{i jbar}. Entries are
/// stored point-major, row-major within a point.
class HermitianField {
 public:
  HermitianField() = default;
  explicit HermitianField(TorusGrid grid);
  static HermitianField constant(const TorusGrid& grid, const HMat& a);

  template <class Fn>
  static HermitianField sample(const TorusGrid& grid, Fn&& fn) {
    HermitianField out(grid);
    for (std::size_t p = 0; p < grid.point_count(); ++p) out.set(p, fn(grid.position(p)));
    return out;
  }

  const TorusGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::size_t point_count() const { return grid_.point_count(); }

  HMat at(std::size_t point) const;
  void set(std::size_t point, const HMat& a);
  cplx entry(std::size_t point, int i, int j) const {
    return data_[point * stride() + static_cast<std::size_t>(i * dim() + j)];
  }
  cplx& entry(std::size_t point, int i, int j) {
    return data_[point * stride() + static_cast<std::size_t>(i * dim() + j)];
  }
  ComplexField component(int i, int j) const;
  void set_component(int i, int j, const ComplexField& c);

  std::span<const cplx> raw() const { return data_; }
  std::span<cplx> raw() { return data_; }

  /// max over points of max |A - A^dagger| entries.
  double hermitian_deviation() const;

  HermitianField operator+(const HermitianField& other) const;
  HermitianField operator-(const HermitianField& other) const;
  HermitianField scaled(const ScalarField& s) const;
  HermitianField scaled(double s) const;

 private:
  std::size_t stride() const { return static_cast<std::size_t>(dim() * dim()); }

  TorusGrid grid_;
  std::vector<cplx> data_;
};

/// T(k,i,j) = d_k g_{i jbar}: coefficients of the (2,1)-form d'omega before
/// antisymmetrization in (k,i).
class TorsionTensor {
 public:
  explicit TorsionTensor(TorusGrid grid);
  const TorusGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  cplx operator()(std::size_t point, int k, int i, int j) const { return data_[index(point, k, i, j)]; }
  cplx& operator()(std::size_t point, int k, int i, int j) { return data_[index(point, k, i, j)]; }
  /// Largest |T(k,i,j) - T(i,k,j)| over all points: the sup-norm of d'omega.
  double antisymmetric_sup() const;
  double sup() const;

 private:
  std::size_t index(std::size_t point, int k, int i, int j) const {
    const auto n = static_cast<std::size_t>(dim());
    return ((point * n + static_cast<std::size_t>(k)) * n + static_cast<std::size_t>(i)) * n +
           static_cast<std::size_t>(j);
  }

  TorusGrid grid_;
  std::vector<cplx> data_;
};

// ---- pointwise linear algebra ----

HMat identity_matrix(int n);
cplx determinant(const HMat& a);
double min_eigenvalue(const HMat& a);
HMat inverse(const HMat& a);

/// Symmetric multilinear polarization of det: D(A,...,A) = det A. Accepts
/// arbitrary complex matrices; real for Hermitian arguments.
cplx mixed_discriminant(std::span<const HMat> mats);

struct WedgeFactor {
  std::reference_wrapper<const HermitianField> form;
  int multiplicity;
};

/// Pointwise (wedge of the factors) / omega_ref^n = D(A_1..A_n) / det(g_ref).
/// Throws std::invalid_argument when multiplicities do not sum to n.
ScalarField wedge_quotient(std::span<const WedgeFactor> factors, const HermitianField& reference);

// ---- differential operators ----

/// H_{i jbar} = d_i dbar_j f; exactly Hermitian (diagonal forced real).
HermitianField ddbar(const ScalarField& f);

/// G_{i jbar} = (d_i f) conj(d_j f): the coefficient matrix of i df ^ dbar f.
HermitianField gradient_pairing(const ScalarField& f);

/// g^{i jbar} d_i dbar_j f. Throws PositivityError for a singular metric.
ScalarField chern_laplacian(const ScalarField& f, const HermitianField& metric);

/// |df|_g^2 = g^{i jbar} d_i f conj(d_j f).
ScalarField gradient_norm_sq(const ScalarField& f, const HermitianField& metric);

/// Ric_{i jbar} = -(1/2pi) d_i dbar_j log det g.
HermitianField ricci_form(const HermitianField& metric);

TorsionTensor torsion(const HermitianField& metric);

/// det g per point (real part). Throws PositivityError when det <= 0 anywhere.
ScalarField determinant_field(const HermitianField& metric);

/// min over points of the smallest eigenvalue.
double min_eigenvalue(const HermitianField& field, std::size_t* where = nullptr);

/// Throws PositivityError unless every point is positive definite.
void require_positive_definite(const HermitianField& metric, const char* what);

/// Volume form omega^n as a measure (density det g relative to the flat form).
Measure volume_measure(const HermitianField& metric);

/// tr(g^{-1} A) per point.
ScalarField trace_with(const HermitianField& metric, const HermitianField& a);

}  // namespace hma
