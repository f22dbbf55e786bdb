#pragma once

#include <array>
#include <span>
#include <vector>

#include "hma/grid.hpp"
#include "hma/hermitian.hpp"

namespace hma {

// Exterior algebra at a point, generated by dz^0, dzbar^0, ..., dz^{n-1}, dzbar^{n-1}.
// A monomial is a bitmask over 2n generators with dz^j at bit 2j and dzbar^j at
// bit 2j+1; its canonical order is increasing bit index, so the top monomial is
// dz^0 ^ dzbar^0 ^ dz^1 ^ dzbar^1 ^ ...

/// Monomial masks of bidegree (p,q), in increasing mask order.
const std::vector<unsigned>& bidegree_masks(int n, int p, int q);

/// Sign of (monomial a) ^ (monomial b) relative to the canonical monomial a|b;
/// zero if they share a generator.
int wedge_sign(unsigned a, unsigned b);

/// A homogeneous element of bidegree (p,q) of the complexified exterior
/// algebra at one point.
class PointForm {
 public:
  PointForm(int n, int p, int q);

  static PointForm scalar(int n, cplx c);
  static PointForm dz(int n, int j);
  static PointForm dzbar(int n, int j);
  /// i sum_{ij} a(i,j) dz^i ^ dzbar^j.
  static PointForm from_matrix(const HMat& a);
  /// sum_j c_j dz^j (antiholomorphic == false) or sum_j c_j dzbar^j.
  static PointForm one_form(std::span<const cplx> c, bool antiholomorphic);

  int dim() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  std::size_t coefficient_count() const { return bidegree_masks(n_, p_, q_).size(); }
  bool is_top() const { return p_ == n_ && q_ == n_; }

  cplx coeff(unsigned mask) const { return c_[mask]; }
  void add(unsigned mask, cplx v);
  /// Coefficient of the canonical top monomial.
  cplx top() const { return c_[top_mask()]; }
  unsigned top_mask() const { return (1u << (2 * n_)) - 1u; }
  double max_abs() const;

  PointForm& operator+=(const PointForm& other);
  PointForm operator+(const PointForm& other) const;
  PointForm operator-(const PointForm& other) const;
  PointForm operator*(cplx s) const;

 private:
  int n_;
  int p_;
  int q_;
  std::array<cplx, 1u << kMaxAxes> c_{};
};

/// Graded-antisymmetric product. Throws std::invalid_argument if the total
/// bidegree exceeds (n,n).
PointForm wedge(const PointForm& a, const PointForm& b);
PointForm point_exterior_product(std::span<const PointForm> forms);
/// a^k, with a^0 the scalar 1.
PointForm wedge_power(const PointForm& a, int k);

/// omega_I^n for the identity metric; its top coefficient is n! i^n.
PointForm flat_volume(int n);

/// top(form) / top(omega_ref^n) for a top-degree form.
cplx top_ratio(const PointForm& form, const PointForm& reference_volume);

/// Form-valued field: one coefficient field per monomial of a fixed bidegree.
class FormField {
 public:
  FormField(TorusGrid grid, int p, int q);

  /// Evaluates fn(point) -> PointForm of bidegree (p,q) at every grid point.
  template <class Fn>
  static FormField from_points(const TorusGrid& grid, int p, int q, Fn&& fn) {
    FormField out(grid, p, q);
    for (std::size_t pt = 0; pt < grid.point_count(); ++pt) out.set(pt, fn(pt));
    return out;
  }
  /// omega for the given metric.
  static FormField kahler_form(const HermitianField& metric);

  const TorusGrid& grid() const { return grid_; }
  int p() const { return p_; }
  int q() const { return q_; }
  std::span<const unsigned> masks() const { return masks_; }
  const ComplexField& coefficient(std::size_t slot) const { return coeffs_[slot]; }
  ComplexField& coefficient(std::size_t slot) { return coeffs_[slot]; }

  PointForm at(std::size_t point) const;
  void set(std::size_t point, const PointForm& f);
  /// max over points and monomials of |coefficient|.
  double sup_norm() const;

 private:
  TorusGrid grid_;
  int p_;
  int q_;
  std::vector<unsigned> masks_;
  std::vector<ComplexField> coeffs_;
};

/// Pointwise product of two form fields.
FormField wedge(const FormField& a, const FormField& b);
/// d' (raises p) and d'' (raises q), spectrally.
FormField partial(const FormField& f);
FormField partial_bar(const FormField& f);
/// d' d'' f, of bidegree (p+1, q+1).
FormField ddbar(const FormField& f);

}  // namespace hma
