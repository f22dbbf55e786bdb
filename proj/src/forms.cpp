#include "hma/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hma/spectral.hpp"

namespace hma {

namespace {

constexpr unsigned kEvenBits = 0x555u;  // dz generators
constexpr unsigned kOddBits = 0xAAAu;   // dzbar generators

unsigned dz_bit(int j) { return 1u << (2 * j); }
unsigned dzbar_bit(int j) { return 1u << (2 * j + 1); }

std::vector<std::vector<unsigned>> build_masks(int n) {
  std::vector<std::vector<unsigned>> table(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (unsigned m = 0; m < (1u << (2 * n)); ++m) {
    const int p = std::popcount(m & kEvenBits);
    const int q = std::popcount(m & kOddBits);
    table[static_cast<std::size_t>(p * (n + 1) + q)].push_back(m);
  }
  return table;
}

void check_degree(int n, int p, int q) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("form dimension out of range");
  if (p < 0 || q < 0 || p > n || q > n) {
    throw std::invalid_argument("degree overflow: bidegree (" + std::to_string(p) + "," + std::to_string(q) +
                                ") exceeds (" + std::to_string(n) + "," + std::to_string(n) + ")");
  }
}

}  // namespace

const std::vector<unsigned>& bidegree_masks(int n, int p, int q) {
  static const std::array<std::vector<std::vector<unsigned>>, kMaxDim + 1> tables = [] {
    std::array<std::vector<std::vector<unsigned>>, kMaxDim + 1> t;
    for (int d = 1; d <= kMaxDim; ++d) t[static_cast<std::size_t>(d)] = build_masks(d);
    return t;
  }();
  check_degree(n, p, q);
  return tables[static_cast<std::size_t>(n)][static_cast<std::size_t>(p * (n + 1) + q)];
}

int wedge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int inversions = 0;
  for (unsigned rest = b; rest; rest &= rest - 1) {
    const int y = std::countr_zero(rest);
    inversions += std::popcount(a >> (y + 1));
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

PointForm::PointForm(int n, int p, int q) : n_(n), p_(p), q_(q) { check_degree(n, p, q); }

PointForm PointForm::scalar(int n, cplx c) {
  PointForm f(n, 0, 0);
  f.c_[0] = c;
  return f;
}

PointForm PointForm::dz(int n, int j) {
  PointForm f(n, 1, 0);
  f.c_[dz_bit(j)] = 1.0;
  return f;
}

PointForm PointForm::dzbar(int n, int j) {
  PointForm f(n, 0, 1);
  f.c_[dzbar_bit(j)] = 1.0;
  return f;
}

PointForm PointForm::from_matrix(const HMat& a) {
  const int n = static_cast<int>(a.rows());
  PointForm f(n, 1, 1);
  const cplx i_unit(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const unsigned m = dz_bit(i) | dzbar_bit(j);
      f.c_[m] += static_cast<double>(wedge_sign(dz_bit(i), dzbar_bit(j))) * i_unit * a(i, j);
    }
  return f;
}

PointForm PointForm::one_form(std::span<const cplx> c, bool antiholomorphic) {
  const int n = static_cast<int>(c.size());
  PointForm f(n, antiholomorphic ? 0 : 1, antiholomorphic ? 1 : 0);
  for (int j = 0; j < n; ++j) f.c_[antiholomorphic ? dzbar_bit(j) : dz_bit(j)] = c[static_cast<std::size_t>(j)];
  return f;
}

void PointForm::add(unsigned mask, cplx v) {
  if (std::popcount(mask & kEvenBits) != p_ || std::popcount(mask & kOddBits) != q_ ||
      mask >= (1u << (2 * n_))) {
    throw std::invalid_argument("monomial does not match the form's bidegree");
  }
  c_[mask] += v;
}

double PointForm::max_abs() const {
  double m = 0.0;
  for (unsigned mask : bidegree_masks(n_, p_, q_)) m = std::max(m, std::abs(c_[mask]));
  return m;
}

PointForm& PointForm::operator+=(const PointForm& other) {
  if (other.n_ != n_ || other.p_ != p_ || other.q_ != q_) {
    throw std::invalid_argument("adding forms of different bidegree");
  }
  for (unsigned mask : bidegree_masks(n_, p_, q_)) c_[mask] += other.c_[mask];
  return *this;
}

PointForm PointForm::operator+(const PointForm& other) const {
  PointForm out(*this);
  out += other;
  return out;
}

PointForm PointForm::operator-(const PointForm& other) const { return *this + other * -1.0; }

PointForm PointForm::operator*(cplx s) const {
  PointForm out(*this);
  for (unsigned mask : bidegree_masks(n_, p_, q_)) out.c_[mask] *= s;
  return out;
}

PointForm wedge(const PointForm& a, const PointForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge of forms in different dimensions");
  const int n = a.dim();
  PointForm out(n, a.p() + b.p(), a.q() + b.q());
  const auto& ma = bidegree_masks(n, a.p(), a.q());
  const auto& mb = bidegree_masks(n, b.p(), b.q());
  for (unsigned x : ma) {
    const cplx cx = a.coeff(x);
    if (cx == 0.0) continue;
    for (unsigned y : mb) {
      const int s = wedge_sign(x, y);
      if (s == 0) continue;
      const cplx cy = b.coeff(y);
      if (cy == 0.0) continue;
      out.add(x | y, static_cast<double>(s) * cx * cy);
    }
  }
  return out;
}

PointForm point_exterior_product(std::span<const PointForm> forms) {
  if (forms.empty()) throw std::invalid_argument("empty exterior product");
  PointForm acc = forms[0];
  for (std::size_t i = 1; i < forms.size(); ++i) acc = wedge(acc, forms[i]);
  return acc;
}

PointForm wedge_power(const PointForm& a, int k) {
  PointForm acc = PointForm::scalar(a.dim(), 1.0);
  for (int i = 0; i < k; ++i) acc = wedge(acc, a);
  return acc;
}

PointForm flat_volume(int n) { return wedge_power(PointForm::from_matrix(identity_matrix(n)), n); }

cplx top_ratio(const PointForm& form, const PointForm& reference_volume) {
  if (!form.is_top() || !reference_volume.is_top()) throw std::invalid_argument("top_ratio needs top-degree forms");
  return form.top() / reference_volume.top();
}

FormField::FormField(TorusGrid grid, int p, int q) : grid_(std::move(grid)), p_(p), q_(q) {
  const auto& m = bidegree_masks(grid_.dim(), p, q);
  masks_.assign(m.begin(), m.end());
  coeffs_.assign(masks_.size(), ComplexField(grid_));
}

FormField FormField::kahler_form(const HermitianField& metric) {
  return from_points(metric.grid(), 1, 1, [&](std::size_t pt) { return PointForm::from_matrix(metric.at(pt)); });
}

PointForm FormField::at(std::size_t point) const {
  PointForm f(grid_.dim(), p_, q_);
  for (std::size_t s = 0; s < masks_.size(); ++s) f.add(masks_[s], coeffs_[s][point]);
  return f;
}

void FormField::set(std::size_t point, const PointForm& f) {
  if (f.p() != p_ || f.q() != q_) throw std::invalid_argument("form bidegree mismatch");
  for (std::size_t s = 0; s < masks_.size(); ++s) coeffs_[s][point] = f.coeff(masks_[s]);
}

double FormField::sup_norm() const {
  double m = 0.0;
  for (const ComplexField& c : coeffs_) m = std::max(m, sup_abs(c));
  return m;
}

FormField wedge(const FormField& a, const FormField& b) {
  require_same_grid(a.grid(), b.grid());
  return FormField::from_points(a.grid(), a.p() + b.p(), a.q() + b.q(),
                                [&](std::size_t pt) { return wedge(a.at(pt), b.at(pt)); });
}

namespace {

std::size_t slot_of(std::span<const unsigned> masks, unsigned m) {
  return static_cast<std::size_t>(std::lower_bound(masks.begin(), masks.end(), m) - masks.begin());
}

// Applies sum over (generator set, symbol) contributions: for each source
// monomial M and each derivative term, out[gen | M] += sign * symbol * spec(M).
template <class Terms>
FormField differentiate(const FormField& f, int dp, int dq, const Terms& terms) {
  const TorusGrid& grid = f.grid();
  FormField out(grid, f.p() + dp, f.q() + dq);
  const std::size_t count = grid.point_count();
  std::vector<std::vector<cplx>> acc(out.masks().size(), std::vector<cplx>(count, 0.0));
  for (std::size_t s = 0; s < f.masks().size(); ++s) {
    const unsigned m = f.masks()[s];
    const std::vector<cplx> spec = fft_forward(grid, f.coefficient(s).values());
    for (const auto& [gen, gen_sign, symbol] : terms) {
      const int sign = wedge_sign(gen, m);
      if (sign == 0) continue;
      auto& target = acc[slot_of(out.masks(), gen | m)];
      const double w = static_cast<double>(sign * gen_sign);
      for (std::size_t k = 0; k < count; ++k) target[k] += w * (*symbol)[k] * spec[k];
    }
  }
  for (std::size_t t = 0; t < acc.size(); ++t) out.coefficient(t) = ComplexField(grid, fft_inverse(grid, acc[t]));
  return out;
}

struct Term {
  unsigned gen;
  int gen_sign;
  const std::vector<cplx>* symbol;
};

}  // namespace

FormField partial(const FormField& f) {
  const TorusGrid& grid = f.grid();
  std::vector<std::vector<cplx>> tables;
  for (int j = 0; j < grid.dim(); ++j) tables.push_back(partial_symbol_table(grid, j, false));
  std::vector<Term> terms;
  for (int j = 0; j < grid.dim(); ++j) terms.push_back({dz_bit(j), 1, &tables[static_cast<std::size_t>(j)]});
  return differentiate(f, 1, 0, terms);
}

FormField partial_bar(const FormField& f) {
  const TorusGrid& grid = f.grid();
  std::vector<std::vector<cplx>> tables;
  for (int j = 0; j < grid.dim(); ++j) tables.push_back(partial_symbol_table(grid, j, true));
  std::vector<Term> terms;
  for (int j = 0; j < grid.dim(); ++j) terms.push_back({dzbar_bit(j), 1, &tables[static_cast<std::size_t>(j)]});
  return differentiate(f, 0, 1, terms);
}

FormField ddbar(const FormField& f) {
  const TorusGrid& grid = f.grid();
  const int n = grid.dim();
  std::vector<std::vector<cplx>> tables;
  tables.reserve(static_cast<std::size_t>(n * n));
  std::vector<Term> terms;
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) {
      tables.push_back(ddbar_symbol_table(grid, c, d));
      // d'd''(f e) = d_c dbar_d f dz^c ^ dzbar^d ^ e
      terms.push_back({dz_bit(c) | dzbar_bit(d), wedge_sign(dz_bit(c), dzbar_bit(d)), &tables.back()});
    }
  return differentiate(f, 1, 1, terms);
}

}  // namespace hma
