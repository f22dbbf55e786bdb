#pragma once

#include <span>
#include <vector>

#include "hma/grid.hpp"

namespace hma {

/// Integer wavenumber of one Fourier mode plus, per axis, whether the
/// component sits on the Nyquist frequency.
struct Wavevector {
  std::array<int, kMaxAxes> k{};
  std::array<bool, kMaxAxes> nyquist{};
};

Wavevector wavevector(const TorusGrid& grid, std::size_t mode);

/// Unnormalized forward DFT and normalized inverse (inverse(forward(x)) == x).
std::vector<cplx> fft_forward(const TorusGrid& grid, std::span<const cplx> values);
std::vector<cplx> fft_forward(const TorusGrid& grid, std::span<const double> values);
std::vector<cplx> fft_inverse(const TorusGrid& grid, std::span<const cplx> spectrum);

/// Fourier symbol of d/dz^j (conjugate == false) or d/dzbar^j. First-order
/// factors drop Nyquist components.
cplx partial_symbol(const Wavevector& w, int j, bool conjugate);

/// Fourier symbol of d^2/dz^i dzbar^j. Diagonal entries keep the Nyquist
/// components (-(k_x^2 + k_y^2)/4 is real); off-diagonal entries drop them.
cplx ddbar_symbol(const Wavevector& w, int i, int j);

/// Symbol of the constant-coefficient operator f -> sum_{ij} coeff(j,i) d_i dbar_j f
/// for a Hermitian coefficient matrix stored row-major (n*n entries).
double contracted_ddbar_symbol(const Wavevector& w, int n, std::span<const cplx> coeff);

/// Evaluates symbol(mode) for every mode of the grid, in storage order.
template <class Fn>
std::vector<cplx> tabulate_symbol(const TorusGrid& grid, Fn&& symbol) {
  std::vector<cplx> out(grid.point_count());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = symbol(wavevector(grid, m));
  return out;
}

std::vector<cplx> partial_symbol_table(const TorusGrid& grid, int j, bool conjugate);
std::vector<cplx> ddbar_symbol_table(const TorusGrid& grid, int i, int j);

ComplexField spectral_partial(const ScalarField& f, int j, bool conjugate);
ComplexField spectral_partial(const ComplexField& f, int j, bool conjugate);

/// d_i dbar_j f for a complex field.
ComplexField spectral_ddbar_component(const ComplexField& f, int i, int j);

/// Multiplies the spectrum of f by a tabulated symbol and transforms back.
ComplexField apply_multiplier(const ComplexField& f, std::span<const cplx> symbol);

}  // namespace hma
