#include <doctest.h>

#include <cmath>
#include <random>

#include "hma/spectral.hpp"

using namespace hma;

namespace {

// Random real trigonometric polynomial with wavenumbers |k| <= kmax on every axis.
ScalarField random_trig(const TorusGrid& g, std::mt19937_64& rng, int modes = 6, int kmax = 2) {
  std::uniform_int_distribution<int> kd(-kmax, kmax);
  std::uniform_real_distribution<double> a(-1, 1), ph(0, kTwoPi);
  std::vector<std::pair<std::array<int, kMaxAxes>, std::pair<double, double>>> terms;
  for (int m = 0; m < modes; ++m) {
    std::array<int, kMaxAxes> k{};
    for (int ax = 0; ax < g.axes(); ++ax) k[ax] = kd(rng);
    terms.push_back({k, {a(rng), ph(rng)}});
  }
  return ScalarField::sample(g, [&](const auto& x) {
    double s = 0.0;
    for (const auto& [k, c] : terms) {
      double arg = c.second;
      for (int ax = 0; ax < g.axes(); ++ax) arg += k[ax] * x[ax];
      s += c.first * std::cos(arg);
    }
    return s;
  });
}

}  // namespace

TEST_CASE("fft round trip") {
  const TorusGrid g = TorusGrid::build(2, {4, 6, 8, 4});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(g.point_count());
  for (auto& x : v) x = {nd(rng), nd(rng)};
  const auto back = fft_inverse(g, fft_forward(g, v));
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(back[i] - v[i]));
  CHECK(err < 1e-14);
}

TEST_CASE("spectral_partial of a constant is zero") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  for (int j = 0; j < 2; ++j)
    for (bool c : {false, true}) CHECK(sup_abs(spectral_partial(ScalarField(g, 3.5), j, c)) < 1e-14);
}

TEST_CASE("spectral_partial on single modes") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::cos(x[0]); });
  const ComplexField d0 = spectral_partial(f, 0, false);
  const ComplexField d0b = spectral_partial(f, 0, true);
  double err = 0.0;
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    const double expect = -0.5 * std::sin(g.position(p)[0]);
    err = std::max({err, std::abs(d0[p] - cplx(expect, 0)), std::abs(d0b[p] - cplx(expect, 0))});
  }
  CHECK(err <= 1e-12);
  CHECK(sup_abs(spectral_partial(f, 1, false)) < 1e-14);

  // f = sin(x_1): d/dz^0 = (1/2)(d_x - i d_y) f = -(i/2) cos(x_1).
  const auto s = ScalarField::sample(g, [](const auto& x) { return std::sin(x[1]); });
  const ComplexField ds = spectral_partial(s, 0, false);
  err = 0.0;
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    err = std::max(err, std::abs(ds[p] - cplx(0, -0.5 * std::cos(g.position(p)[1]))));
  }
  CHECK(err <= 1e-12);
}

TEST_CASE("spectral_partial against centered finite differences") {
  // f = sin(x_0) sin(x_1); derivatives from the analytic expression by
  // centered differences at h = 2pi/256.
  const TorusGrid g = TorusGrid::build(2, {16, 16, 4, 4});
  const auto fn = [](double x0, double x1) { return std::sin(x0) * std::sin(x1); };
  const auto f = ScalarField::sample(g, [&](const auto& x) { return fn(x[0], x[1]); });
  const double h = kTwoPi / 256;
  for (bool conj : {false, true}) {
    const ComplexField d = spectral_partial(f, 0, conj);
    double err = 0.0;
    for (std::size_t p = 0; p < g.point_count(); ++p) {
      const auto x = g.position(p);
      const double dx = (fn(x[0] + h, x[1]) - fn(x[0] - h, x[1])) / (2 * h);
      const double dy = (fn(x[0], x[1] + h) - fn(x[0], x[1] - h)) / (2 * h);
      const cplx fd = 0.5 * cplx(dx, conj ? dy : -dy);
      err = std::max(err, std::abs(d[p] - fd));
    }
    CHECK(err <= 1e-3);
  }
}

TEST_CASE("Nyquist components are dropped by first derivatives") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 4, 4});
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::cos(4 * x[0]); });
  CHECK(sup_abs(spectral_partial(f, 0, false)) < 1e-13);
  // The diagonal second derivative keeps it: d_0 dbar_0 cos(4x) = -(16/4) cos(4x).
  const ComplexField h = spectral_ddbar_component(to_complex(f), 0, 0);
  double err = 0.0;
  for (std::size_t p = 0; p < g.point_count(); ++p) err = std::max(err, std::abs(h[p] + 4.0 * f[p]));
  CHECK(err < 1e-12);
}

TEST_CASE("d and dbar commute and compose to ddbar on band-limited fields") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  std::mt19937_64 rng(21);
  const ScalarField f = random_trig(g, rng);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const ComplexField a = spectral_partial(spectral_partial(f, j, true), i, false);
      const ComplexField b = spectral_partial(spectral_partial(f, i, false), j, true);
      const ComplexField c = spectral_ddbar_component(to_complex(f), i, j);
      double e1 = 0.0, e2 = 0.0;
      for (std::size_t p = 0; p < g.point_count(); ++p) {
        e1 = std::max(e1, std::abs(a[p] - b[p]));
        e2 = std::max(e2, std::abs(a[p] - c[p]));
      }
      CHECK(e1 < 1e-12);
      CHECK(e2 < 1e-12);
    }
}

TEST_CASE("symbol relations: dbar f = conj(d conj f), ddbar Hermitian") {
  const TorusGrid g = TorusGrid::build(3, {4, 4, 6, 6, 4, 4});
  for (std::size_t m = 0; m < g.point_count(); m += 13) {
    const Wavevector w = wavevector(g, m);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(partial_symbol(w, j, true) + std::conj(partial_symbol(w, j, false))) == 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(ddbar_symbol(w, i, j) - std::conj(ddbar_symbol(w, j, i))) < 1e-15);
  }
}
