#include <doctest.h>

#include <cmath>
#include <random>

#include "hma/forms.hpp"

using namespace hma;

namespace {

const cplx I(0.0, 1.0);

PointForm random_form(int n, int p, int q, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  PointForm f(n, p, q);
  for (unsigned m : bidegree_masks(n, p, q)) f.add(m, {nd(rng), nd(rng)});
  return f;
}

HMat random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  HMat a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = nd(rng);
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = {nd(rng), nd(rng)};
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

double diff(const PointForm& a, const PointForm& b) { return (a - b).max_abs(); }

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

ScalarField trig(const TorusGrid& g, double a, int k0, int k1, int k2, int k3, double phase) {
  return ScalarField::sample(g, [=](const auto& x) { return a * std::cos(k0 * x[0] + k1 * x[1] + k2 * x[2] + k3 * x[3] + phase); });
}

double diff(const FormField& a, const FormField& b) {
  REQUIRE(a.p() == b.p());
  REQUIRE(a.q() == b.q());
  double e = 0.0;
  for (std::size_t s = 0; s < a.masks().size(); ++s)
    for (std::size_t p = 0; p < a.grid().point_count(); ++p)
      e = std::max(e, std::abs(a.coefficient(s)[p] - b.coefficient(s)[p]));
  return e;
}

}  // namespace

TEST_CASE("bidegree masks have binomial counts") {
  for (int n : {2, 3})
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q) CHECK(static_cast<long>(bidegree_masks(n, p, q).size()) == binom(n, p) * binom(n, q));
}

TEST_CASE("basis products") {
  const PointForm a = wedge(PointForm::dz(2, 0), PointForm::dzbar(2, 0));
  const PointForm b = wedge(PointForm::dz(2, 1), PointForm::dzbar(2, 1));
  const PointForm top = wedge(a, b);
  CHECK(top.is_top());
  CHECK(top.top() == cplx(1.0, 0.0));
  // dz^1 ^ dz^0 = -dz^0 ^ dz^1
  const PointForm x = wedge(PointForm::dz(2, 1), PointForm::dz(2, 0));
  const PointForm y = wedge(PointForm::dz(2, 0), PointForm::dz(2, 1));
  CHECK(diff(x, y * -1.0) == 0.0);
  CHECK_THROWS_AS(wedge(top, PointForm::dz(2, 0)), std::invalid_argument);
}

TEST_CASE("flat volume is n! i^n") {
  CHECK(std::abs(flat_volume(2).top() - cplx(2.0) * I * I) < 1e-15);
  CHECK(std::abs(flat_volume(3).top() - cplx(6.0) * I * I * I) < 1e-15);
}

TEST_CASE("odd forms square to zero") {
  std::mt19937_64 rng(1);
  for (int n : {2, 3}) {
    for (int t = 0; t < 50; ++t) {
      const PointForm a = random_form(n, 1, 0, rng);
      CHECK(wedge(a, a).max_abs() < 1e-14);
      const PointForm b = random_form(n, 0, 1, rng);
      CHECK(wedge(b, b).max_abs() < 1e-14);
    }
  }
}

TEST_CASE("associativity and graded commutativity") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 2;
    const PointForm a = random_form(n, 1, 0, rng);
    const PointForm b = random_form(n, 0, 1, rng);
    const PointForm c = random_form(n, 1, 1, rng);
    CHECK(diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-12);
    CHECK(diff(wedge(a, b), wedge(b, a) * -1.0) < 1e-13);
    CHECK(diff(wedge(a, c), wedge(c, a)) < 1e-13);
    if (n == 3) {
      const PointForm d = random_form(n, 1, 1, rng);
      CHECK(diff(wedge(wedge(c, d), a), wedge(c, wedge(d, a))) < 1e-11);
    }
  }
}

TEST_CASE("top coefficient of matrix forms is the mixed discriminant") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const HMat a = random_hermitian(2, rng);
    const HMat b = random_hermitian(2, rng);
    const PointForm ab = wedge(PointForm::from_matrix(a), PointForm::from_matrix(b));
    const std::vector<HMat> m{a, b};
    const cplx expect = 2.0 * mixed_discriminant(m) * (flat_volume(2).top() / 2.0);
    CHECK(std::abs(ab.top() - expect) < 1e-12 * (1 + std::abs(expect)));
  }
  for (int t = 0; t < 50; ++t) {
    std::vector<HMat> m;
    std::vector<PointForm> f;
    for (int k = 0; k < 3; ++k) {
      m.push_back(random_hermitian(3, rng));
      f.push_back(PointForm::from_matrix(m.back()));
    }
    const PointForm prod = point_exterior_product(f);
    CHECK(std::abs(top_ratio(prod, flat_volume(3)) - mixed_discriminant(m)) < 1e-12 * (1 + std::abs(mixed_discriminant(m))));
  }
}

TEST_CASE("one forms build the gradient pairing") {
  // i (sum a_i dz^i) ^ (sum conj(a_j) dzbar^j) = from_matrix(a a^*)
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    std::vector<cplx> a(3), ac(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = {nd(rng), nd(rng)};
      ac[i] = std::conj(a[i]);
    }
    HMat outer(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) outer(i, j) = a[i] * ac[j];
    const PointForm lhs = wedge(PointForm::one_form(a, false), PointForm::one_form(ac, true)) * I;
    CHECK(diff(lhs, PointForm::from_matrix(outer)) < 1e-13);
  }
}

TEST_CASE("wedge_power") {
  std::mt19937_64 rng(5);
  const PointForm w = PointForm::from_matrix(random_hermitian(3, rng));
  CHECK(diff(wedge_power(w, 0), PointForm::scalar(3, 1.0)) == 0.0);
  CHECK(diff(wedge_power(w, 2), wedge(w, w)) < 1e-13);
  CHECK(diff(wedge_power(w, 3), wedge(w, wedge(w, w))) < 1e-12);
}

TEST_CASE("exterior derivatives of form fields") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const ScalarField rho = trig(g, 0.05, 1, 0, 1, 1, 0.3) + trig(g, 0.03, 0, 2, 1, 0, 1.1);
  const ScalarField f = trig(g, 1.0, 1, 1, 0, 1, 0.7);

  SUBCASE("Kahler forms are closed and ddbar-closed") {
    const HermitianField kahler = HermitianField::constant(g, identity_matrix(2)) + ddbar(rho);
    const FormField w = FormField::kahler_form(kahler);
    CHECK(partial(w).sup_norm() < 1e-12);
    CHECK(partial_bar(w).sup_norm() < 1e-12);
  }

  SUBCASE("scalar ddbar agrees with the Hessian field") {
    FormField s(g, 0, 0);
    s.coefficient(0) = to_complex(f);
    const FormField h = ddbar(s);
    const FormField expect = FormField::kahler_form(ddbar(f));  // i sum H dz ^ dzbar
    FormField scaled = FormField::from_points(g, 1, 1, [&](std::size_t p) { return expect.at(p) * (-I); });
    CHECK(diff(h, scaled) < 1e-12);
    CHECK(diff(partial(partial_bar(s)), h) < 1e-12);
    CHECK(diff(partial_bar(partial(s)), FormField::from_points(g, 1, 1, [&](std::size_t p) { return h.at(p) * -1.0; })) < 1e-12);
    CHECK(partial(partial(s)).sup_norm() < 1e-12);
  }

  SUBCASE("Leibniz rule for d'") {
    FormField s(g, 0, 0);
    s.coefficient(0) = to_complex(f);
    const HermitianField metric = HermitianField::sample(g, [](const auto& x) {
      HMat a = identity_matrix(2);
      a(0, 1) = 0.1 * cplx(std::cos(x[2]), std::sin(x[1]));
      a(1, 0) = std::conj(a(0, 1));
      return a;
    });
    const FormField w = FormField::kahler_form(metric);
    const FormField lhs = partial(wedge(s, w));
    const FormField ds = partial(s);
    const FormField dw = partial(w);
    const FormField rhs = FormField::from_points(g, 2, 1, [&](std::size_t p) {
      return wedge(ds.at(p), w.at(p)) + wedge(s.at(p), dw.at(p));
    });
    CHECK(diff(lhs, rhs) < 1e-12);
    CHECK(dw.sup_norm() > 1e-2);
  }
}
