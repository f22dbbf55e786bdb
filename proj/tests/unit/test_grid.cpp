#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hma/grid.hpp"

using namespace hma;

namespace {

ScalarField random_field(const TorusGrid& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}

// {0 on the half x_0 < pi, value elsewhere}
ScalarField two_valued(const TorusGrid& g, double value) {
  return ScalarField::sample(g, [&](const auto& x) { return x[0] < kPi ? 0.0 : value; });
}

}  // namespace

TEST_CASE("build_grid validates its arguments") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  CHECK(g.point_count() == 4096);
  CHECK(g.cell_volume() == doctest::Approx(std::pow(kTwoPi, 4) / 4096).epsilon(1e-15));
  CHECK(TorusGrid::build(3, {4, 4, 4, 4, 4, 4}).point_count() == 4096);

  CHECK_THROWS_AS(TorusGrid::build(2, {7, 8, 8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::build(2, {2, 8, 8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::build(1, {8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::build(4, std::vector<int>(8, 4)), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid::build(2, {8, 8, 8}), std::invalid_argument);
}

TEST_CASE("cell volume times point count is the torus volume") {
  for (const auto& g : {TorusGrid::build(2, {4, 6, 8, 10}), TorusGrid::build(3, {4, 4, 6, 4, 4, 8})}) {
    CHECK(g.cell_volume() * static_cast<double>(g.point_count()) ==
          doctest::Approx(std::pow(kTwoPi, 2 * g.dim())).epsilon(1e-15));
  }
}

TEST_CASE("multi_index and flat_index are inverse") {
  const TorusGrid g = TorusGrid::build(2, {4, 6, 8, 10});
  for (std::size_t p = 0; p < g.point_count(); p += 37) CHECK(g.flat_index(g.multi_index(p)) == p);
  const auto x = g.position(g.flat_index({1, 2, 3, 4}));
  CHECK(x[0] == doctest::Approx(kTwoPi / 4));
  CHECK(x[3] == doctest::Approx(kTwoPi * 4 / 10));
}

TEST_CASE("integrate: constants, orthogonality and cos^2") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const Measure flat = Measure::flat(g);
  CHECK(integrate(ScalarField(g, 1.0), flat) == doctest::Approx(std::pow(kTwoPi, 4)).epsilon(1e-14));
  const auto c = ScalarField::sample(g, [](const auto& x) { return std::cos(x[0]); });
  CHECK(std::abs(integrate(c, flat)) < 1e-12);
  // int_0^{2pi} cos^2 = pi, times (2pi)^3 for the other axes.
  const auto c2 = ScalarField::sample(g, [](const auto& x) { return std::cos(x[0]) * std::cos(x[0]); });
  CHECK(integrate(c2, flat) == doctest::Approx(kPi * std::pow(kTwoPi, 3)).epsilon(1e-13));
}

TEST_CASE("integrate is linear and rejects grid mismatch") {
  const TorusGrid g = TorusGrid::build(2, {4, 4, 6, 6});
  std::mt19937_64 rng(7);
  const Measure m = Measure::from_density(random_field(g, rng, 0.5, 2.0));
  for (int t = 0; t < 20; ++t) {
    const ScalarField f = random_field(g, rng);
    const ScalarField h = random_field(g, rng);
    const double a = 1.7, b = -0.3;
    const double lhs = integrate(a * f + b * h, m);
    const double rhs = a * integrate(f, m) + b * integrate(h, m);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(a * integrate(f, m)) + std::abs(b * integrate(h, m)) + 1.0));
  }
  const TorusGrid other = TorusGrid::build(2, {4, 4, 4, 4});
  CHECK_THROWS_AS(integrate(ScalarField(other, 1.0), m), std::invalid_argument);
}

TEST_CASE("measure rejects nonpositive densities") {
  const TorusGrid g = TorusGrid::build(2, {4, 4, 4, 4});
  ScalarField d(g, 1.0);
  d[3] = 0.0;
  CHECK_THROWS_AS(Measure::from_density(d), std::invalid_argument);
}

TEST_CASE("lp_norm examples") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 4, 4});
  const Measure flat = Measure::flat(g);
  for (double p : {1.0, 2.0, 7.5, 300.0}) CHECK(lp_norm(ScalarField(g, -3.0), p, flat) == doctest::Approx(3.0));
  CHECK_THROWS_AS(lp_norm(ScalarField(g, 1.0), 0.5, flat), std::invalid_argument);

  // p-mean of {0 on half, 2 on half}: (2^p / 2)^{1/p} = 2 * 2^{-1/p}.
  const ScalarField f = two_valued(g, 2.0);
  for (double p : {1.0, 10.0, 100.0, 1000.0}) {
    CHECK(lp_norm(f, p, flat) == doctest::Approx(2.0 * std::pow(2.0, -1.0 / p)).epsilon(1e-13));
  }
  CHECK(std::abs(lp_norm(f, 1000.0, flat) - 2.0) < 2e-3);
}

TEST_CASE("lp_norm: Jensen and monotonicity in p on random fields") {
  const TorusGrid g = TorusGrid::build(2, {4, 4, 4, 6});
  std::mt19937_64 rng(11);
  const Measure m = Measure::from_density(random_field(g, rng, 0.2, 3.0));
  for (int t = 0; t < 100; ++t) {
    const ScalarField f = random_field(g, rng, -2.0, 2.0);
    // Jensen oracle: (mean |f|)^2 <= mean f^2, computed directly.
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      s1 += std::abs(f[i]) * m.density()[i];
      s2 += f[i] * f[i] * m.density()[i];
    }
    const double mass = pairwise_sum(m.density().values());
    CHECK(s1 / mass <= std::sqrt(s2 / mass) * (1 + 1e-12));
    CHECK(lp_norm(f, 1.0, m) <= lp_norm(f, 2.0, m) * (1 + 1e-12));
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 4.0, 9.0, 33.0, 128.0, 512.0}) {
      const double v = lp_norm(f, p, m);
      CHECK(v >= prev * (1 - 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("sublevel_measure") {
  const TorusGrid g = TorusGrid::build(2, {8, 4, 4, 4});
  const Measure flat = Measure::flat(g);
  const ScalarField zero(g);
  CHECK(sublevel_measure(zero, 0.0, flat) == 1.0);
  CHECK(sublevel_measure(zero, -1.0, flat) == 0.0);
  CHECK(sublevel_measure(two_valued(g, 10.0), 1.0, flat) == doctest::Approx(0.5).epsilon(1e-14));

  std::mt19937_64 rng(5);
  const ScalarField f = random_field(g, rng);
  double prev = 0.0;
  for (double t = -1.2; t <= 1.2; t += 0.05) {
    const double v = sublevel_measure(f, t, flat);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(sublevel_measure(f, sup(f), flat) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pairwise reductions are reproducible") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(100000);
  for (double& x : v) x = u(rng);
  const double a = pairwise_sum(v);
  const double b = pairwise_sum(v);
  CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
  long double exact = 0;
  for (double x : v) exact += x;
  CHECK(std::abs(a - static_cast<double>(exact)) < 1e-11);
}
