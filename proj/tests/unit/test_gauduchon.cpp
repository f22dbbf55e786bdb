#include <doctest.h>

#include <cmath>

#include "hma/forms.hpp"
#include "hma/gauduchon.hpp"

using namespace hma;

namespace {

const cplx I(0.0, 1.0);

HermitianField constant(const TorusGrid& g, const HMat& a) { return HermitianField::constant(g, a); }

HermitianField perturbed(const TorusGrid& g, double amp) {
  const int n = g.dim();
  return HermitianField::sample(g, [&](const auto& x) {
    HMat a = identity_matrix(n);
    a(0, 1) += amp * cplx(std::cos(x[0] + x[3]), 0.5 * std::sin(x[2]));
    a(1, 0) = std::conj(a(0, 1));
    a(0, 0) += amp * std::sin(x[1]);
    a(1, 1) += amp * std::cos(x[0] - x[2]);
    if (n == 3) {
      a(1, 2) += amp * cplx(std::sin(x[4]), std::cos(x[1]));
      a(2, 1) = std::conj(a(1, 2));
      a(2, 2) += amp * std::cos(x[5] + x[0]);
    }
    return a;
  });
}

ScalarField potential(const TorusGrid& g, double amp) {
  return ScalarField::sample(g, [&](const auto& x) {
    double s = amp * std::cos(x[0] + x[2]) + 0.5 * amp * std::sin(x[1] - x[3]);
    if (g.dim() == 3) s += 0.5 * amp * std::cos(x[4] - x[1]);
    return s;
  });
}

HermitianField kahler(const TorusGrid& g, double amp) {
  return constant(g, identity_matrix(g.dim())) + ddbar(potential(g, amp));
}

ScalarField conformal_v(const TorusGrid& g) {
  return ScalarField::sample(g, [](const auto& x) { return 0.2 * std::cos(x[0]) + 0.1 * std::sin(x[1] + x[2]); });
}

ScalarField expf(const ScalarField& f) {
  return map(f, [](double v) { return std::exp(v); });
}

// Re top(i ddbar(w omega^{n-1})) / top(omega_flat^n) through the form-field calculus.
ScalarField defect_via_forms(const ScalarField& w, const HermitianField& metric) {
  const TorusGrid& g = metric.grid();
  const int n = g.dim();
  const FormField wpow = FormField::from_points(g, n - 1, n - 1, [&](std::size_t p) {
    return wedge_power(PointForm::from_matrix(metric.at(p)), n - 1) * cplx(w[p]);
  });
  const FormField top = ddbar(wpow);
  const cplx norm = flat_volume(n).top();
  ScalarField out(g);
  for (std::size_t p = 0; p < g.point_count(); ++p) out[p] = (I * top.at(p).top() / norm).real();
  return out;
}

}  // namespace

TEST_CASE("defect vanishes for w = 1 on Kahler metrics") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  HMat a = identity_matrix(2);
  a(0, 1) = cplx(0.3, 0.2);
  a(1, 0) = std::conj(a(0, 1));
  CHECK(sup_abs(gauduchon_defect(ScalarField(g, 1.0), constant(g, a))) < 1e-14);
  CHECK(sup_abs(gauduchon_defect(ScalarField(g, 1.0), kahler(g, 0.1))) < 1e-10);
  const TorusGrid g3 = TorusGrid::build(3, {6, 6, 6, 6, 6, 6});
  CHECK(sup_abs(gauduchon_defect(ScalarField(g3, 1.0), kahler(g3, 0.1))) < 1e-10);
}

TEST_CASE("defect is linear and rejects nonpositive w") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField m = perturbed(g, 0.1);
  const ScalarField w1 = ScalarField::sample(g, [](const auto& x) { return 1.5 + std::cos(x[0] - x[3]); });
  const ScalarField w2 = ScalarField::sample(g, [](const auto& x) { return 2.0 + std::sin(x[1]) * std::cos(x[2]); });
  const ScalarField lhs = gauduchon_defect(0.7 * w1 + 1.9 * w2, m);
  const ScalarField rhs = 0.7 * gauduchon_defect(w1, m) + 1.9 * gauduchon_defect(w2, m);
  CHECK(sup_abs(lhs - rhs) < 1e-12);
  ScalarField bad(g, 1.0);
  bad[17] = 0.0;
  CHECK_THROWS_AS(gauduchon_defect(bad, m), std::invalid_argument);
}

TEST_CASE("constant-coefficient oracle: P(w) = det(g) * Delta_g w / n") {
  for (int n : {2, 3}) {
    const TorusGrid g = n == 2 ? TorusGrid::build(2, {8, 8, 8, 8}) : TorusGrid::build(3, {4, 4, 4, 4, 4, 4});
    HMat a = identity_matrix(n);
    a(0, 0) = 1.7;
    a(0, 1) = cplx(0.2, -0.4);
    a(1, 0) = std::conj(a(0, 1));
    const HermitianField m = constant(g, a);
    const ScalarField w = ScalarField::sample(g, [](const auto& x) { return 2.0 + std::cos(x[0] + x[3]) + 0.3 * std::sin(x[2]); });
    const ScalarField expect = (determinant(a).real() / n) * chern_laplacian(w, m);
    CHECK(sup_abs(gauduchon_defect(w, m) - expect) < 1e-12);
  }
}

TEST_CASE("spectral product form agrees with the form calculus") {
  for (int n : {2, 3}) {
    const TorusGrid g = n == 2 ? TorusGrid::build(2, {8, 8, 8, 8}) : TorusGrid::build(3, {4, 4, 4, 4, 4, 4});
    const HermitianField m = perturbed(g, 0.15);
    const ScalarField w = ScalarField::sample(g, [](const auto& x) { return 2.0 + std::cos(x[0] + x[3]) + 0.3 * std::sin(x[2]); });
    CHECK(sup_abs(gauduchon_defect(w, m) - defect_via_forms(w, m)) < 1e-12);
  }
}

TEST_CASE("defect integrates to zero") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField m = perturbed(g, 0.2);
  const ScalarField w = ScalarField::sample(g, [](const auto& x) { return 1.5 + std::sin(x[0]) * std::cos(x[3]); });
  CHECK(std::abs(mean(gauduchon_defect(w, m))) < 1e-14);
}

TEST_CASE("Kahler input gives u = 0") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const GauduchonResult r = solve_gauduchon(kahler(g, 0.1));
  CHECK(sup_abs(r.u) <= 1e-8);
  CHECK(r.residual <= 1e-10);
  CHECK(sup(r.u) == 0.0);
}

TEST_CASE("conformally Kahler input recovers u = inf v - v") {
  for (int n : {2, 3}) {
    const TorusGrid g = n == 2 ? TorusGrid::build(2, {8, 8, 8, 8}) : TorusGrid::build(3, {6, 6, 6, 6, 6, 6});
    const ScalarField v = conformal_v(g);
    const HermitianField m = kahler(g, 0.08).scaled(expf(v));
    const GauduchonResult r = solve_gauduchon(m);
    CHECK(sup_abs(r.u - (inf(v) - v)) <= 1e-8);
  }
}

TEST_CASE("generic perturbed metric") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  const HermitianField m = perturbed(g, 0.1);
  const GauduchonResult r = solve_gauduchon(m);
  CHECK(r.residual <= 1e-8);
  CHECK(sup(r.u) == 0.0);
  CHECK(inf(r.u) < -1e-4);
  CHECK(r.complement_ratio > 1e-3);

  // Re-verify: omega_G = e^u omega has d dbar omega_G^{n-1} = 0, computed
  // through the form calculus from the scaled metric.
  const HermitianField mg = m.scaled(expf(r.u));
  const ScalarField d = defect_via_forms(ScalarField(g, 1.0), mg);
  CHECK(sup_abs(d) <= 1e-8);
  const FormField wg = FormField::kahler_form(mg);
  CHECK(ddbar(wg).sup_norm() <= 1e-8);

  SUBCASE("scale invariance") {
    const GauduchonResult s = solve_gauduchon(m.scaled(3.7));
    CHECK(sup_abs(s.u - r.u) <= 1e-10);
  }
  SUBCASE("conformal covariance") {
    const ScalarField v = conformal_v(g);
    const GauduchonResult s = solve_gauduchon(m.scaled(expf(v)));
    ScalarField expect = r.u - v;
    expect = expect - sup(expect);
    CHECK(sup_abs(s.u - expect) <= 1e-8);
  }
}

TEST_CASE("generic perturbed metric, n = 3") {
  const TorusGrid g = TorusGrid::build(3, {6, 6, 6, 6, 6, 6});
  const HermitianField m = perturbed(g, 0.1);
  const GauduchonResult r = solve_gauduchon(m);
  CHECK(r.residual <= 1e-8);
  const HermitianField mg = m.scaled(expf(r.u));
  CHECK(sup_abs(defect_via_forms(ScalarField(g, 1.0), mg)) <= 1e-8);
}

TEST_CASE("degenerate coefficient fields are reported") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  HMat a = identity_matrix(2);
  a(1, 1) = 0.0;
  const HermitianField m = constant(g, a);
  CHECK_THROWS_AS(kernel_vector(GauduchonOperator(m)), KernelDegeneracyError);
  CHECK_THROWS_AS(solve_gauduchon(m), PositivityError);
}

TEST_CASE("classify_metric") {
  const TorusGrid g = TorusGrid::build(2, {8, 8, 8, 8});
  HMat a = identity_matrix(2);
  a(0, 0) = 2.0;
  const MetricClass c0 = classify_metric(constant(g, a));
  CHECK(c0.kahler());
  CHECK(c0.balanced());
  CHECK(c0.gauduchon());
  CHECK(c0.condition_k12());

  const MetricClass ck = classify_metric(kahler(g, 0.1));
  CHECK(ck.kahler());
  CHECK(ck.condition_k12());

  const MetricClass cp = classify_metric(perturbed(g, 0.1));
  CHECK_FALSE(cp.kahler());
  CHECK(cp.d_omega > 1e-4);
  CHECK_FALSE(cp.gauduchon());

  // e^v I with nonconstant v is not Kahler when n = 2.
  const MetricClass cc = classify_metric(constant(g, identity_matrix(2)).scaled(expf(conformal_v(g))));
  CHECK_FALSE(cc.kahler());
  CHECK_FALSE(cc.pluriclosed());

  const TorusGrid g3 = TorusGrid::build(3, {6, 6, 6, 6, 6, 6});
  const MetricClass c3 = classify_metric(kahler(g3, 0.1));
  CHECK(c3.kahler());
  CHECK(c3.balanced());
  CHECK(c3.condition_k12());
  const MetricClass p3 = classify_metric(perturbed(g3, 0.1));
  CHECK_FALSE(p3.kahler());
  CHECK(p3.ddbar_omega2 > 1e-6);
}
