#include "hma/krylov.hpp"

#include <cmath>

#include "hma/grid.hpp"

namespace hma {

namespace {

double norm2(std::span<const double> v) { return std::sqrt(pairwise_dot(v, v)); }

}  // namespace

GmresResult gmres(const LinearOperator& a, const LinearOperator& preconditioner, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opts) {
  const std::size_t n = b.size();
  const int m = opts.restart;
  GmresResult result;

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }

  std::vector<double> r(n), w(n), z(n);
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(m + 1), std::vector<double>(n));
  std::vector<double> h(static_cast<std::size_t>((m + 1) * m));
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)),
      g(static_cast<std::size_t>(m + 1));
  auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(i * m + j)]; };

  while (result.iterations < opts.max_iterations) {
    a(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    double beta = norm2(r);
    result.relative_residual = beta / bnorm;
    if (result.relative_residual <= opts.relative_tol) {
      result.converged = true;
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    int k = 0;
    for (; k < m && result.iterations < opts.max_iterations; ++k) {
      ++result.iterations;
      const auto uk = static_cast<std::size_t>(k);
      preconditioner(basis[uk], z);
      a(z, w);
      // Modified Gram-Schmidt.
      for (int i = 0; i <= k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double hij = pairwise_dot(w, basis[ui]);
        H(i, k) = hij;
        for (std::size_t t = 0; t < n; ++t) w[t] -= hij * basis[ui][t];
      }
      const double hnext = norm2(w);
      H(k + 1, k) = hnext;
      if (hnext > 0.0) {
        for (std::size_t t = 0; t < n; ++t) basis[uk + 1][t] = w[t] / hnext;
      }
      for (int i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double t0 = cs[ui] * H(i, k) + sn[ui] * H(i + 1, k);
        H(i + 1, k) = -sn[ui] * H(i, k) + cs[ui] * H(i + 1, k);
        H(i, k) = t0;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      cs[uk] = denom == 0.0 ? 1.0 : H(k, k) / denom;
      sn[uk] = denom == 0.0 ? 0.0 : H(k + 1, k) / denom;
      H(k, k) = cs[uk] * H(k, k) + sn[uk] * H(k + 1, k);
      H(k + 1, k) = 0.0;
      g[uk + 1] = -sn[uk] * g[uk];
      g[uk] = cs[uk] * g[uk];
      result.relative_residual = std::abs(g[uk + 1]) / bnorm;
      if (result.relative_residual <= opts.relative_tol || hnext == 0.0) {
        ++k;
        break;
      }
    }

    // Back-substitute y, then x += M^{-1} V y.
    std::vector<double> y(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      double s = g[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] = s / H(i, i);
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      const double yj = y[static_cast<std::size_t>(j)];
      const auto& v = basis[static_cast<std::size_t>(j)];
      for (std::size_t t = 0; t < n; ++t) w[t] += yj * v[t];
    }
    preconditioner(w, z);
    for (std::size_t t = 0; t < n; ++t) x[t] += z[t];
  }

  a(x, w);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
  result.relative_residual = norm2(r) / bnorm;
  result.converged = result.relative_residual <= opts.relative_tol;
  return result;
}

}  // namespace hma
