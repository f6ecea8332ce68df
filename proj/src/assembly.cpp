#include "gepup/assembly.hpp"

#include <cmath>

namespace gepup {

CsrMatrix make_sparsity(const FeSpace& space) {
  std::vector<std::vector<int>> rows(space.n_dofs());
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    for (int i : dofs) rows[i].insert(rows[i].end(), dofs.begin(), dofs.end());
  }
  return CsrMatrix::from_pattern(space.n_dofs(), space.n_dofs(), std::move(rows));
}

namespace {

using Real = long double;

// Gauss-Legendre rule on [0, 1] in extended precision.
void gauss_rule(int n, std::vector<Real>& x, std::vector<Real>& w) {
  x.assign(n, 0.5L);
  w.assign(n, 0.0L);
  const Real pi = 3.141592653589793238462643383279502884L;
  auto legendre = [n](Real t, Real& p, Real& dp) {
    Real p0 = 1.0L, p1 = t;
    for (int m = 2; m <= n; ++m) {
      const Real p2 = ((2 * m - 1) * t * p1 - (m - 1) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    p = n == 1 ? t : p1;
    dp = n * (t * p - (n == 1 ? 1.0L : p0)) / (t * t - 1.0L);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real t = std::cos(pi * (i + 0.75L) / (n + 0.5L)), p = 0, dp = 1;
    for (int it = 0; it < 100; ++it) {
      legendre(t, p, dp);
      const Real dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-19L) break;
    }
    legendre(t, p, dp);
    x[i] = 0.5L * (1.0L - t);
    x[n - 1 - i] = 0.5L * (1.0L + t);
    w[i] = w[n - 1 - i] = 1.0L / ((1.0L - t * t) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.5L;
}

std::vector<Real> lobatto_nodes(int k) {
  switch (k) {
    case 1:
      return {0.0L, 1.0L};
    case 2:
      return {0.0L, 0.5L, 1.0L};
    case 3: {
      const Real s = 0.5L / std::sqrt(5.0L);
      return {0.0L, 0.5L - s, 0.5L + s, 1.0L};
    }
    default: {
      const Real s = 0.5L * std::sqrt(3.0L / 7.0L);
      return {0.0L, 0.5L - s, 0.5L, 0.5L + s, 1.0L};
    }
  }
}

// 1D mass and stiffness of the reference basis on [0,1]. Computed in
// extended precision so that entries formed by cancellation in the tensor
// products below still come out correctly rounded.
void reference_1d(int k, std::vector<Real>& m1, std::vector<Real>& k1) {
  const auto nodes = lobatto_nodes(k);
  const int n = k + 1;
  std::vector<Real> qx, qw;
  gauss_rule(k + 2, qx, qw);
  m1.assign(n * n, 0.0L);
  k1.assign(n * n, 0.0L);
  std::vector<Real> v(n), d(n);
  for (std::size_t q = 0; q < qx.size(); ++q) {
    for (int a = 0; a < n; ++a) {
      Real val = 1.0L, der = 0.0L;
      for (int l = 0; l < n; ++l) {
        if (l == a) continue;
        const Real inv = 1.0L / (nodes[a] - nodes[l]);
        der = der * (qx[q] - nodes[l]) * inv + val * inv;
        val *= (qx[q] - nodes[l]) * inv;
      }
      v[a] = val;
      d[a] = der;
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        m1[a * n + b] += qw[q] * v[a] * v[b];
        k1[a * n + b] += qw[q] * d[a] * d[b];
      }
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      m1[b * n + a] = m1[a * n + b];
      k1[b * n + a] = k1[a * n + b];
    }
}

}  // namespace

// Element matrices are tensor products of 1D matrices; exact because the
// rule integrates degree 2k+2 per axis.
std::vector<double> element_mass(const FeSpace& space) {
  const int n = space.degree() + 1, nl = n * n;
  std::vector<Real> m1, k1;
  reference_1d(space.degree(), m1, k1);
  const Real jxw = static_cast<Real>(space.mesh().hx()) * space.mesh().hy();
  std::vector<double> m(nl * nl);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j)
      m[i * nl + j] = static_cast<double>(jxw * m1[(i % n) * n + j % n] * m1[(i / n) * n + j / n]);
  return m;
}

std::vector<double> element_stiffness(const FeSpace& space) {
  const int n = space.degree() + 1, nl = n * n;
  std::vector<Real> m1, k1;
  reference_1d(space.degree(), m1, k1);
  const Real rx = static_cast<Real>(space.mesh().hy()) / space.mesh().hx();
  const Real ry = static_cast<Real>(space.mesh().hx()) / space.mesh().hy();
  std::vector<double> a(nl * nl);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j) {
      const int ax = (i % n) * n + j % n, ay = (i / n) * n + j / n;
      a[i * nl + j] = static_cast<double>(rx * k1[ax] * m1[ay] + ry * m1[ax] * k1[ay]);
    }
  return a;
}

namespace {

CsrMatrix assemble_uniform(const FeSpace& space, const std::vector<double>& local) {
  CsrMatrix mat = make_sparsity(space);
  const int nl = space.n_local();
  auto& vals = mat.values();
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    const auto dofs = space.element_dofs(e);
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nl; ++j) vals[mat.find(dofs[i], dofs[j])] += local[i * nl + j];
  }
  return mat;
}

}  // namespace

CsrMatrix assemble_mass(const FeSpace& space) { return assemble_uniform(space, element_mass(space)); }

CsrMatrix assemble_stiffness(const FeSpace& space) {
  return assemble_uniform(space, element_stiffness(space));
}

}  // namespace gepup
