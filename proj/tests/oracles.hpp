#pragma once

// Test-only reference computations, independent of the library's
// quadrature, assembly and solver code paths.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Quad precision (GCC/Clang builtin), so that the oracle has well over ten
/// digits of headroom on the double-precision code it checks.
using Real = __float128;

/// sqrt by Newton iterations started from the long double root.
inline Real real_sqrt(Real x) {
  Real r = std::sqrt(static_cast<long double>(x));
  for (int i = 0; i < 3; ++i) r = 0.5 * (r + x / r);
  return r;
}

/// Polynomial in one variable, coefficients by ascending power.
struct Poly {
  std::vector<Real> c;

  Poly operator*(const Poly& o) const {
    Poly r{std::vector<Real>(c.size() + o.c.size() - 1, 0)};
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    return r;
  }
  Poly derivative() const {
    if (c.size() <= 1) return Poly{{Real(0)}};
    Poly r{std::vector<Real>(c.size() - 1)};
    for (std::size_t i = 1; i < c.size(); ++i) r.c[i - 1] = Real(i) * c[i];
    return r;
  }
  /// Exact integral over [0, len] of p(x/len), via monomials.
  Real integrate_scaled(double len) const {
    Real s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] / Real(i + 1);
    return s * len;
  }
};

/// Lagrange basis polynomials on the given nodes of [0,1], expanded in monomials.
inline std::vector<Poly> lagrange_basis(const std::vector<Real>& nodes) {
  std::vector<Poly> out;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    Poly p{{Real(1)}};
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      if (m == a) continue;
      const Real inv = 1 / (nodes[a] - nodes[m]);
      p = p * Poly{{-nodes[m] * inv, inv}};
    }
    out.push_back(p);
  }
  return out;
}

/// Gauss-Lobatto nodes on [0,1] in closed form.
inline std::vector<Real> lobatto(int k) {
  const Real half = 0.5;
  switch (k) {
    case 1: return {0, 1};
    case 2: return {0, half, 1};
    case 3: {
      const Real s = half / real_sqrt(5);
      return {0, half - s, half + s, 1};
    }
    case 4: {
      const Real s = half * real_sqrt(Real(3) / 7);
      return {0, half - s, half, half + s, 1};
    }
  }
  throw std::invalid_argument("degree");
}

struct DenseMatrix {
  int n = 0;
  std::vector<double> a;
  explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Exact global mass and stiffness matrices for Q_k on an nx-by-ny grid of
/// hx-by-hy cells, built from 1D exact integrals and lattice index arithmetic.
inline void exact_global_matrices(int k, int nx, int ny, double hx, double hy, DenseMatrix& mass,
                                  DenseMatrix& stiff) {
  const auto basis = lagrange_basis(lobatto(k));
  const int n1 = k + 1;
  std::vector<Real> m1x(n1 * n1), k1x(n1 * n1), m1y(n1 * n1), k1y(n1 * n1);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b) {
      const Poly pm = basis[a] * basis[b];
      const Poly pk = basis[a].derivative() * basis[b].derivative();
      m1x[a * n1 + b] = pm.integrate_scaled(hx);
      m1y[a * n1 + b] = pm.integrate_scaled(hy);
      k1x[a * n1 + b] = pk.integrate_scaled(hx) / (Real(hx) * hx);
      k1y[a * n1 + b] = pk.integrate_scaled(hy) / (Real(hy) * hy);
    }
  const int ndx = k * nx + 1;
  const int nd = ndx * (k * ny + 1);
  std::vector<Real> em(static_cast<std::size_t>(nd) * nd, 0), ea(em.size(), 0);
  for (int ej = 0; ej < ny; ++ej)
    for (int ei = 0; ei < nx; ++ei)
      for (int b = 0; b < n1; ++b)
        for (int a = 0; a < n1; ++a)
          for (int d = 0; d < n1; ++d)
            for (int c = 0; c < n1; ++c) {
              const int row = (ej * k + b) * ndx + ei * k + a;
              const int col = (ej * k + d) * ndx + ei * k + c;
              const std::size_t at = static_cast<std::size_t>(row) * nd + col;
              em[at] += m1x[a * n1 + c] * m1y[b * n1 + d];
              ea[at] += k1x[a * n1 + c] * m1y[b * n1 + d] + m1x[a * n1 + c] * k1y[b * n1 + d];
            }
  for (std::size_t i = 0; i < em.size(); ++i) {
    mass.a[i] = static_cast<double>(em[i]);
    stiff.a[i] = static_cast<double>(ea[i]);
  }
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(DenseMatrix m, std::vector<double> b) {
  const int n = m.n;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    for (int j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

/// Minimum-norm solution of a symmetric singular system with constant
/// nullspace: solve the bordered system [A 1; 1^T 0].
inline std::vector<double> pseudoinverse_solve(const DenseMatrix& a, const std::vector<double>& b) {
  const int n = a.n;
  DenseMatrix m(n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, n) = 1.0;
    m(n, i) = 1.0;
  }
  std::vector<double> rhs(b);
  rhs.push_back(0.0);
  auto x = dense_solve(m, rhs);
  x.pop_back();
  return x;
}

// Exhaustive marking oracle: smallest cardinality of a subset reaching
// theta_r * total, and largest cardinality of a subset avoiding `exclude`
// whose sum stays within theta_c * total.
struct MarkingBounds {
  int min_refine = 0;
  int max_coarsen = 0;
};

inline MarkingBounds exhaustive_marking(const std::vector<double>& eta, double theta_r, double theta_c,
                                        const std::vector<int>& exclude) {
  const int n = static_cast<int>(eta.size());
  double total = 0.0;
  for (double v : eta) total += v;
  unsigned excl = 0;
  for (int e : exclude) excl |= 1u << e;
  MarkingBounds b{n + 1, 0};
  if (total == 0.0) return {0, 0};
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int card = 0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) {
        sum += eta[i];
        ++card;
      }
    if (sum >= theta_r * total && card < b.min_refine) b.min_refine = card;
    if (!(mask & excl) && sum <= theta_c * total && card > b.max_coarsen) b.max_coarsen = card;
  }
  return b;
}

}  // namespace oracle
