#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gepup/linsolve.hpp"

namespace gepup {

namespace {

void project_out_constant(std::span<double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void IdentityPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  std::copy(r.begin(), r.end(), z.begin());
}

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& a) : inv_diag_(a.diagonal()) {
  for (double& d : inv_diag_) {
    if (!(d > 0.0)) throw std::invalid_argument("Jacobi preconditioner needs a positive diagonal");
    d = 1.0 / d;
  }
}

void JacobiPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
}

SolverReport cg_solve(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                      const Preconditioner& precond, const CgSettings& settings,
                      bool project_constants) {
  const std::size_t n = b.size();
  if (a.n_rows() != static_cast<int>(n) || x.size() != n)
    throw std::invalid_argument("cg_solve: dimension mismatch");
  if (!all_finite(b) || !all_finite(x) || !a.all_finite())
    throw std::invalid_argument("cg_solve: non-finite values in matrix or right-hand side");

  SolverReport report;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    return report;
  }
  const double tol = std::max(settings.rel_tol * bnorm, settings.abs_tol);

  Vector r(n), z(n), p(n), q(n);
  a.multiply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (project_constants) project_out_constant(r);
  double rnorm = norm2(r);
  report.relative_residual = rnorm / bnorm;
  if (rnorm <= tol) {
    report.converged = true;
    return report;
  }
  precond.apply(r, z);
  if (project_constants) project_out_constant(z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= settings.max_iter; ++it) {
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw NumericalBreakdown("cg_solve: non-positive curvature p^T A p = " + std::to_string(pq) +
                               " at iteration " + std::to_string(it));
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    rnorm = norm2(r);
    report.iterations = it;
    report.relative_residual = rnorm / bnorm;
    if (rnorm <= tol) {
      report.converged = true;
      return report;
    }
    precond.apply(r, z);
    if (project_constants) project_out_constant(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return report;
}

std::pair<Vector, SolverReport> cg_solve(const CsrMatrix& a, std::span<const double> b,
                                         const Preconditioner& precond, const CgSettings& settings,
                                         std::span<const double> x0) {
  Vector x(b.size(), 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());
  const auto report = cg_solve(a, b, x, precond, settings);
  return {std::move(x), report};
}

void remove_weighted_mean(std::span<double> x, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double shift = dot(weights, x) / total;
  for (double& v : x) v -= shift;
}

std::pair<Vector, SolverReport> neumann_solve(const CsrMatrix& a, std::span<const double> b,
                                              std::span<const double> mass_weights,
                                              const Preconditioner& precond,
                                              const CgSettings& settings,
                                              std::span<const double> x0) {
  Vector rhs(b.begin(), b.end());
  project_out_constant(rhs);
  Vector x(b.size(), 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());
  const auto report = cg_solve(a, rhs, x, precond, settings, true);
  remove_weighted_mean(x, mass_weights);
  return {std::move(x), report};
}

CsrMatrix eliminate_constrained(const CsrMatrix& k, const std::vector<char>& constrained) {
  CsrMatrix out = k;
  auto& vals = out.values();
  const auto& rp = out.row_ptr();
  const auto& cols = out.cols();
  for (int i = 0; i < out.n_rows(); ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p) {
      const int j = cols[p];
      if ((constrained[i] || constrained[j]) && i != j) vals[p] = 0.0;
    }
  return out;
}

Vector eliminated_rhs(const CsrMatrix& k, std::span<const double> rhs,
                      const std::vector<char>& constrained, std::span<const double> values) {
  Vector out(rhs.begin(), rhs.end());
  const auto& rp = k.row_ptr();
  const auto& cols = k.cols();
  const auto& vals = k.values();
  for (int i = 0; i < k.n_rows(); ++i) {
    if (constrained[i]) {
      out[i] = k.at(i, i) * values[i];
      continue;
    }
    for (int p = rp[i]; p < rp[i + 1]; ++p)
      if (constrained[cols[p]]) out[i] -= vals[p] * values[cols[p]];
  }
  return out;
}

}  // namespace gepup
