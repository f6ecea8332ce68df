#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gepup/fe_space.hpp"
#include "gepup/sparse.hpp"

namespace gepup {

class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct CgSettings {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_iter = 2000;
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(std::span<const double> r, std::span<double> z) const override;
};

class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const CsrMatrix& a);
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  Vector inv_diag_;
};

/// Preconditioned CG on x (x holds the initial guess on entry). With
/// `project_constants`, residuals and preconditioned residuals are kept
/// orthogonal to the constant vector (for operators whose nullspace it spans).
SolverReport cg_solve(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                      const Preconditioner& precond, const CgSettings& settings,
                      bool project_constants = false);

std::pair<Vector, SolverReport> cg_solve(const CsrMatrix& a, std::span<const double> b,
                                         const Preconditioner& precond, const CgSettings& settings,
                                         std::span<const double> x0 = {});

/// Solve A x = b for A with constant nullspace: b is projected onto the
/// complement of the constants, and the result is shifted to satisfy
/// sum_j mass_weights_j x_j = 0.
std::pair<Vector, SolverReport> neumann_solve(const CsrMatrix& a, std::span<const double> b,
                                              std::span<const double> mass_weights,
                                              const Preconditioner& precond,
                                              const CgSettings& settings,
                                              std::span<const double> x0 = {});

/// Shifts x by a constant so that weights . x = 0.
void remove_weighted_mean(std::span<double> x, std::span<const double> weights);

/// Decouples constrained rows and columns, keeping their diagonal entries so
/// that the eliminated system stays as well scaled as the original one.
CsrMatrix eliminate_constrained(const CsrMatrix& k, const std::vector<char>& constrained);
/// Right-hand side for the eliminated system: constrained entries carry
/// k_ii times the prescribed values, free entries are corrected by the
/// constrained columns.
Vector eliminated_rhs(const CsrMatrix& k, std::span<const double> rhs,
                      const std::vector<char>& constrained, std::span<const double> values);

struct GmgSettings {
  double damping = 0.6;
  int pre_sweeps = 3;
  int post_sweeps = 3;
  int dense_coarse_limit = 2000;
  int coarse_sweeps = 50;
};

/// FE embedding of a coarse Q_k space into the nested fine Q_k space.
CsrMatrix build_prolongation(const FeSpace& coarse, const FeSpace& fine);

/// Symmetric V-cycle with damped Jacobi smoothing on a nested hierarchy.
class GmgPreconditioner final : public Preconditioner {
 public:
  /// `operators` run coarsest to finest; `prolongations[l]` maps level l-1
  /// to level l (entry 0 is ignored). `constrained`, if non-empty, flags
  /// eliminated Dirichlet DoFs per level. `singular` marks operators whose
  /// nullspace is the constant vector.
  GmgPreconditioner(std::vector<CsrMatrix> operators, std::vector<CsrMatrix> prolongations,
                    GmgSettings settings, bool singular,
                    std::vector<std::vector<char>> constrained = {});

  void apply(std::span<const double> r, std::span<double> z) const override;
  int n_levels() const { return static_cast<int>(levels_.size()); }
  const CsrMatrix& op(int level) const { return levels_[level].op; }

 private:
  struct Level {
    CsrMatrix op;
    Vector inv_diag;
    CsrMatrix prolong;
    CsrMatrix restrict_;
    std::vector<char> constrained;
    mutable Vector res, tmp, rc, xc;
  };

  void vcycle(int l, std::span<const double> r, std::span<double> x) const;
  void smooth(const Level& lv, std::span<const double> r, std::span<double> x, int sweeps,
              bool zero_guess) const;
  void coarse_solve(std::span<const double> r, std::span<double> x) const;

  std::vector<Level> levels_;
  GmgSettings settings_;
  bool singular_;
  // dense Cholesky factor of the (regularized) coarsest operator, row-major
  std::vector<double> chol_;
  int coarse_n_ = 0;
};

}  // namespace gepup
