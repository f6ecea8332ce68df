#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "gepup/assembly.hpp"
#include "gepup/fe_space.hpp"
#include "gepup/linsolve.hpp"
#include "gepup/mesh.hpp"

namespace gepup {

using VelocityField = std::array<Vector, 2>;

/// A benchmark problem. Null forcing or dg_dt means zero.
struct CaseDefinition {
  std::string name;
  RectDomain domain;
  double nu = 0.0;
  VectorFunction f;
  VectorFunction g;
  VectorFunction dg_dt;
  VectorFunction u0;

  VectorFunction exact_u;
  VectorGradientFunction exact_grad_u;
  ScalarFunction exact_p;
  std::function<Vec2(Vec2, double)> exact_grad_p;

  /// Drop u.grad(u) everywhere (turns the momentum step into a heat step).
  bool include_convection = true;

  bool has_exact() const { return static_cast<bool>(exact_u); }
};

/// Boundary flux of g at time t, by face quadrature.
double boundary_flux(const FeSpace& space, const CaseDefinition& c, double t);
/// Throws std::invalid_argument if |boundary flux of g| > tol at t.
void check_compatibility(const FeSpace& space, const CaseDefinition& c, double t,
                         double tol = 1e-10);

struct GepupState {
  double t = 0.0;
  VelocityField W;
  VelocityField U;
  Vector Phi;
  Vector Q;
};

/// Iteration counts of the last solves of each kind.
struct SolveStats {
  int helmholtz = 0;
  int poisson_phi = 0;
  int poisson_q = 0;
  int mass = 0;
};

/// One Q_k space with its nested hierarchy, cached M and A, and the
/// preconditioners used by the GePUP solves.
class Discretization {
 public:
  Discretization(const RectDomain& domain, std::array<int, 2> base_cells, int level, int degree,
                 CgSettings tolerances = {});

  const FeSpace& space() const { return spaces_.back(); }
  const std::vector<FeSpace>& hierarchy() const { return spaces_; }
  const CsrMatrix& mass() const { return mass_.back(); }
  const CsrMatrix& stiffness() const { return stiff_.back(); }
  /// M * 1, the weights of the discrete mean.
  const Vector& mass_weights() const { return mass_weights_; }
  const CgSettings& tolerances() const { return tol_; }

  /// Mean-zero Poisson solve A x = b (x holds the initial guess).
  SolverReport solve_poisson(std::span<const double> b, Vector& x) const;
  /// M x = b by Jacobi-preconditioned CG (x holds the initial guess).
  SolverReport solve_mass(std::span<const double> b, Vector& x) const;
  /// (M + c A) x = rhs with x = values on boundary DoFs. Rebuilds the
  /// operator and its multigrid preconditioner when c changes.
  SolverReport solve_helmholtz(double c, std::span<const double> rhs,
                               std::span<const double> boundary_values, Vector& x);

  int helmholtz_rebuilds() const { return helmholtz_rebuilds_; }

 private:
  void rebuild_helmholtz(double c);

  std::vector<FeSpace> spaces_;
  std::vector<CsrMatrix> mass_;
  std::vector<CsrMatrix> stiff_;
  std::vector<CsrMatrix> prolong_;
  Vector mass_weights_;
  CgSettings tol_;
  std::unique_ptr<GmgPreconditioner> poisson_gmg_;
  std::unique_ptr<JacobiPreconditioner> mass_jacobi_;

  double helm_c_ = -1.0;
  CsrMatrix helm_full_;
  CsrMatrix helm_eliminated_;
  std::unique_ptr<GmgPreconditioner> helm_gmg_;
  int helmholtz_rebuilds_ = 0;
};

/// Momentum load (f - u.grad(u) - grad q, eta_i) for both components.
VelocityField eval_Fw(const FeSpace& space, const VelocityField& U, std::span<const double> Q,
                      const CaseDefinition& c, double t);
Vector eval_Fw(const FeSpace& space, const VelocityField& U, std::span<const double> Q,
               const CaseDefinition& c, double t, int d);
/// Projection load (w, grad eta_i) - <g.n, eta_i>.
Vector eval_Fphi(const FeSpace& space, const VelocityField& W, const CaseDefinition& c, double t);
/// (w_d - d(phi)/dx_d, eta_i) for both components.
VelocityField eval_Fu(const FeSpace& space, const VelocityField& W, std::span<const double> Phi);
/// Pressure load (f - u.grad(u), grad eta_i) + nu <curl u, t.grad(eta_i)> - <n.dg/dt, eta_i>.
Vector eval_Fq(const FeSpace& space, const VelocityField& U, const CaseDefinition& c, double t);

struct Projection {
  VelocityField U;
  Vector Phi;
};

/// Discrete Leray projection. `phi_guess` warm-starts the potential solve,
/// `u_guess` the mass solves.
Projection leray_project(const Discretization& disc, const VelocityField& W,
                         const CaseDefinition& c, double t, SolveStats* stats = nullptr,
                         const Vector* phi_guess = nullptr, const VelocityField* u_guess = nullptr);
Vector compute_pressure(const Discretization& disc, const VelocityField& U, const CaseDefinition& c,
                        double t, SolveStats* stats = nullptr, const Vector* guess = nullptr);

/// L2 norm of div w over the domain.
double divergence_l2(const FeSpace& space, const VelocityField& W);
/// 1/2 sum_d W_d^T M W_d
double kinetic_energy(const Discretization& disc, const VelocityField& W);

/// Builds the state at t from a given non-solenoidal velocity W: projects,
/// extracts the pressure, and keeps W as given.
GepupState state_from_w(const Discretization& disc, VelocityField W, const CaseDefinition& c,
                        double t);
/// Initial state: W = U = Leray projection of the interpolant of u0.
GepupState initial_state(const Discretization& disc, const CaseDefinition& c, double t0);

}  // namespace gepup
