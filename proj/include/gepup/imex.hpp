#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gepup/gepup.hpp"

namespace gepup {

enum class TableauId { ARK4, ARK5 };

/// "ark4" / "ark5" (case-insensitive); anything else throws std::invalid_argument.
TableauId parse_tableau_id(const std::string& name);
std::string to_string(TableauId id);

/// Paired ERK / ESDIRK coefficients sharing b and c.
struct ButcherTableau {
  std::string name;
  int stages = 0;
  int order = 0;
  std::vector<double> ae;  // row-major, stages x stages
  std::vector<double> ai;
  std::vector<double> b;
  std::vector<double> c;

  double AE(int i, int j) const { return ae[i * stages + j]; }
  double AI(int i, int j) const { return ai[i * stages + j]; }
  double gamma() const { return stages > 1 ? AI(1, 1) : 0.0; }
};

ButcherTableau load_tableau(TableauId id);

struct TableauCheck {
  std::string name;
  double residual = 0.0;
  bool passed = false;
};

struct TableauReport {
  std::vector<TableauCheck> checks;

  bool ok() const;
  std::vector<std::string> violations() const;
};

/// Structural, stiff-accuracy and order (up to min(order, 3)) conditions.
TableauReport validate_tableau(const ButcherTableau& t, double tol = 1e-13);

/// Stability function R(z) = 1 + z b^T (I - z A_I)^{-1} 1 of the implicit part.
double esdirk_stability(const ButcherTableau& t, double z);

struct StepperConfig {
  TableauId tableau = TableauId::ARK4;
  double courant = 0.8;
  double dt_max = 0.1;
};

/// The three semi-discrete maps the stepper calls between stage solves.
struct StageOperators {
  std::function<VelocityField(const VelocityField& U, const Vector& Q, double t)> momentum;
  std::function<Projection(const VelocityField& W, double t, const Projection& guess)> project;
  std::function<Vector(const VelocityField& U, double t, const Vector& guess)> pressure;
};

/// The GePUP operator chain; solve statistics accumulate into `stats`.
StageOperators gepup_operators(const Discretization& disc, const CaseDefinition& c,
                               SolveStats* stats = nullptr);

struct StepInfo {
  SolveStats iterations;  // summed over the step
  double divergence_w_star = 0.0;
};

/// Fully discrete IMEX step for a fixed discretization and case.
class Stepper {
 public:
  Stepper(Discretization& disc, const CaseDefinition& c, StepperConfig config);
  /// Replaces the GePUP operators (for isolating the time integrator).
  void set_operators(StageOperators ops) { ops_ = std::move(ops); }

  const ButcherTableau& tableau() const { return tableau_; }
  const StepperConfig& config() const { return config_; }

  StepInfo advance(GepupState& state, double dt);

 private:
  VelocityField boundary_values(double t) const;

  Discretization& disc_;
  const CaseDefinition& case_;
  StepperConfig config_;
  ButcherTableau tableau_;
  SolveStats stats_;
  StageOperators ops_;
  CsrMatrix mass_eliminated_;
  std::unique_ptr<JacobiPreconditioner> mass_eliminated_jacobi_;
};

GepupState advance_step(const GepupState& state, double dt, const StepperConfig& config,
                        const CaseDefinition& c, Discretization& disc);

/// Courant-limited step: Cr / (k max_K |u|_{Linf(K)} / h_K), or dt_max for
/// (numerically) zero velocity.
double courant_dt(const FeSpace& space, const VelocityField& U, double courant, double dt_max);

}  // namespace gepup
