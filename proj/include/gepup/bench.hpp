#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gepup/gepup.hpp"
#include "gepup/imex.hpp"

namespace gepup {

CaseDefinition taylor_green_case(double re);
/// Axisymmetric vortex of radius 0.2 centred in the unit square, no-slip walls.
CaseDefinition single_vortex_case(double re);
/// Azimuthal speed of the single-vortex profile at distance r from the centre.
double single_vortex_speed(double r);
inline constexpr double kSingleVortexPeakSpeed = 0.068;
/// Unit square cavity with the lid y = 1 moving at (1, 0); corners stay at rest.
CaseDefinition lid_cavity_case(double re);
/// Fluid at rest with homogeneous data.
CaseDefinition rest_case(double nu = 0.01);

/// "taylor-green", "single-vortex", "lid-cavity" or "rest".
CaseDefinition make_case(const std::string& id, double re);
const std::vector<std::string>& case_ids();

struct MonitorSample {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double divergence = 0.0;         // of W^n (= U^n after the first step)
  double divergence_w_star = 0.0;  // of the unprojected end-of-step velocity
  double kinetic_energy = 0.0;
  SolveStats iterations;
};

struct SimulationOptions {
  StepperConfig stepper;
  double t0 = 0.0;
  double t_end = 1.0;
  int rebuild_interval = 50;
  /// If positive, overrides Courant control.
  double fixed_dt = 0.0;
  /// Called with the initial sample and after every step.
  std::function<void(const GepupState&, const MonitorSample&)> on_step;
};

struct SimulationResult {
  GepupState state;
  std::vector<MonitorSample> monitors;
  int steps = 0;
  bool completed = true;
  std::string failure;
};

/// Runs [t0, t_end]. Without an explicit initial state the case's u0 is
/// projected. A failing step stops the run and keeps the last valid state.
SimulationResult run_simulation(Discretization& disc, const CaseDefinition& c,
                                const SimulationOptions& options,
                                std::optional<GepupState> initial = std::nullopt);

struct FlowErrors {
  ErrorNorms u;
  ErrorNorms q;
};

/// Errors against the case's exact solution at state.t. Both pressures are
/// shifted to zero mean before differencing.
FlowErrors flow_errors(const Discretization& disc, const CaseDefinition& c, const GepupState& s);

struct ConvergenceRow {
  double h = 0.0;
  FlowErrors errors;
  int steps = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;

  /// log2(e_{i-1} / e_i) for row i >= 1.
  double rate(std::size_t row, Norm norm, bool pressure) const;
};

double convergence_rate(double coarse_error, double fine_error);

struct ConvergenceOptions {
  int degree = 3;
  TableauId tableau = TableauId::ARK4;
  std::vector<int> levels;
  std::array<int, 2> base_cells{1, 1};
  double courant = 0.8;
  double t0 = 0.0;
  double t_end = 1.0;
  int rebuild_interval = 50;
  std::function<void(const ConvergenceRow&)> on_row;
};

ConvergenceTable run_convergence(const CaseDefinition& c, const ConvergenceOptions& options);

/// eta_K = h_K * max |curl u_h| over the quadrature and support points of K.
std::vector<double> vorticity_indicator(const FeSpace& space, const VelocityField& U);

struct MarkingResult {
  std::vector<int> refine;
  std::vector<int> coarsen;
};

/// Doerfler marking: the refine set is the shortest descending prefix holding
/// theta_r of the total; the coarsen set is the longest ascending prefix of
/// the remaining elements holding at most theta_c. Ties go to the lower index.
MarkingResult dorfler_mark(std::span<const double> indicators, double theta_r, double theta_c);

}  // namespace gepup
