// gepup: command-line driver.
//   gepup run <flags>          one simulation, monitors + VTK snapshots
//   gepup converge <flags>     convergence study against an exact solution
//   gepup validate-tableaus    coefficient checks for the IMEX pairs
// Exit codes: 0 success, 1 usage error, 2 runtime or solver failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gepup/cli_io.hpp"

using namespace gepup;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

const char* kUsage =
    "usage: gepup <command> [flags]\n"
    "\n"
    "commands:\n"
    "  run                 --case ID --degree K --level L --t-end T [--re R] [--base NX,NY]\n"
    "                      [--integrator ark4|ark5] [--cr C] [--t0 T0] [--dt-max D]\n"
    "                      [--output DIR] [--snapshot-interval N] [--rebuild-interval N]\n"
    "                      [--rel-tol X] [--abs-tol X]\n"
    "  converge            --case ID --degree K --levels L1,L2,... [--re R]\n"
    "                      [--integrator ark4|ark5] [--cr C] [--t-end T] [--output FILE.csv]\n"
    "  validate-tableaus\n"
    "\n"
    "cases: taylor-green, single-vortex, lid-cavity, rest\n";

int cmd_validate() {
  bool all = true;
  for (const TableauId id : {TableauId::ARK4, TableauId::ARK5}) {
    const auto t = load_tableau(id);
    const auto report = validate_tableau(t);
    std::printf("%s (%d stages, order %d)\n", t.name.c_str(), t.stages, t.order);
    for (const auto& c : report.checks)
      std::printf("  [%s] %-40s residual %.2e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.residual);
    all = all && report.ok();
  }
  std::printf("%s\n", all ? "all tableau checks passed" : "tableau checks FAILED");
  return all ? 0 : kRuntimeError;
}

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%05d.vtk", index);
  return buf;
}

int cmd_run(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);

  CaseDefinition c = make_case(cfg.case_id, cfg.re);
  Discretization disc(c.domain, cfg.base_cells, cfg.level, cfg.degree, {cfg.rel_tol, cfg.abs_tol, 2000});
  std::printf("case %s, Re %g, Q%d, %d x %d cells, %d DoFs per component, %s\n", c.name.c_str(), cfg.re,
              cfg.degree, disc.space().mesh().nx(), disc.space().mesh().ny(), disc.space().n_dofs(),
              to_string(cfg.tableau).c_str());

  SimulationOptions so;
  so.stepper.tableau = cfg.tableau;
  so.stepper.courant = cfg.courant;
  so.stepper.dt_max = cfg.dt_max;
  so.t0 = cfg.t0;
  so.t_end = cfg.t_end;
  so.rebuild_interval = cfg.rebuild_interval;

  MonitorCsvWriter monitors(dir / "monitors.csv");
  int snapshots = 0;
  so.on_step = [&](const GepupState& s, const MonitorSample& m) {
    monitors.write(m);
    if (cfg.snapshot_interval > 0 && m.step % cfg.snapshot_interval == 0)
      write_vtk(disc.space(), {&s.U, &s.Q}, dir / snapshot_name(snapshots++), s.t);
  };
  auto res = run_simulation(disc, c, so);
  write_vtk(disc.space(), {&res.state.U, &res.state.Q}, dir / "final.vtk", res.state.t);

  const auto& last = res.monitors.back();
  std::printf("steps %d, t = %.6g, kinetic energy %.6e, divergence %.3e\n", res.steps, res.state.t,
              last.kinetic_energy, last.divergence);
  if (c.has_exact()) {
    const auto e = flow_errors(disc, c, res.state);
    std::printf("velocity errors: L2 %.3e  H1 %.3e  Linf %.3e\n", e.u.l2, e.u.h1, e.u.linf);
    std::printf("pressure errors: L2 %.3e  H1 %.3e  Linf %.3e\n", e.q.l2, e.q.h1, e.q.linf);
  }
  if (!res.completed) {
    std::fprintf(stderr, "run failed: %s\n", res.failure.c_str());
    return kRuntimeError;
  }
  return 0;
}

int cmd_converge(const ConvergeConfig& cfg) {
  CaseDefinition c = make_case(cfg.case_id, cfg.re);
  if (!c.has_exact()) {
    std::fprintf(stderr, "case %s has no exact solution\n", cfg.case_id.c_str());
    return kUsageError;
  }
  ConvergenceOptions o;
  o.degree = cfg.degree;
  o.tableau = cfg.tableau;
  o.levels = cfg.levels;
  o.courant = cfg.courant;
  o.t_end = cfg.t_end;
  o.rebuild_interval = cfg.rebuild_interval;
  o.on_row = [](const ConvergenceRow& r) {
    // the CSV carries full H1 norms; seminorms are echoed here
    std::printf("h = %-10g steps %-5d u L2 %.3e  u H1 %.3e (semi %.3e)  q L2 %.3e  q H1 %.3e (semi %.3e)\n",
                r.h, r.steps, r.errors.u.l2, r.errors.u.h1, r.errors.u.h1_semi, r.errors.q.l2, r.errors.q.h1,
                r.errors.q.h1_semi);
    std::fflush(stdout);
  };
  const auto table = run_convergence(c, o);
  write_convergence_csv(table, cfg.output);
  std::printf("wrote %s\n", cfg.output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fputs(kUsage, stderr);
    return kUsageError;
  }
  const std::string cmd = argv[1];
  const std::vector<std::string> args(argv + 2, argv + argc);
  if (cmd == "-h" || cmd == "--help" || cmd == "help") {
    std::fputs(kUsage, stdout);
    return 0;
  }
  try {
    if (cmd == "validate-tableaus") {
      if (!args.empty()) throw ConfigParseError("validate-tableaus takes no flags");
      return cmd_validate();
    }
    if (cmd == "run") return cmd_run(parse_config(args));
    if (cmd == "converge") return cmd_converge(parse_converge_config(args));
    std::fprintf(stderr, "unknown command '%s'\n\n%s", cmd.c_str(), kUsage);
    return kUsageError;
  } catch (const ConfigParseError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), kUsage);
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
}
