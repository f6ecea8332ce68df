#include "gepup/cli_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gepup {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string exact(double v) { return fmt("%.17g", v); }

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

void require_flags(const std::vector<std::string>& args, const std::vector<std::string>& required) {
  std::string missing;
  for (const auto& r : required)
    if (!has_flag(args, r)) missing += (missing.empty() ? "" : ", ") + r;
  if (!missing.empty()) throw ConfigParseError("missing required keys: " + missing);
}

void run_parser(CLI::App& app, const std::vector<std::string>& args) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw ConfigParseError(e.what());
  }
}

TableauId tableau_from_flag(const std::string& s) {
  try {
    return parse_tableau_id(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigParseError(std::string("--integrator: ") + e.what());
  }
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigParseError(message);
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  require_flags(args, {"--case", "--degree", "--level", "--t-end"});
  RunConfig c;
  std::string integrator = to_string(c.tableau);
  std::vector<int> base{1, 1};
  CLI::App app{"gepup run"};
  app.add_option("--case", c.case_id)->check(CLI::IsMember(case_ids()));
  app.add_option("--re", c.re);
  app.add_option("--degree", c.degree)->check(CLI::Range(kMinDegree, kMaxDegree));
  app.add_option("--base", base)->expected(2)->delimiter(',');
  app.add_option("--level", c.level)->check(CLI::Range(0, 12));
  app.add_option("--integrator", integrator);
  app.add_option("--cr", c.courant);
  app.add_option("--t0", c.t0);
  app.add_option("--t-end", c.t_end);
  app.add_option("--dt-max", c.dt_max);
  app.add_option("--output", c.output_dir);
  app.add_option("--snapshot-interval", c.snapshot_interval);
  app.add_option("--rebuild-interval", c.rebuild_interval);
  app.add_option("--rel-tol", c.rel_tol);
  app.add_option("--abs-tol", c.abs_tol);
  run_parser(app, args);

  c.tableau = tableau_from_flag(integrator);
  check(base.size() == 2 && base[0] >= 1 && base[1] >= 1, "--base: expected two positive cell counts");
  c.base_cells = {base[0], base[1]};
  check(c.re > 0.0 && std::isfinite(c.re), "--re: must be positive");
  check(c.courant > 0.0 && std::isfinite(c.courant), "--cr: must be positive");
  check(std::isfinite(c.t0), "--t0: must be finite");
  check(std::isfinite(c.t_end) && c.t_end >= c.t0, "--t-end: must not precede --t0");
  check(c.dt_max > 0.0, "--dt-max: must be positive");
  check(c.snapshot_interval >= 0, "--snapshot-interval: must be >= 0");
  check(c.rebuild_interval >= 1, "--rebuild-interval: must be >= 1");
  check(c.rel_tol > 0.0 && c.rel_tol < 1.0, "--rel-tol: must lie in (0, 1)");
  check(c.abs_tol >= 0.0, "--abs-tol: must be >= 0");
  return c;
}

std::vector<std::string> serialize(const RunConfig& c) {
  return {"--case",
          c.case_id,
          "--re",
          exact(c.re),
          "--degree",
          std::to_string(c.degree),
          "--base",
          std::to_string(c.base_cells[0]) + "," + std::to_string(c.base_cells[1]),
          "--level",
          std::to_string(c.level),
          "--integrator",
          to_string(c.tableau),
          "--cr",
          exact(c.courant),
          "--t0",
          exact(c.t0),
          "--t-end",
          exact(c.t_end),
          "--dt-max",
          exact(c.dt_max),
          "--output",
          c.output_dir,
          "--snapshot-interval",
          std::to_string(c.snapshot_interval),
          "--rebuild-interval",
          std::to_string(c.rebuild_interval),
          "--rel-tol",
          exact(c.rel_tol),
          "--abs-tol",
          exact(c.abs_tol)};
}

ConvergeConfig parse_converge_config(const std::vector<std::string>& args) {
  require_flags(args, {"--case", "--degree", "--levels"});
  ConvergeConfig c;
  std::string integrator = to_string(c.tableau);
  CLI::App app{"gepup converge"};
  app.add_option("--case", c.case_id)->check(CLI::IsMember(case_ids()));
  app.add_option("--re", c.re);
  app.add_option("--degree", c.degree)->check(CLI::Range(kMinDegree, kMaxDegree));
  app.add_option("--levels", c.levels)->delimiter(',');
  app.add_option("--integrator", integrator);
  app.add_option("--cr", c.courant);
  app.add_option("--t-end", c.t_end);
  app.add_option("--rebuild-interval", c.rebuild_interval);
  app.add_option("--output", c.output);
  run_parser(app, args);

  c.tableau = tableau_from_flag(integrator);
  check(c.levels.size() >= 2, "--levels: need at least two levels");
  for (std::size_t i = 1; i < c.levels.size(); ++i)
    check(c.levels[i] == c.levels[i - 1] + 1, "--levels: must be consecutive and increasing");
  check(c.levels.front() >= 0, "--levels: must be >= 0");
  check(c.re > 0.0, "--re: must be positive");
  check(c.courant > 0.0, "--cr: must be positive");
  check(c.t_end >= 0.0, "--t-end: must be >= 0");
  check(c.rebuild_interval >= 1, "--rebuild-interval: must be >= 1");
  return c;
}

void nodal_curl_div(const FeSpace& space, const VelocityField& U, Vector& curl, Vector& div) {
  const auto& ref = space.reference();
  const int nl = ref.n_local();
  const double hx = space.mesh().hx(), hy = space.mesh().hy();
  std::vector<ShapeValues> at_nodes;
  for (int i = 0; i < nl; ++i) at_nodes.push_back(shape_eval(ref.degree(), ref.node(i)));
  curl.assign(space.n_dofs(), 0.0);
  div.assign(space.n_dofs(), 0.0);
  std::vector<int> count(space.n_dofs(), 0);
  std::vector<double> lx(nl), ly(nl);
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    gather(space, e, U[0], lx);
    gather(space, e, U[1], ly);
    const auto dofs = space.element_dofs(e);
    for (int m = 0; m < nl; ++m) {
      double uxx = 0.0, uxy = 0.0, uyx = 0.0, uyy = 0.0;
      for (int i = 0; i < nl; ++i) {
        const auto& g = at_nodes[m].gradients[i];
        uxx += g[0] * lx[i];
        uxy += g[1] * lx[i];
        uyx += g[0] * ly[i];
        uyy += g[1] * ly[i];
      }
      curl[dofs[m]] += uyx / hx - uxy / hy;
      div[dofs[m]] += uxx / hx + uyy / hy;
      ++count[dofs[m]];
    }
  }
  for (int d = 0; d < space.n_dofs(); ++d) {
    curl[d] /= count[d];
    div[d] /= count[d];
  }
}

void write_vtk(const FeSpace& space, const VtkFields& fields, const std::filesystem::path& path,
               double time) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const int n = space.n_dofs();
  const int ndx = space.n_dofs_x(), ndy = space.n_dofs_y();
  const int cells = (ndx - 1) * (ndy - 1);

  char line[128];
  out << "# vtk DataFile Version 3.0\n";
  out << "gepup snapshot t=" << exact(time) << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (int d = 0; d < n; ++d) {
    const Vec2 p = space.support_point(d);
    std::snprintf(line, sizeof line, "%.10g %.10g 0\n", p.x, p.y);
    out << line;
  }
  out << "CELLS " << cells << ' ' << 5 * cells << '\n';
  for (int j = 0; j + 1 < ndy; ++j)
    for (int i = 0; i + 1 < ndx; ++i) {
      const int a = j * ndx + i;
      out << "4 " << a << ' ' << a + 1 << ' ' << a + 1 + ndx << ' ' << a + ndx << '\n';
    }
  out << "CELL_TYPES " << cells << '\n';
  for (int c = 0; c < cells; ++c) out << "9\n";

  const Vector zero(n, 0.0);
  const VelocityField zero_u{zero, zero};
  const VelocityField& u = fields.velocity ? *fields.velocity : zero_u;
  const Vector& q = fields.pressure ? *fields.pressure : zero;
  Vector curl, div;
  nodal_curl_div(space, u, curl, div);

  out << "POINT_DATA " << n << '\n';
  out << "VECTORS velocity double\n";
  for (int d = 0; d < n; ++d) {
    std::snprintf(line, sizeof line, "%.10g %.10g 0\n", u[0][d], u[1][d]);
    out << line;
  }
  auto scalars = [&](const char* name, const Vector& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out << fmt("%.10g", x) << '\n';
  };
  scalars("pressure", q);
  scalars("vorticity", curl);
  scalars("divergence", div);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path) {
  if (table.rows.empty()) throw std::invalid_argument("empty convergence table");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "h,u_L2,u_L2_rate,u_H1,u_H1_rate,u_Linf,u_Linf_rate,"
         "q_L2,q_L2_rate,q_H1,q_H1_rate,q_Linf,q_Linf_rate\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << fmt("%.6g", table.rows[r].h);
    for (const bool pressure : {false, true}) {
      const auto& e = pressure ? table.rows[r].errors.q : table.rows[r].errors.u;
      for (const Norm nm : {Norm::L2, Norm::H1, Norm::Linf}) {
        out << ',' << fmt("%.2e", e.get(nm)) << ',';
        if (r > 0) out << fmt("%.2f", table.rate(r, nm, pressure));
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

MonitorCsvWriter::MonitorCsvWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  out_ << "step,t,dt,divergence_l2,divergence_w_star_l2,kinetic_energy,"
          "helmholtz_iterations,phi_iterations,q_iterations,mass_iterations\n";
}

void MonitorCsvWriter::write(const MonitorSample& m) {
  out_ << m.step << ',' << exact(m.t) << ',' << exact(m.dt) << ',' << exact(m.divergence) << ','
       << exact(m.divergence_w_star) << ',' << exact(m.kinetic_energy) << ','
       << m.iterations.helmholtz << ',' << m.iterations.poisson_phi << ','
       << m.iterations.poisson_q << ',' << m.iterations.mass << '\n';
  out_.flush();
}

}  // namespace gepup
