#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gepup/cli_io.hpp"
#include "vtk_reader.hpp"

using namespace gepup;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gepup_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(split(line, ','));
  return rows;
}

ConvergenceRow row(double h, double u_l2, double q_h1) {
  ConvergenceRow r;
  r.h = h;
  r.errors.u.l2 = u_l2;
  r.errors.u.h1 = 10 * u_l2;
  r.errors.u.linf = 2 * u_l2;
  r.errors.q.l2 = 3 * u_l2;
  r.errors.q.h1 = q_h1;
  r.errors.q.linf = 4 * u_l2;
  return r;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GEPUP_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("parse_config example") {
  const auto c = parse_config(
      {"--case", "taylor-green", "--re", "100", "--degree", "3", "--level", "3", "--integrator", "ark4",
       "--t-end", "1.0"});
  CHECK(c.case_id == "taylor-green");
  CHECK(c.re == 100.0);
  CHECK(c.degree == 3);
  CHECK(c.level == 3);
  CHECK(c.tableau == TableauId::ARK4);
  CHECK(c.t_end == 1.0);
  CHECK(c.courant == 0.8);
  CHECK(c.rel_tol == 1e-12);
  CHECK(c.base_cells == std::array<int, 2>{1, 1});
  CHECK(c.rebuild_interval == 50);

  const auto d = parse_config({"--case=single-vortex", "--degree=4", "--level=2", "--t-end=3",
                               "--integrator=ARK5", "--base", "2,3"});
  CHECK(d.tableau == TableauId::ARK5);
  CHECK(d.base_cells == std::array<int, 2>{2, 3});
}

TEST_CASE("parse_config errors name the offending key") {
  try {
    parse_config({});
    FAIL("expected an error");
  } catch (const ConfigParseError& e) {
    const std::string m = e.what();
    for (const char* key : {"--case", "--degree", "--level", "--t-end"}) CHECK(m.find(key) != std::string::npos);
  }
  auto message = [](const std::vector<std::string>& args) {
    try {
      parse_config(args);
    } catch (const ConfigParseError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::vector<std::string> base{"--case", "rest", "--degree", "3", "--level", "2", "--t-end", "1"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  CHECK(message({"--case", "rest", "--degree", "7", "--level", "2", "--t-end", "1"}).find("--degree") !=
        std::string::npos);
  CHECK(message(with({"--colour", "red"})).find("--colour") != std::string::npos);
  CHECK(message(with({"--integrator", "rk4"})).find("--integrator") != std::string::npos);
  CHECK(message(with({"--t0", "2"})).find("--t-end") != std::string::npos);
  CHECK(message(with({"--cr", "-1"})).find("--cr") != std::string::npos);
  CHECK(message({"--case", "cylinder", "--degree", "3", "--level", "2", "--t-end", "1"}).find("--case") !=
        std::string::npos);
  CHECK(message(with({"--re", "abc"})).find("--re") != std::string::npos);
}

TEST_CASE("parse_config(serialize(c)) round-trips") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> small(1, 9);
  for (int trial = 0; trial < 100; ++trial) {
    RunConfig c;
    c.case_id = case_ids()[trial % case_ids().size()];
    c.re = 1.0 + 1e4 * u(rng);
    c.degree = 1 + trial % 4;
    c.base_cells = {small(rng), small(rng)};
    c.level = small(rng) - 1;
    c.tableau = trial % 2 ? TableauId::ARK5 : TableauId::ARK4;
    c.courant = 0.1 + u(rng);
    c.t0 = u(rng) - 0.5;
    c.t_end = c.t0 + 10 * u(rng);
    c.dt_max = 1e-3 + u(rng);
    c.output_dir = "out dir/" + std::to_string(trial);
    c.snapshot_interval = small(rng) - 1;
    c.rebuild_interval = small(rng);
    c.rel_tol = std::pow(10.0, -6 - 8 * u(rng));
    c.abs_tol = std::pow(10.0, -10 - 8 * u(rng));
    CHECK(parse_config(serialize(c)) == c);
  }
}

TEST_CASE("parse_converge_config") {
  const auto c = parse_converge_config({"--case", "taylor-green", "--degree", "3", "--levels", "3,4,5"});
  CHECK(c.levels == std::vector<int>{3, 4, 5});
  CHECK(c.output == "convergence.csv");
  CHECK_THROWS_AS(parse_converge_config({"--case", "taylor-green", "--degree", "3", "--levels", "3,5"}),
                  ConfigParseError);
  CHECK_THROWS_AS(parse_converge_config({"--case", "taylor-green", "--degree", "3", "--levels", "3"}),
                  ConfigParseError);
  CHECK_THROWS_AS(parse_converge_config({"--degree", "3"}), ConfigParseError);
}

TEST_CASE("write_vtk: single Q1 cell with zero fields") {
  const auto dir = scratch_dir("vtk1");
  const FeSpace s(build_mesh(RectDomain::unit_square(), {1, 1}, 0), 1);
  write_vtk(s, {}, dir / "a.vtk");
  const auto v = vtk::read(dir / "a.vtk");
  CHECK(v.points.size() == 4);
  CHECK(v.cells.size() == 1);
  CHECK(v.cell_types == std::vector<int>{9});
  for (const char* name : {"pressure", "vorticity", "divergence"}) {
    REQUIRE(v.scalars.count(name) == 1);
    for (double x : v.scalars.at(name)) CHECK(x == 0.0);
  }
  REQUIRE(v.vectors.count("velocity") == 1);
  for (const auto& x : v.vectors.at("velocity")) CHECK((x[0] == 0.0 && x[1] == 0.0 && x[2] == 0.0));
}

TEST_CASE("write_vtk: 2x2 Q2 mesh has 25 points and 16 sub-quads") {
  const auto dir = scratch_dir("vtk2");
  const FeSpace s(build_mesh(RectDomain::unit_square(), {2, 2}, 0), 2);
  const auto u = interpolate(s, [](Vec2 x, double) { return Vec2{-x.y, x.x}; }, 0.0);
  write_vtk(s, {&u, nullptr}, dir / "b.vtk", 0.5);
  const auto v = vtk::read(dir / "b.vtk");
  CHECK(v.points.size() == 25);
  CHECK(v.cells.size() == 16);
  for (const auto& c : v.cells) {
    REQUIRE(c.size() == 4);
    for (int id : c) CHECK((id >= 0 && id < 25));
    // counter-clockwise sub-quad with positive area
    double area = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto& a = v.points[c[i]];
      const auto& b = v.points[c[(i + 1) % 4]];
      area += a[0] * b[1] - b[0] * a[1];
    }
    CHECK(area > 0.0);
  }
  // rigid rotation: vorticity 2, divergence 0, velocity matches the points
  for (double w : v.scalars.at("vorticity")) CHECK(w == doctest::Approx(2.0));
  for (double d : v.scalars.at("divergence")) CHECK(std::abs(d) < 1e-12);
  for (std::size_t i = 0; i < v.points.size(); ++i) {
    CHECK(v.vectors.at("velocity")[i][0] == doctest::Approx(-v.points[i][1]));
    CHECK(v.vectors.at("velocity")[i][1] == doctest::Approx(v.points[i][0]));
  }
}

TEST_CASE("write_vtk: Taylor-Green pressure range") {
  const auto dir = scratch_dir("vtk3");
  const auto tg = taylor_green_case(100.0);
  const FeSpace s(build_mesh(RectDomain::unit_square(), {1, 1}, 2), 2);
  const auto u = interpolate(s, tg.exact_u, 0.0);
  const auto p = interpolate(s, tg.exact_p, 0.0);
  write_vtk(s, {&u, &p}, dir / "tg.vtk");
  const auto v = vtk::read(dir / "tg.vtk");
  const auto& q = v.scalars.at("pressure");
  CHECK(*std::min_element(q.begin(), q.end()) == doctest::Approx(-0.5));
  CHECK(*std::max_element(q.begin(), q.end()) == doctest::Approx(0.5));
}

TEST_CASE("write_vtk: unwritable path") {
  const FeSpace s(build_mesh(RectDomain::unit_square(), {1, 1}, 0), 1);
  CHECK_THROWS_AS(write_vtk(s, {}, "/nonexistent_dir_for_gepup/a.vtk"), IoError);
}

TEST_CASE("write_convergence_csv") {
  const auto dir = scratch_dir("csv");
  ConvergenceTable one;
  one.rows.push_back(row(0.125, 9.28e-6, 1.6e-3));
  write_convergence_csv(one, dir / "one.csv");
  auto rows = read_csv(dir / "one.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"h", "u_L2", "u_L2_rate", "u_H1", "u_H1_rate", "u_Linf",
                                            "u_Linf_rate", "q_L2", "q_L2_rate", "q_H1", "q_H1_rate",
                                            "q_Linf", "q_Linf_rate"});
  REQUIRE(rows[1].size() == 13);
  CHECK(rows[1][0] == "0.125");
  CHECK(rows[1][1] == "9.28e-06");
  for (int c = 2; c < 13; c += 2) CHECK(rows[1][c].empty());

  ConvergenceTable two;
  two.rows.push_back(row(0.125, 8e-6, 1e-3));
  two.rows.push_back(row(0.0625, 5e-7, 1.25e-4));
  write_convergence_csv(two, dir / "two.csv");
  rows = read_csv(dir / "two.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[2][2] == "4.00");
  CHECK(rows[2][10] == "3.00");
  // every rate column is recomputable from the error columns
  for (int c = 1; c < 13; c += 2) {
    const double rate = std::log2(std::stod(rows[1][c]) / std::stod(rows[2][c]));
    CHECK(std::stod(rows[2][c + 1]) == doctest::Approx(rate).epsilon(0.01));
  }

  CHECK_THROWS_AS(write_convergence_csv(ConvergenceTable{}, dir / "empty.csv"), std::invalid_argument);
  CHECK_THROWS_AS(write_convergence_csv(two, "/nonexistent_dir_for_gepup/x.csv"), IoError);
}

TEST_CASE("MonitorCsvWriter") {
  const auto dir = scratch_dir("monitors");
  {
    MonitorCsvWriter w(dir / "m.csv");
    MonitorSample m;
    m.step = 3;
    m.t = 0.1;
    m.dt = 1.0 / 3.0;
    m.iterations.helmholtz = 7;
    w.write(m);
  }
  const auto rows = read_csv(dir / "m.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].size() == 10);
  CHECK(rows[1][0] == "3");
  CHECK(std::stod(rows[1][2]) == 1.0 / 3.0);
  CHECK(rows[1][6] == "7");
  CHECK_THROWS_AS(MonitorCsvWriter("/nonexistent_dir_for_gepup/m.csv"), IoError);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch_dir("cli");
  CHECK(run_cli("") == 1);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("validate-tableaus") == 0);
  CHECK(run_cli("run") == 1);
  CHECK(run_cli("run --case taylor-green --degree 7 --level 1 --t-end 0.1") == 1);
  const std::string out = (dir / "run").string();
  CHECK(run_cli("run --case taylor-green --degree 2 --level 1 --t-end 0.05 --snapshot-interval 1 --output \"" +
                out + "\"") == 0);
  CHECK(fs::exists(dir / "run" / "final.vtk"));
  CHECK(fs::exists(dir / "run" / "snapshot_00000.vtk"));
  const auto monitors = read_csv(dir / "run" / "monitors.csv");
  CHECK(monitors.size() >= 3);
  const auto v = vtk::read(dir / "run" / "final.vtk");
  CHECK(v.points.size() == 25);

  const std::string csv = (dir / "conv.csv").string();
  CHECK(run_cli("converge --case taylor-green --degree 2 --levels 1,2 --t-end 0 --output \"" + csv + "\"") == 0);
  CHECK(read_csv(csv).size() == 3);
  CHECK(run_cli("converge --case lid-cavity --degree 2 --levels 1,2") == 1);
  // output directory that cannot be created is a runtime failure
  CHECK(run_cli("run --case rest --degree 1 --level 1 --t-end 0.1 --output /proc/gepup_forbidden") == 2);
}
