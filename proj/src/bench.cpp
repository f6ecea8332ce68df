#include "gepup/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace gepup {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_re(double re) {
  if (!(re > 0.0) || !std::isfinite(re)) throw std::invalid_argument("Reynolds number must be positive");
}

// Unset data means homogeneous data.
CaseDefinition& with_zero_defaults(CaseDefinition& c) {
  const VectorFunction zero = [](Vec2, double) { return Vec2{}; };
  for (VectorFunction* f : {&c.f, &c.g, &c.dg_dt, &c.u0})
    if (!*f) *f = zero;
  return c;
}

}  // namespace

CaseDefinition taylor_green_case(double re) {
  require_positive_re(re);
  CaseDefinition c;
  c.name = "taylor-green";
  c.nu = 1.0 / re;
  const double du = -2.0 * kPi * kPi / re;
  const double dp = -4.0 * kPi * kPi / re;
  c.exact_u = [du](Vec2 x, double t) {
    const double e = std::exp(du * t);
    return Vec2{-e * std::cos(kPi * x.x) * std::sin(kPi * x.y),
                e * std::sin(kPi * x.x) * std::cos(kPi * x.y)};
  };
  c.exact_grad_u = [du](Vec2 x, double t) {
    const double e = kPi * std::exp(du * t);
    const double sx = std::sin(kPi * x.x), cx = std::cos(kPi * x.x);
    const double sy = std::sin(kPi * x.y), cy = std::cos(kPi * x.y);
    return std::array<Vec2, 2>{Vec2{e * sx * sy, -e * cx * cy}, Vec2{e * cx * cy, -e * sx * sy}};
  };
  c.exact_p = [dp](Vec2 x, double t) {
    return -0.25 * std::exp(dp * t) * (std::cos(2 * kPi * x.x) + std::cos(2 * kPi * x.y));
  };
  c.exact_grad_p = [dp](Vec2 x, double t) {
    const double e = 0.5 * kPi * std::exp(dp * t);
    return Vec2{e * std::sin(2 * kPi * x.x), e * std::sin(2 * kPi * x.y)};
  };
  c.g = c.exact_u;
  c.u0 = c.exact_u;
  const auto u = c.exact_u;
  c.dg_dt = [u, du](Vec2 x, double t) { return du * u(x, t); };
  return with_zero_defaults(c);
}

double single_vortex_speed(double r) {
  constexpr double R = 0.2;
  if (r < R) return 0.5 * r - 4.0 * r * r * r;
  return R / r * (0.5 * R - 4.0 * R * R * R);
}

CaseDefinition single_vortex_case(double re) {
  require_positive_re(re);
  CaseDefinition c;
  c.name = "single-vortex";
  c.nu = kSingleVortexPeakSpeed * 1.0 / re;
  c.u0 = [](Vec2 x, double) {
    const Vec2 d{x.x - 0.5, x.y - 0.5};
    const double r = norm(d);
    if (r == 0.0) return Vec2{};
    const double s = single_vortex_speed(r) / r;
    return Vec2{-s * d.y, s * d.x};
  };
  return with_zero_defaults(c);
}

CaseDefinition lid_cavity_case(double re) {
  require_positive_re(re);
  CaseDefinition c;
  c.name = "lid-cavity";
  c.nu = 1.0 / re;
  c.g = [](Vec2 x, double) {
    constexpr double eps = 1e-12;
    if (x.y >= 1.0 - eps && x.x > eps && x.x < 1.0 - eps) return Vec2{1.0, 0.0};
    return Vec2{};
  };
  return with_zero_defaults(c);
}

CaseDefinition rest_case(double nu) {
  CaseDefinition c;
  c.name = "rest";
  c.nu = nu;
  c.exact_u = [](Vec2, double) { return Vec2{}; };
  c.exact_grad_u = [](Vec2, double) { return std::array<Vec2, 2>{}; };
  c.exact_p = [](Vec2, double) { return 0.0; };
  c.exact_grad_p = [](Vec2, double) { return Vec2{}; };
  return with_zero_defaults(c);
}

const std::vector<std::string>& case_ids() {
  static const std::vector<std::string> ids{"taylor-green", "single-vortex", "lid-cavity", "rest"};
  return ids;
}

CaseDefinition make_case(const std::string& id, double re) {
  if (id == "taylor-green") return taylor_green_case(re);
  if (id == "single-vortex") return single_vortex_case(re);
  if (id == "lid-cavity") return lid_cavity_case(re);
  if (id == "rest") return rest_case(1.0 / re);
  throw std::invalid_argument("unknown case '" + id + "'");
}

SimulationResult run_simulation(Discretization& disc, const CaseDefinition& c,
                                const SimulationOptions& options, std::optional<GepupState> initial) {
  if (!(options.t_end >= options.t0)) throw std::invalid_argument("t_end must not precede t0");
  if (options.rebuild_interval < 1) throw std::invalid_argument("rebuild interval must be >= 1");

  SimulationResult res;
  res.state = initial ? std::move(*initial) : initial_state(disc, c, options.t0);
  res.state.t = options.t0;
  Stepper stepper(disc, c, options.stepper);
  const FeSpace& space = disc.space();

  auto record = [&](const MonitorSample& m) {
    res.monitors.push_back(m);
    if (options.on_step) options.on_step(res.state, m);
  };
  MonitorSample m0;
  m0.t = options.t0;
  m0.divergence = divergence_l2(space, res.state.W);
  m0.divergence_w_star = m0.divergence;
  m0.kinetic_energy = kinetic_energy(disc, res.state.W);
  record(m0);

  auto next_dt = [&] {
    if (options.fixed_dt > 0.0) return options.fixed_dt;
    return courant_dt(space, res.state.U, options.stepper.courant, options.stepper.dt_max);
  };
  double dt = next_dt();
  const double eps = 1e-12 * std::max(1.0, std::abs(options.t_end));
  while (res.state.t < options.t_end - eps) {
    if (res.steps > 0 && res.steps % options.rebuild_interval == 0) dt = next_dt();
    double h = dt;
    const double remaining = options.t_end - res.state.t;
    // a single shortened step lands on t_end; slivers are absorbed
    if (h >= remaining - 1e-10 * dt) h = remaining;
    StepInfo info;
    try {
      info = stepper.advance(res.state, h);
    } catch (const std::exception& e) {
      res.completed = false;
      res.failure = "step " + std::to_string(res.steps + 1) + " at t = " + std::to_string(res.state.t) +
                    ": " + e.what();
      return res;
    }
    if (h == remaining) res.state.t = options.t_end;
    ++res.steps;
    MonitorSample m;
    m.step = res.steps;
    m.t = res.state.t;
    m.dt = h;
    m.divergence = divergence_l2(space, res.state.W);
    m.divergence_w_star = info.divergence_w_star;
    m.kinetic_energy = kinetic_energy(disc, res.state.W);
    m.iterations = info.iterations;
    record(m);
  }
  return res;
}

FlowErrors flow_errors(const Discretization& disc, const CaseDefinition& c, const GepupState& s) {
  if (!c.has_exact()) throw std::invalid_argument("case '" + c.name + "' has no exact solution");
  const FeSpace& space = disc.space();
  FlowErrors out;
  out.u = compute_vector_errors(space, s.U, c.exact_u, c.exact_grad_u, s.t);

  // mean of the exact pressure by element quadrature
  const auto& ref = space.reference();
  const double jxw = space.mesh().hx() * space.mesh().hy();
  double mean = 0.0;
  for (int e = 0; e < space.mesh().n_elements(); ++e)
    for (int q = 0; q < ref.n_quad(); ++q)
      mean += ref.quad_weight(q) * jxw * c.exact_p(space.map_to_physical(e, ref.quad_point(q)), s.t);
  mean /= space.mesh().domain().area();
  Vector q = s.Q;
  const double q_mean = integrate(space, q) / space.mesh().domain().area();
  for (double& v : q) v -= q_mean;
  const auto p = c.exact_p;
  out.q = compute_errors(space, q, [&](Vec2 x, double t) { return p(x, t) - mean; },
                         c.exact_grad_p, s.t);
  return out;
}

double convergence_rate(double coarse_error, double fine_error) {
  return std::log2(coarse_error / fine_error);
}

double ConvergenceTable::rate(std::size_t row, Norm norm, bool pressure) const {
  if (row == 0 || row >= rows.size()) throw std::out_of_range("no rate for this row");
  const auto& a = pressure ? rows[row - 1].errors.q : rows[row - 1].errors.u;
  const auto& b = pressure ? rows[row].errors.q : rows[row].errors.u;
  return convergence_rate(a.get(norm), b.get(norm));
}

ConvergenceTable run_convergence(const CaseDefinition& c, const ConvergenceOptions& options) {
  if (options.levels.size() < 2) throw std::invalid_argument("a convergence study needs >= 2 levels");
  for (std::size_t i = 1; i < options.levels.size(); ++i)
    if (options.levels[i] != options.levels[i - 1] + 1)
      throw std::invalid_argument("convergence levels must be consecutive");
  ConvergenceTable table;
  for (int level : options.levels) {
    Discretization disc(c.domain, options.base_cells, level, options.degree);
    SimulationOptions so;
    so.stepper.tableau = options.tableau;
    so.stepper.courant = options.courant;
    so.t0 = options.t0;
    so.t_end = options.t_end;
    so.rebuild_interval = options.rebuild_interval;
    auto res = run_simulation(disc, c, so);
    if (!res.completed) throw NumericalBreakdown(res.failure);
    ConvergenceRow row;
    row.h = disc.space().mesh().h_max();
    row.errors = flow_errors(disc, c, res.state);
    row.steps = res.steps;
    if (options.on_row) options.on_row(row);
    table.rows.push_back(row);
  }
  return table;
}

std::vector<double> vorticity_indicator(const FeSpace& space, const VelocityField& U) {
  const auto& ref = space.reference();
  const int nl = ref.n_local();
  const double hx = space.mesh().hx(), hy = space.mesh().hy();
  std::vector<ShapeValues> at_nodes;
  for (int i = 0; i < nl; ++i) at_nodes.push_back(shape_eval(ref.degree(), ref.node(i)));

  std::vector<double> eta(space.mesh().n_elements());
  std::vector<double> lx(nl), ly(nl);
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    gather(space, e, U[0], lx);
    gather(space, e, U[1], ly);
    double w = 0.0;
    for (int q = 0; q < ref.n_quad(); ++q) {
      double a = 0.0, b = 0.0;
      for (int i = 0; i < nl; ++i) {
        a += ref.grad_x(q, i) * ly[i];
        b += ref.grad_y(q, i) * lx[i];
      }
      w = std::max(w, std::abs(a / hx - b / hy));
    }
    for (const auto& sv : at_nodes) {
      double a = 0.0, b = 0.0;
      for (int i = 0; i < nl; ++i) {
        a += sv.gradients[i][0] * ly[i];
        b += sv.gradients[i][1] * lx[i];
      }
      w = std::max(w, std::abs(a / hx - b / hy));
    }
    eta[e] = space.mesh().h_max() * w;
  }
  return eta;
}

MarkingResult dorfler_mark(std::span<const double> indicators, double theta_r, double theta_c) {
  if (!(theta_r > 0.0 && theta_r < 1.0) || !(theta_c > 0.0 && theta_c < 1.0))
    throw std::invalid_argument("marking thresholds must lie in (0, 1)");
  for (double v : indicators)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("indicators must be nonnegative");
  MarkingResult out;
  const double total = std::accumulate(indicators.begin(), indicators.end(), 0.0);
  if (total == 0.0) return out;

  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });
  double sum = 0.0;
  std::vector<char> refined(indicators.size(), 0);
  for (int e : order) {
    if (sum >= theta_r * total) break;
    sum += indicators[e];
    out.refine.push_back(e);
    refined[e] = 1;
  }

  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] < indicators[b]; });
  sum = 0.0;
  for (int e : order) {
    if (refined[e]) continue;
    if (sum + indicators[e] > theta_c * total) break;
    sum += indicators[e];
    out.coarsen.push_back(e);
  }
  std::sort(out.refine.begin(), out.refine.end());
  std::sort(out.coarsen.begin(), out.coarsen.end());
  return out;
}

}  // namespace gepup
