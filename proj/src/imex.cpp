#include "gepup/imex.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace gepup {

namespace {

// Coefficients as exact rationals. Both methods are the Kennedy-Carpenter
// ARK4(3)6L[2]SA and ARK5(4)8L[2]SA_2 pairs.
// 6 stages: A_E row-major, A_I row-major, b, c.
constexpr std::array<const char*, 84> kARK4Data = {
    "0", "0", "0", "0", "0", "0",
    "1/2", "0", "0", "0", "0", "0",
    "13861/62500", "6889/62500", "0", "0", "0", "0",
    "-116923316275/2393684061468", "-2731218467317/15368042101831", "9408046702089/11113171139209", "0", "0", "0",
    "-451086348788/2902428689909", "-2682348792572/7519795681897", "12662868775082/11960479115383", "3355817975965/11060851509271", "0", "0",
    "647845179188/3216320057751", "73281519250/8382639484533", "552539513391/3454668386233", "3354512671639/8306763924573", "4040/17871", "0",
    "0", "0", "0", "0", "0", "0",
    "1/4", "1/4", "0", "0", "0", "0",
    "8611/62500", "-1743/31250", "1/4", "0", "0", "0",
    "5012029/34652500", "-654441/2922500", "174375/388108", "1/4", "0", "0",
    "15267082809/155376265600", "-71443401/120774400", "730878875/902184768", "2285395/8070912", "1/4", "0",
    "82889/524892", "0", "15625/83664", "69875/102672", "-2260/8211", "1/4",
    "82889/524892", "0", "15625/83664", "69875/102672", "-2260/8211", "1/4",
    "0", "1/2", "83/250", "31/50", "17/20", "1",
};
constexpr std::uint64_t kARK4Checksum = 0xdfddb85ad91ec625ULL;

// 8 stages: A_E row-major, A_I row-major, b, c.
constexpr std::array<const char*, 144> kARK5Data = {
    "0", "0", "0", "0", "0", "0", "0", "0",
    "4/9", "0", "0", "0", "0", "0", "0", "0",
    "1/9", "1183333538310/1827251437969", "0", "0", "0", "0", "0", "0",
    "895379019517/9750411845327", "477606656805/13473228687314", "-112564739183/9373365219272", "0", "0", "0", "0", "0",
    "-4458043123994/13015289567637", "-2500665203865/9342069639922", "983347055801/8893519644487", "2185051477207/2551468980502", "0", "0", "0", "0",
    "-167316361917/17121522574472", "1605541814917/7619724128744", "991021770328/13052792161721", "2342280609577/11279663441611", "3012424348531/12792462456678", "0", "0", "0",
    "6680998715867/14310383562358", "5029118570809/3897454228471", "2415062538259/6382199904604", "-3924368632305/6964820224454", "-4331110370267/15021686902756", "-3944303808049/11994238218192", "0", "0",
    "2193717860234/3570523412979", "2193717860234/3570523412979", "5952760925747/18750164281544", "-4412967128996/6196664114337", "4151782504231/36106512998704", "572599549169/6265429158920", "-457874356192/11306498036315", "0",
    "0", "0", "0", "0", "0", "0", "0", "0",
    "2/9", "2/9", "0", "0", "0", "0", "0", "0",
    "2366667076620/8822750406821", "2366667076620/8822750406821", "2/9", "0", "0", "0", "0", "0",
    "-257962897183/4451812247028", "-257962897183/4451812247028", "128530224461/14379561246022", "2/9", "0", "0", "0", "0",
    "-486229321650/11227943450093", "-486229321650/11227943450093", "-225633144460/6633558740617", "1741320951451/6824444397158", "2/9", "0", "0", "0",
    "621307788657/4714163060173", "621307788657/4714163060173", "-125196015625/3866852212004", "940440206406/7593089888465", "961109811699/6734810228204", "2/9", "0", "0",
    "2036305566805/6583108094622", "2036305566805/6583108094622", "-3039402635899/4450598839912", "-1829510709469/31102090912115", "-286320471013/6931253422520", "8651533662697/9642993110008", "2/9", "0",
    "0", "0", "3517720773327/20256071687669", "4569610470461/17934693873752", "2819471173109/11655438449929", "3296210113763/10722700128969", "-1142099968913/5710983926999", "2/9",
    "0", "0", "3517720773327/20256071687669", "4569610470461/17934693873752", "2819471173109/11655438449929", "3296210113763/10722700128969", "-1142099968913/5710983926999", "2/9",
    "0", "4/9", "6456083330201/8509243623797", "1632083962415/14158861528103", "6365430648612/17842476412687", "18/25", "191/200", "1",
};
constexpr std::uint64_t kARK5Checksum = 0x421a7d4725f06ef2ULL;
std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double parse_rational(std::string_view s) {
  const auto slash = s.find('/');
  const long long num = std::stoll(std::string(s.substr(0, slash)));
  const long long den =
      slash == std::string_view::npos ? 1 : std::stoll(std::string(s.substr(slash + 1)));
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

template <std::size_t N>
ButcherTableau from_data(const std::array<const char*, N>& data, std::uint64_t checksum,
                         std::string name, int stages, int order) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* lit : data) h = fnv1a(";", fnv1a(lit, h));
  if (h != checksum) throw std::logic_error("tableau " + name + ": coefficient checksum mismatch");

  ButcherTableau t;
  t.name = std::move(name);
  t.stages = stages;
  t.order = order;
  const std::size_t nn = static_cast<std::size_t>(stages) * stages;
  for (std::size_t i = 0; i < N; ++i) {
    const double v = parse_rational(data[i]);
    if (i < nn)
      t.ae.push_back(v);
    else if (i < 2 * nn)
      t.ai.push_back(v);
    else if (i < 2 * nn + stages)
      t.b.push_back(v);
    else
      t.c.push_back(v);
  }
  return t;
}

}  // namespace

TableauId parse_tableau_id(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "ark4") return TableauId::ARK4;
  if (lower == "ark5") return TableauId::ARK5;
  throw std::invalid_argument("unknown integrator '" + name + "' (expected ark4 or ark5)");
}

std::string to_string(TableauId id) { return id == TableauId::ARK4 ? "ark4" : "ark5"; }

ButcherTableau load_tableau(TableauId id) {
  ButcherTableau t = id == TableauId::ARK4
                         ? from_data(kARK4Data, kARK4Checksum, "ARK4(3)6L[2]SA", 6, 4)
                         : from_data(kARK5Data, kARK5Checksum, "ARK5(4)8L[2]SA2", 8, 5);
  const auto report = validate_tableau(t);
  if (!report.ok()) throw std::logic_error("tableau " + t.name + " failed validation");
  return t;
}

bool TableauReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<std::string> TableauReport::violations() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

TableauReport validate_tableau(const ButcherTableau& t, double tol) {
  TableauReport rep;
  auto add = [&](std::string name, double residual) {
    rep.checks.push_back({std::move(name), residual, std::isfinite(residual) && residual <= tol});
  };
  const int n = t.stages;
  const std::size_t nn = static_cast<std::size_t>(std::max(n, 0)) * std::max(n, 0);
  const bool shaped = n >= 1 && t.ae.size() == nn && t.ai.size() == nn &&
                      t.b.size() == static_cast<std::size_t>(n) &&
                      t.c.size() == static_cast<std::size_t>(n);
  if (!shaped) {
    rep.checks.push_back({"array shapes", INFINITY, false});
    return rep;
  }
  rep.checks.push_back({"ESDIRK stage count >= 2", 0.0, n >= 2});
  rep.checks.push_back({"gamma > 0", 0.0, t.gamma() > 0.0});

  double upper_e = 0.0, upper_i = 0.0, first_row = 0.0, diag = 0.0, rows_e = 0.0, rows_i = 0.0;
  for (int i = 0; i < n; ++i) {
    double se = 0.0, si = 0.0;
    for (int j = 0; j < n; ++j) {
      se += t.AE(i, j);
      si += t.AI(i, j);
      if (j >= i) upper_e = std::max(upper_e, std::abs(t.AE(i, j)));
      if (j > i) upper_i = std::max(upper_i, std::abs(t.AI(i, j)));
    }
    first_row = std::max(first_row, std::abs(t.AI(0, i)));
    if (i >= 1) diag = std::max(diag, std::abs(t.AI(i, i) - t.gamma()));
    rows_e = std::max(rows_e, std::abs(se - t.c[i]));
    rows_i = std::max(rows_i, std::abs(si - t.c[i]));
  }
  add("A_E strictly lower triangular", upper_e);
  add("A_I lower triangular", upper_i);
  add("A_I first row zero", first_row);
  add("A_I constant diagonal gamma", diag);
  add("c_1 = 0", std::abs(t.c[0]));
  add("row sums of A_E equal c", rows_e);
  add("row sums of A_I equal c", rows_i);

  double sa = 0.0;
  for (int j = 0; j < n; ++j) sa = std::max(sa, std::abs(t.b[j] - t.AI(n - 1, j)));
  add("stiffly accurate: b = last row of A_I", sa);

  double sb = 0.0, sbc = 0.0, sbc2 = 0.0;
  for (int j = 0; j < n; ++j) {
    sb += t.b[j];
    sbc += t.b[j] * t.c[j];
    sbc2 += t.b[j] * t.c[j] * t.c[j];
  }
  add("sum b = 1", std::abs(sb - 1.0));
  if (t.order >= 2) add("sum b c = 1/2", std::abs(sbc - 0.5));
  if (t.order >= 3) {
    add("sum b c^2 = 1/3", std::abs(sbc2 - 1.0 / 3.0));
    for (const bool implicit : {false, true}) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += t.b[i] * (implicit ? t.AI(i, j) : t.AE(i, j)) * t.c[j];
      add(std::string("sum b A c = 1/6 (") + (implicit ? "A_I" : "A_E") + ")", std::abs(s - 1.0 / 6.0));
    }
  }
  return rep;
}

double esdirk_stability(const ButcherTableau& t, double z) {
  // y = (I - z A_I)^{-1} 1 by forward substitution
  const int n = t.stages;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double s = 1.0;
    for (int j = 0; j < i; ++j) s += z * t.AI(i, j) * y[j];
    y[i] = s / (1.0 - z * t.AI(i, i));
  }
  double r = 1.0;
  for (int j = 0; j < n; ++j) r += z * t.b[j] * y[j];
  return r;
}

StageOperators gepup_operators(const Discretization& disc, const CaseDefinition& c,
                               SolveStats* stats) {
  StageOperators ops;
  ops.momentum = [&disc, &c](const VelocityField& U, const Vector& Q, double t) {
    return eval_Fw(disc.space(), U, Q, c, t);
  };
  ops.project = [&disc, &c, stats](const VelocityField& W, double t, const Projection& guess) {
    SolveStats s;
    auto p = leray_project(disc, W, c, t, &s, &guess.Phi, &guess.U);
    if (stats) {
      stats->poisson_phi += s.poisson_phi;
      stats->mass += s.mass;
    }
    return p;
  };
  ops.pressure = [&disc, &c, stats](const VelocityField& U, double t, const Vector& guess) {
    SolveStats s;
    auto q = compute_pressure(disc, U, c, t, &s, &guess);
    if (stats) stats->poisson_q += s.poisson_q;
    return q;
  };
  return ops;
}

Stepper::Stepper(Discretization& disc, const CaseDefinition& c, StepperConfig config)
    : disc_(disc),
      case_(c),
      config_(config),
      tableau_(load_tableau(config.tableau)),
      ops_(gepup_operators(disc, c, &stats_)) {
  if (!(config.courant > 0.0)) throw std::invalid_argument("Courant number must be positive");
  mass_eliminated_ = eliminate_constrained(disc.mass(), disc.space().boundary_mask());
  mass_eliminated_jacobi_ = std::make_unique<JacobiPreconditioner>(mass_eliminated_);
}

VelocityField Stepper::boundary_values(double t) const {
  const FeSpace& space = disc_.space();
  VelocityField out{Vector(space.n_dofs(), 0.0), Vector(space.n_dofs(), 0.0)};
  if (!case_.g) return out;
  for (int d : space.boundary_dofs()) {
    const Vec2 v = case_.g(space.support_point(d), t);
    out[0][d] = v.x;
    out[1][d] = v.y;
  }
  return out;
}

StepInfo Stepper::advance(GepupState& state, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  const auto& tab = tableau_;
  const int ns = tab.stages;
  const double nu = case_.nu;
  const double t0 = state.t;
  const CsrMatrix& M = disc_.mass();
  const CsrMatrix& A = disc_.stiffness();
  stats_ = {};

  std::vector<VelocityField> fw(ns), aw(ns);
  VelocityField mwn, w_stage = state.W;
  for (int d = 0; d < 2; ++d) {
    mwn[d] = M * state.W[d];
    aw[0][d] = A * state.W[d];
  }
  fw[0] = ops_.momentum(state.U, state.Q, t0);

  Projection proj{state.U, state.Phi};
  Vector q = state.Q;
  for (int s = 1; s < ns; ++s) {
    const double ts = t0 + tab.c[s] * dt;
    const auto bv = boundary_values(ts);
    for (int d = 0; d < 2; ++d) {
      Vector rhs = mwn[d];
      for (int j = 0; j < s; ++j) {
        if (tab.AE(s, j) != 0.0) axpy(dt * tab.AE(s, j), fw[j][d], rhs);
        if (tab.AI(s, j) != 0.0) axpy(-nu * dt * tab.AI(s, j), aw[j][d], rhs);
      }
      const auto rep = disc_.solve_helmholtz(nu * dt * tab.gamma(), rhs, bv[d], w_stage[d]);
      stats_.helmholtz += rep.iterations;
      aw[s][d] = A * w_stage[d];
    }
    proj = ops_.project(w_stage, ts, proj);
    q = ops_.pressure(proj.U, ts, q);
    fw[s] = ops_.momentum(proj.U, q, ts);
  }

  // W* = W^(ns) + M^{-1} dt sum (b_j - aE_{ns,j}) Fw^(j), with W* = W^(ns)
  // on boundary DoFs, which already carry g(t^{n+1}). Solved for W* itself
  // from a warm start: the increment alone has a right-hand side of order dt
  // and would be resolved only to the absolute tolerance.
  const double t1 = t0 + dt;
  const auto& mask = disc_.space().boundary_mask();
  for (int d = 0; d < 2; ++d) {
    Vector rhs = M * w_stage[d];
    for (int j = 0; j < ns; ++j) {
      const double wgt = tab.b[j] - tab.AE(ns - 1, j);
      if (wgt != 0.0) axpy(dt * wgt, fw[j][d], rhs);
    }
    const Vector b = eliminated_rhs(M, rhs, mask, w_stage[d]);
    const auto rep = cg_solve(mass_eliminated_, b, w_stage[d], *mass_eliminated_jacobi_, disc_.tolerances());
    if (!rep.converged) throw NumericalBreakdown("mass correction solve did not converge");
    stats_.mass += rep.iterations;
  }

  StepInfo info;
  info.divergence_w_star = divergence_l2(disc_.space(), w_stage);
  proj = ops_.project(w_stage, t1, proj);
  q = ops_.pressure(proj.U, t1, q);

  for (int d = 0; d < 2; ++d)
    for (double v : proj.U[d])
      if (!std::isfinite(v)) throw NumericalBreakdown("non-finite velocity after step");
  state.t = t1;
  state.U = std::move(proj.U);
  state.Phi = std::move(proj.Phi);
  state.Q = std::move(q);
  state.W = state.U;
  info.iterations = stats_;
  return info;
}

GepupState advance_step(const GepupState& state, double dt, const StepperConfig& config,
                        const CaseDefinition& c, Discretization& disc) {
  Stepper stepper(disc, c, config);
  GepupState next = state;
  stepper.advance(next, dt);
  return next;
}

double courant_dt(const FeSpace& space, const VelocityField& U, double courant, double dt_max) {
  const auto& ref = space.reference();
  const int nl = ref.n_local();
  std::vector<double> lx(nl), ly(nl);
  const double h = space.mesh().h_max();
  double vmax = 0.0;
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    gather(space, e, U[0], lx);
    gather(space, e, U[1], ly);
    for (int i = 0; i < nl; ++i) vmax = std::max(vmax, std::hypot(lx[i], ly[i]));
    for (int q = 0; q < ref.n_quad(); ++q) {
      double u = 0.0, v = 0.0;
      for (int i = 0; i < nl; ++i) {
        u += ref.value(q, i) * lx[i];
        v += ref.value(q, i) * ly[i];
      }
      vmax = std::max(vmax, std::hypot(u, v));
    }
  }
  if (vmax < 1e-12) return dt_max;
  return courant * h / (space.degree() * vmax);
}

}  // namespace gepup
