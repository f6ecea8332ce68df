#include "gepup/gepup.hpp"

#include <cmath>
#include <stdexcept>

namespace gepup {

namespace {

Vec2 eval_or_zero(const VectorFunction& f, Vec2 x, double t) { return f ? f(x, t) : Vec2{}; }

Vec2 face_reference_point(LocalFace face, double s) {
  switch (face) {
    case LocalFace::XMinus: return {0.0, s};
    case LocalFace::XPlus: return {1.0, s};
    case LocalFace::YMinus: return {s, 0.0};
    case LocalFace::YPlus: return {s, 1.0};
  }
  return {};
}

// Shape values and reference gradients at the 1D Gauss points of each face.
struct FaceTables {
  int nq = 0;
  std::vector<double> weights;
  std::array<std::vector<Vec2>, 4> points;
  std::array<std::vector<ShapeValues>, 4> shapes;

  explicit FaceTables(const ReferenceElement& ref) {
    const auto& quad = ref.quadrature_1d();
    nq = static_cast<int>(quad.points.size());
    weights = quad.weights;
    for (int f = 0; f < 4; ++f)
      for (int q = 0; q < nq; ++q) {
        const Vec2 p = face_reference_point(static_cast<LocalFace>(f), quad.points[q]);
        points[f].push_back(p);
        shapes[f].push_back(shape_eval(ref.degree(), p));
      }
  }
};

struct ElementSamples {
  std::vector<double> local;
  QuadratureSample ux, uy, s;
};

// Fills conv[q] = u.grad(u) at the quadrature points of the sampled element.
void convection(const ElementSamples& es, std::vector<Vec2>& conv) {
  const std::size_t nq = es.ux.value.size();
  conv.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const double u = es.ux.value[q], v = es.uy.value[q];
    conv[q] = {u * es.ux.dx[q] + v * es.ux.dy[q], u * es.uy.dx[q] + v * es.uy.dy[q]};
  }
}

void sample(const FeSpace& space, int e, std::span<const double> global, std::vector<double>& local,
            QuadratureSample& out) {
  gather(space, e, global, local);
  sample_at_quadrature(space, local, out);
}

}  // namespace

double boundary_flux(const FeSpace& space, const CaseDefinition& c, double t) {
  if (!c.g) return 0.0;
  const FaceTables ft(space.reference());
  double flux = 0.0;
  for (const auto& bf : boundary_faces(space.mesh())) {
    const int f = static_cast<int>(bf.face);
    for (int q = 0; q < ft.nq; ++q) {
      const Vec2 x = space.map_to_physical(bf.element, ft.points[f][q]);
      flux += ft.weights[q] * bf.length * dot(c.g(x, t), bf.normal);
    }
  }
  return flux;
}

void check_compatibility(const FeSpace& space, const CaseDefinition& c, double t, double tol) {
  const double flux = boundary_flux(space, c, t);
  if (std::abs(flux) > tol)
    throw std::invalid_argument("case '" + c.name + "': boundary flux of g is " +
                                std::to_string(flux) + ", expected 0");
}

Discretization::Discretization(const RectDomain& domain, std::array<int, 2> base_cells, int level,
                               int degree, CgSettings tolerances)
    : tol_(tolerances) {
  const auto meshes = build_hierarchy(domain, base_cells, level);
  spaces_.reserve(meshes.levels.size());
  for (const auto& m : meshes.levels) spaces_.emplace_back(m, degree);
  for (std::size_t l = 0; l < spaces_.size(); ++l) {
    mass_.push_back(assemble_mass(spaces_[l]));
    stiff_.push_back(assemble_stiffness(spaces_[l]));
    prolong_.push_back(l == 0 ? CsrMatrix{} : build_prolongation(spaces_[l - 1], spaces_[l]));
  }
  mass_weights_ = mass() * Vector(space().n_dofs(), 1.0);
  poisson_gmg_ = std::make_unique<GmgPreconditioner>(stiff_, prolong_, GmgSettings{}, true);
  mass_jacobi_ = std::make_unique<JacobiPreconditioner>(mass());
}

SolverReport Discretization::solve_poisson(std::span<const double> b, Vector& x) const {
  auto [sol, rep] = neumann_solve(stiffness(), b, mass_weights_, *poisson_gmg_, tol_, x);
  x = std::move(sol);
  return rep;
}

SolverReport Discretization::solve_mass(std::span<const double> b, Vector& x) const {
  x.resize(b.size(), 0.0);
  return cg_solve(mass(), b, x, *mass_jacobi_, tol_);
}

void Discretization::rebuild_helmholtz(double c) {
  std::vector<CsrMatrix> ops;
  std::vector<std::vector<char>> masks;
  for (std::size_t l = 0; l < spaces_.size(); ++l) {
    auto full = CsrMatrix::combine(1.0, mass_[l], c, stiff_[l]);
    ops.push_back(eliminate_constrained(full, spaces_[l].boundary_mask()));
    masks.push_back(spaces_[l].boundary_mask());
    if (l + 1 == spaces_.size()) helm_full_ = std::move(full);
  }
  helm_eliminated_ = ops.back();
  helm_gmg_ = std::make_unique<GmgPreconditioner>(std::move(ops), prolong_, GmgSettings{}, false,
                                                  std::move(masks));
  helm_c_ = c;
  ++helmholtz_rebuilds_;
}

SolverReport Discretization::solve_helmholtz(double c, std::span<const double> rhs,
                                             std::span<const double> boundary_values, Vector& x) {
  if (c != helm_c_) rebuild_helmholtz(c);
  const auto b = eliminated_rhs(helm_full_, rhs, space().boundary_mask(), boundary_values);
  x.resize(b.size(), 0.0);
  for (int d : space().boundary_dofs()) x[d] = boundary_values[d];
  const auto rep = cg_solve(helm_eliminated_, b, x, *helm_gmg_, tol_);
  if (!rep.converged)
    throw NumericalBreakdown("Helmholtz solve did not converge (relative residual " +
                             std::to_string(rep.relative_residual) + ")");
  return rep;
}

VelocityField eval_Fw(const FeSpace& space, const VelocityField& U, std::span<const double> Q,
                      const CaseDefinition& c, double t) {
  const auto& ref = space.reference();
  const int nl = ref.n_local(), nq = ref.n_quad();
  const double jxw = space.mesh().hx() * space.mesh().hy();
  VelocityField out{Vector(space.n_dofs(), 0.0), Vector(space.n_dofs(), 0.0)};
  ElementSamples es;
  es.local.resize(nl);
  std::vector<Vec2> conv(nq);
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    sample(space, e, Q, es.local, es.s);
    if (c.include_convection) {
      sample(space, e, U[0], es.local, es.ux);
      sample(space, e, U[1], es.local, es.uy);
      convection(es, conv);
    }
    const auto dofs = space.element_dofs(e);
    for (int q = 0; q < nq; ++q) {
      Vec2 r = eval_or_zero(c.f, space.map_to_physical(e, ref.quad_point(q)), t);
      if (c.include_convection) r = r - conv[q];
      r = r - Vec2{es.s.dx[q], es.s.dy[q]};
      r = (ref.quad_weight(q) * jxw) * r;
      for (int i = 0; i < nl; ++i) {
        const double phi = ref.value(q, i);
        out[0][dofs[i]] += r.x * phi;
        out[1][dofs[i]] += r.y * phi;
      }
    }
  }
  return out;
}

Vector eval_Fw(const FeSpace& space, const VelocityField& U, std::span<const double> Q,
               const CaseDefinition& c, double t, int d) {
  return std::move(eval_Fw(space, U, Q, c, t)[d]);
}

Vector eval_Fphi(const FeSpace& space, const VelocityField& W, const CaseDefinition& c, double t) {
  const auto& ref = space.reference();
  const int nl = ref.n_local(), nq = ref.n_quad();
  const double hx = space.mesh().hx(), hy = space.mesh().hy();
  Vector out(space.n_dofs(), 0.0);
  std::vector<double> lx(nl), ly(nl);
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    gather(space, e, W[0], lx);
    gather(space, e, W[1], ly);
    const auto dofs = space.element_dofs(e);
    for (int q = 0; q < nq; ++q) {
      double wx = 0.0, wy = 0.0;
      for (int i = 0; i < nl; ++i) {
        wx += ref.value(q, i) * lx[i];
        wy += ref.value(q, i) * ly[i];
      }
      // (w, grad eta) with the 1/h of the gradient folded into the weight
      const double ax = ref.quad_weight(q) * hy * wx, ay = ref.quad_weight(q) * hx * wy;
      for (int i = 0; i < nl; ++i) out[dofs[i]] += ax * ref.grad_x(q, i) + ay * ref.grad_y(q, i);
    }
  }
  if (c.g) {
    const FaceTables ft(ref);
    for (const auto& bf : boundary_faces(space.mesh())) {
      const int f = static_cast<int>(bf.face);
      const auto dofs = space.element_dofs(bf.element);
      for (int q = 0; q < ft.nq; ++q) {
        const Vec2 x = space.map_to_physical(bf.element, ft.points[f][q]);
        const double gn = ft.weights[q] * bf.length * dot(c.g(x, t), bf.normal);
        const auto& sv = ft.shapes[f][q].values;
        for (int i = 0; i < nl; ++i) out[dofs[i]] -= gn * sv[i];
      }
    }
  }
  return out;
}

VelocityField eval_Fu(const FeSpace& space, const VelocityField& W, std::span<const double> Phi) {
  const auto& ref = space.reference();
  const int nl = ref.n_local(), nq = ref.n_quad();
  const double jxw = space.mesh().hx() * space.mesh().hy();
  VelocityField out{Vector(space.n_dofs(), 0.0), Vector(space.n_dofs(), 0.0)};
  std::vector<double> lx(nl), ly(nl), lp(nl);
  QuadratureSample ps;
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    gather(space, e, W[0], lx);
    gather(space, e, W[1], ly);
    sample(space, e, Phi, lp, ps);
    const auto dofs = space.element_dofs(e);
    for (int q = 0; q < nq; ++q) {
      double wx = 0.0, wy = 0.0;
      for (int i = 0; i < nl; ++i) {
        wx += ref.value(q, i) * lx[i];
        wy += ref.value(q, i) * ly[i];
      }
      const double jw = ref.quad_weight(q) * jxw;
      const double rx = jw * (wx - ps.dx[q]), ry = jw * (wy - ps.dy[q]);
      for (int i = 0; i < nl; ++i) {
        out[0][dofs[i]] += rx * ref.value(q, i);
        out[1][dofs[i]] += ry * ref.value(q, i);
      }
    }
  }
  return out;
}

Vector eval_Fq(const FeSpace& space, const VelocityField& U, const CaseDefinition& c, double t) {
  const auto& ref = space.reference();
  const int nl = ref.n_local(), nq = ref.n_quad();
  const double hx = space.mesh().hx(), hy = space.mesh().hy();
  Vector out(space.n_dofs(), 0.0);
  ElementSamples es;
  es.local.resize(nl);
  std::vector<Vec2> conv(nq);
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    if (c.include_convection) {
      sample(space, e, U[0], es.local, es.ux);
      sample(space, e, U[1], es.local, es.uy);
      convection(es, conv);
    }
    if (!c.f && !c.include_convection) break;
    const auto dofs = space.element_dofs(e);
    for (int q = 0; q < nq; ++q) {
      Vec2 r = eval_or_zero(c.f, space.map_to_physical(e, ref.quad_point(q)), t);
      if (c.include_convection) r = r - conv[q];
      const double ax = ref.quad_weight(q) * hy * r.x, ay = ref.quad_weight(q) * hx * r.y;
      for (int i = 0; i < nl; ++i) out[dofs[i]] += ax * ref.grad_x(q, i) + ay * ref.grad_y(q, i);
    }
  }

  // Boundary terms: nu * curl(u) * (t . grad eta) - (n . dg/dt) eta, with
  // t = (-n_y, n_x) the counterclockwise tangent.
  const FaceTables ft(ref);
  std::vector<double> lx(nl), ly(nl);
  for (const auto& bf : boundary_faces(space.mesh())) {
    const int f = static_cast<int>(bf.face);
    const auto dofs = space.element_dofs(bf.element);
    gather(space, bf.element, U[0], lx);
    gather(space, bf.element, U[1], ly);
    const Vec2 tan{-bf.normal.y, bf.normal.x};
    for (int q = 0; q < ft.nq; ++q) {
      const auto& sv = ft.shapes[f][q];
      double duy_dx = 0.0, dux_dy = 0.0;
      for (int i = 0; i < nl; ++i) {
        duy_dx += sv.gradients[i][0] * ly[i];
        dux_dy += sv.gradients[i][1] * lx[i];
      }
      const double curl = duy_dx / hx - dux_dy / hy;
      const double jw = ft.weights[q] * bf.length;
      const double a = jw * c.nu * curl;
      double b = 0.0;
      if (c.dg_dt) b = jw * dot(c.dg_dt(space.map_to_physical(bf.element, ft.points[f][q]), t), bf.normal);
      for (int i = 0; i < nl; ++i) {
        const double tgrad = tan.x * sv.gradients[i][0] / hx + tan.y * sv.gradients[i][1] / hy;
        out[dofs[i]] += a * tgrad - b * sv.values[i];
      }
    }
  }
  return out;
}

Projection leray_project(const Discretization& disc, const VelocityField& W,
                         const CaseDefinition& c, double t, SolveStats* stats,
                         const Vector* phi_guess, const VelocityField* u_guess) {
  const FeSpace& space = disc.space();
  Projection p;
  p.Phi = phi_guess ? *phi_guess : Vector(space.n_dofs(), 0.0);
  const auto rphi = disc.solve_poisson(eval_Fphi(space, W, c, t), p.Phi);
  if (!rphi.converged) throw NumericalBreakdown("projection potential solve did not converge");
  const auto loads = eval_Fu(space, W, p.Phi);
  int mass_its = 0;
  for (int d = 0; d < 2; ++d) {
    p.U[d] = u_guess ? (*u_guess)[d] : W[d];
    const auto r = disc.solve_mass(loads[d], p.U[d]);
    if (!r.converged) throw NumericalBreakdown("mass solve did not converge");
    mass_its += r.iterations;
  }
  if (stats) {
    stats->poisson_phi = rphi.iterations;
    stats->mass = mass_its;
  }
  return p;
}

Vector compute_pressure(const Discretization& disc, const VelocityField& U, const CaseDefinition& c,
                        double t, SolveStats* stats, const Vector* guess) {
  Vector q = guess ? *guess : Vector(disc.space().n_dofs(), 0.0);
  const auto r = disc.solve_poisson(eval_Fq(disc.space(), U, c, t), q);
  if (!r.converged) throw NumericalBreakdown("pressure solve did not converge");
  if (stats) stats->poisson_q = r.iterations;
  return q;
}

double divergence_l2(const FeSpace& space, const VelocityField& W) {
  const auto& ref = space.reference();
  const double jxw = space.mesh().hx() * space.mesh().hy();
  std::vector<double> local(ref.n_local());
  QuadratureSample sx, sy;
  double sum = 0.0;
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    sample(space, e, W[0], local, sx);
    sample(space, e, W[1], local, sy);
    for (int q = 0; q < ref.n_quad(); ++q) {
      const double div = sx.dx[q] + sy.dy[q];
      sum += ref.quad_weight(q) * jxw * div * div;
    }
  }
  return std::sqrt(sum);
}

double kinetic_energy(const Discretization& disc, const VelocityField& W) {
  double e = 0.0;
  for (int d = 0; d < 2; ++d) e += dot(W[d], disc.mass() * W[d]);
  return 0.5 * e;
}

GepupState state_from_w(const Discretization& disc, VelocityField W, const CaseDefinition& c,
                        double t) {
  check_compatibility(disc.space(), c, t);
  GepupState s;
  s.t = t;
  auto proj = leray_project(disc, W, c, t);
  s.W = std::move(W);
  s.U = std::move(proj.U);
  s.Phi = std::move(proj.Phi);
  s.Q = compute_pressure(disc, s.U, c, t);
  return s;
}

GepupState initial_state(const Discretization& disc, const CaseDefinition& c, double t0) {
  VelocityField w;
  if (c.u0)
    w = interpolate(disc.space(), c.u0, t0);
  else
    w = {Vector(disc.space().n_dofs(), 0.0), Vector(disc.space().n_dofs(), 0.0)};
  auto s = state_from_w(disc, std::move(w), c, t0);
  s.W = s.U;
  return s;
}

}  // namespace gepup
