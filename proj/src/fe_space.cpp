#include "gepup/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gepup {

FeSpace::FeSpace(StructuredQuadMesh mesh, int degree)
    : mesh_(std::move(mesh)),
      ref_(degree),
      n_dofs_x_(degree * mesh_.nx() + 1),
      n_dofs_y_(degree * mesh_.ny() + 1) {
  const int k = degree;
  const int n1 = k + 1;
  const int nl = n1 * n1;
  element_dofs_.resize(static_cast<std::size_t>(mesh_.n_elements()) * nl);
  for (int e = 0; e < mesh_.n_elements(); ++e) {
    const auto [ei, ej] = mesh_.element_coords(e);
    for (int b = 0; b < n1; ++b)
      for (int a = 0; a < n1; ++a)
        element_dofs_[static_cast<std::size_t>(e) * nl + b * n1 + a] =
            (ej * k + b) * n_dofs_x_ + (ei * k + a);
  }
  boundary_mask_.assign(n_dofs(), 0);
  for (int J = 0; J < n_dofs_y_; ++J)
    for (int I = 0; I < n_dofs_x_; ++I)
      if (I == 0 || J == 0 || I == n_dofs_x_ - 1 || J == n_dofs_y_ - 1) {
        boundary_mask_[J * n_dofs_x_ + I] = 1;
        boundary_dofs_.push_back(J * n_dofs_x_ + I);
      }
}

Vec2 FeSpace::support_point(int dof) const {
  const int k = degree();
  const int I = dof % n_dofs_x_;
  const int J = dof / n_dofs_x_;
  const auto& nodes = ref_.nodes_1d();
  const auto& o = mesh_.domain().origin;
  const auto& ext = mesh_.domain().extent;
  auto coord = [&](int idx, int ncells, double h, double origin, double extent) {
    if (idx == k * ncells) return origin + extent;
    return origin + (idx / k) * h + nodes[idx % k] * h;
  };
  return {coord(I, mesh_.nx(), mesh_.hx(), o.x, ext.x), coord(J, mesh_.ny(), mesh_.hy(), o.y, ext.y)};
}

Vec2 FeSpace::map_to_physical(int e, Vec2 r) const {
  const Vec2 o = mesh_.element_origin(e);
  return {o.x + r.x * mesh_.hx(), o.y + r.y * mesh_.hy()};
}

void gather(const FeSpace& space, int e, std::span<const double> global, std::span<double> local) {
  const auto dofs = space.element_dofs(e);
  for (std::size_t i = 0; i < dofs.size(); ++i) local[i] = global[dofs[i]];
}

void sample_at_quadrature(const FeSpace& space, std::span<const double> local,
                          QuadratureSample& out) {
  const auto& ref = space.reference();
  const int nq = ref.n_quad();
  const int nl = ref.n_local();
  out.value.assign(nq, 0.0);
  out.dx.assign(nq, 0.0);
  out.dy.assign(nq, 0.0);
  const double ihx = 1.0 / space.mesh().hx();
  const double ihy = 1.0 / space.mesh().hy();
  for (int q = 0; q < nq; ++q) {
    double v = 0.0, gx = 0.0, gy = 0.0;
    for (int i = 0; i < nl; ++i) {
      v += ref.value(q, i) * local[i];
      gx += ref.grad_x(q, i) * local[i];
      gy += ref.grad_y(q, i) * local[i];
    }
    out.value[q] = v;
    out.dx[q] = gx * ihx;
    out.dy[q] = gy * ihy;
  }
}

namespace {

Vec2 to_reference(const FeSpace& space, int e, Vec2 p) {
  const Vec2 o = space.mesh().element_origin(e);
  return {std::clamp((p.x - o.x) / space.mesh().hx(), 0.0, 1.0),
          std::clamp((p.y - o.y) / space.mesh().hy(), 0.0, 1.0)};
}

}  // namespace

double evaluate(const FeSpace& space, std::span<const double> coeffs, Vec2 p) {
  const int e = space.mesh().locate(p);
  const auto sv = shape_eval(space.degree(), to_reference(space, e, p));
  const auto dofs = space.element_dofs(e);
  double v = 0.0;
  for (std::size_t i = 0; i < dofs.size(); ++i) v += sv.values[i] * coeffs[dofs[i]];
  return v;
}

Vec2 evaluate_gradient(const FeSpace& space, std::span<const double> coeffs, Vec2 p) {
  const int e = space.mesh().locate(p);
  const auto sv = shape_eval(space.degree(), to_reference(space, e, p));
  const auto dofs = space.element_dofs(e);
  Vec2 g;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    g.x += sv.gradients[i][0] * coeffs[dofs[i]];
    g.y += sv.gradients[i][1] * coeffs[dofs[i]];
  }
  return {g.x / space.mesh().hx(), g.y / space.mesh().hy()};
}

Vector interpolate(const FeSpace& space, const ScalarFunction& f, double t) {
  Vector out(space.n_dofs());
  for (int j = 0; j < space.n_dofs(); ++j) out[j] = f(space.support_point(j), t);
  return out;
}

std::array<Vector, 2> interpolate(const FeSpace& space, const VectorFunction& f, double t) {
  std::array<Vector, 2> out{Vector(space.n_dofs()), Vector(space.n_dofs())};
  for (int j = 0; j < space.n_dofs(); ++j) {
    const Vec2 v = f(space.support_point(j), t);
    out[0][j] = v.x;
    out[1][j] = v.y;
  }
  return out;
}

double ErrorNorms::get(Norm n) const {
  switch (n) {
    case Norm::L2: return l2;
    case Norm::H1: return h1;
    case Norm::H1Semi: return h1_semi;
    case Norm::Linf: return linf;
  }
  return 0.0;
}

namespace {

// Accumulates errors of `ncomp` FE components against exact values/gradients.
template <int NComp, typename Exact>
ErrorNorms accumulate_errors(const FeSpace& space, const std::array<std::span<const double>, NComp>& f,
                             Exact&& exact, double t) {
  const auto& ref = space.reference();
  const auto& mesh = space.mesh();
  const int nl = ref.n_local();
  const double jxw = mesh.hx() * mesh.hy();
  std::vector<double> local(nl);
  std::array<QuadratureSample, NComp> qs;
  double l2 = 0.0, h1s = 0.0, linf = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    std::array<std::vector<double>, NComp> locals;
    for (int c = 0; c < NComp; ++c) {
      locals[c].resize(nl);
      gather(space, e, f[c], locals[c]);
      sample_at_quadrature(space, locals[c], qs[c]);
    }
    for (int q = 0; q < ref.n_quad(); ++q) {
      const Vec2 x = space.map_to_physical(e, ref.quad_point(q));
      std::array<double, NComp> ev;
      std::array<Vec2, NComp> eg;
      exact(x, t, ev, eg);
      double pt = 0.0;
      for (int c = 0; c < NComp; ++c) {
        const double d = qs[c].value[q] - ev[c];
        const double gx = qs[c].dx[q] - eg[c].x;
        const double gy = qs[c].dy[q] - eg[c].y;
        l2 += ref.quad_weight(q) * jxw * d * d;
        h1s += ref.quad_weight(q) * jxw * (gx * gx + gy * gy);
        pt += d * d;
      }
      linf = std::max(linf, std::sqrt(pt));
    }
    // support points of the element (FE values equal coefficients there)
    const auto dofs = space.element_dofs(e);
    for (int i = 0; i < nl; ++i) {
      const Vec2 x = space.support_point(dofs[i]);
      std::array<double, NComp> ev;
      std::array<Vec2, NComp> eg;
      exact(x, t, ev, eg);
      double pt = 0.0;
      for (int c = 0; c < NComp; ++c) {
        const double d = locals[c][i] - ev[c];
        pt += d * d;
      }
      linf = std::max(linf, std::sqrt(pt));
    }
  }
  ErrorNorms out;
  out.l2 = std::sqrt(l2);
  out.h1_semi = std::sqrt(h1s);
  out.h1 = std::sqrt(l2 + h1s);
  out.linf = linf;
  return out;
}

}  // namespace

ErrorNorms compute_errors(const FeSpace& space, std::span<const double> coeffs,
                          const ScalarFunction& exact, const std::function<Vec2(Vec2, double)>& grad,
                          double t) {
  return accumulate_errors<1>(
      space, {coeffs},
      [&](Vec2 x, double tt, std::array<double, 1>& v, std::array<Vec2, 1>& g) {
        v[0] = exact(x, tt);
        g[0] = grad ? grad(x, tt) : Vec2{};
      },
      t);
}

double error_norm(const FeSpace& space, std::span<const double> coeffs, const ScalarFunction& exact,
                  const std::function<Vec2(Vec2, double)>& grad, double t, Norm norm) {
  if ((norm == Norm::H1 || norm == Norm::H1Semi) && !grad)
    throw std::invalid_argument("H1 error requires the exact gradient");
  return compute_errors(space, coeffs, exact, grad, t).get(norm);
}

ErrorNorms compute_vector_errors(const FeSpace& space, const std::array<Vector, 2>& u,
                                 const VectorFunction& exact, const VectorGradientFunction& grad,
                                 double t) {
  return accumulate_errors<2>(
      space, {std::span<const double>(u[0]), std::span<const double>(u[1])},
      [&](Vec2 x, double tt, std::array<double, 2>& v, std::array<Vec2, 2>& g) {
        const Vec2 ev = exact(x, tt);
        v = {ev.x, ev.y};
        g = grad ? grad(x, tt) : std::array<Vec2, 2>{};
      },
      t);
}

double integrate(const FeSpace& space, std::span<const double> coeffs) {
  const auto& ref = space.reference();
  const double jxw = space.mesh().hx() * space.mesh().hy();
  std::vector<double> local(ref.n_local());
  QuadratureSample qs;
  double s = 0.0;
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    gather(space, e, coeffs, local);
    sample_at_quadrature(space, local, qs);
    for (int q = 0; q < ref.n_quad(); ++q) s += ref.quad_weight(q) * jxw * qs.value[q];
  }
  return s;
}

}  // namespace gepup
