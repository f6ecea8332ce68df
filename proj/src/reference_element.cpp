#include "gepup/reference_element.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gepup {

namespace {

void check_degree(int degree) {
  if (degree < kMinDegree || degree > kMaxDegree)
    throw std::invalid_argument("unsupported polynomial degree " + std::to_string(degree) +
                                " (supported: 1..4)");
}

}  // namespace

QuadratureRule1D gauss_legendre(int n_points) {
  if (n_points < 1) throw std::invalid_argument("quadrature needs at least one point");
  const int n = n_points;
  QuadratureRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Legendre P_n and its derivative on [-1, 1]
  auto legendre = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    const double p = (n == 1) ? x : p1;
    const double pm1 = (n == 1) ? 1.0 : p0;
    return std::array<double, 2>{p, n * (x * p - pm1) / (x * x - 1.0)};
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x)[1];
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;
  return rule;
}

std::vector<double> gauss_lobatto_nodes(int degree) {
  check_degree(degree);
  switch (degree) {
    case 1:
      return {0.0, 1.0};
    case 2:
      return {0.0, 0.5, 1.0};
    case 3: {
      const double s = 0.5 / std::sqrt(5.0);
      return {0.0, 0.5 - s, 0.5 + s, 1.0};
    }
    default: {
      const double s = 0.5 * std::sqrt(3.0 / 7.0);
      return {0.0, 0.5 - s, 0.5, 0.5 + s, 1.0};
    }
  }
}

void lagrange_1d(std::span<const double> nodes, double x, std::span<double> values,
                 std::span<double> derivatives) {
  const std::size_t n = nodes.size();
  for (std::size_t a = 0; a < n; ++a) {
    double v = 1.0;
    double d = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == a) continue;
      const double inv = 1.0 / (nodes[a] - nodes[l]);
      d = d * (x - nodes[l]) * inv + v * inv;
      v *= (x - nodes[l]) * inv;
    }
    values[a] = v;
    derivatives[a] = d;
  }
}

ShapeValues shape_eval(int degree, Vec2 p) {
  check_degree(degree);
  const auto nodes = gauss_lobatto_nodes(degree);
  const int n1 = degree + 1;
  std::vector<double> vx(n1), dx(n1), vy(n1), dy(n1);
  lagrange_1d(nodes, p.x, vx, dx);
  lagrange_1d(nodes, p.y, vy, dy);
  ShapeValues out;
  out.values.resize(n1 * n1);
  out.gradients.resize(n1 * n1);
  for (int b = 0; b < n1; ++b)
    for (int a = 0; a < n1; ++a) {
      const int i = b * n1 + a;
      out.values[i] = vx[a] * vy[b];
      out.gradients[i] = {dx[a] * vy[b], vx[a] * dy[b]};
    }
  return out;
}

ReferenceElement::ReferenceElement(int degree)
    : degree_(degree), nodes_(gauss_lobatto_nodes(degree)), quad_(gauss_legendre(degree + 2)) {
  const int n1 = n_nodes_1d();
  const int nq1 = n_quad_1d();
  value_1d_.resize(nq1 * n1);
  deriv_1d_.resize(nq1 * n1);
  for (int q = 0; q < nq1; ++q)
    lagrange_1d(nodes_, quad_.points[q], std::span(value_1d_).subspan(q * n1, n1),
                std::span(deriv_1d_).subspan(q * n1, n1));
  deriv_node_1d_.resize(n1 * n1);
  std::vector<double> scratch(n1);
  for (int m = 0; m < n1; ++m)
    lagrange_1d(nodes_, nodes_[m], scratch, std::span(deriv_node_1d_).subspan(m * n1, n1));

  const int nl = n_local();
  values_.resize(n_quad() * nl);
  grad_x_.resize(n_quad() * nl);
  grad_y_.resize(n_quad() * nl);
  for (int qy = 0; qy < nq1; ++qy)
    for (int qx = 0; qx < nq1; ++qx) {
      const int q = qy * nq1 + qx;
      for (int b = 0; b < n1; ++b)
        for (int a = 0; a < n1; ++a) {
          const int i = b * n1 + a;
          values_[q * nl + i] = value_1d(qx, a) * value_1d(qy, b);
          grad_x_[q * nl + i] = deriv_1d(qx, a) * value_1d(qy, b);
          grad_y_[q * nl + i] = value_1d(qx, a) * deriv_1d(qy, b);
        }
    }
}

Vec2 ReferenceElement::node(int i) const {
  return {nodes_[i % n_nodes_1d()], nodes_[i / n_nodes_1d()]};
}

Vec2 ReferenceElement::quad_point(int q) const {
  return {quad_.points[q % n_quad_1d()], quad_.points[q / n_quad_1d()]};
}

double ReferenceElement::quad_weight(int q) const {
  return quad_.weights[q % n_quad_1d()] * quad_.weights[q / n_quad_1d()];
}

std::vector<int> ReferenceElement::face_nodes(int face) const {
  const int n1 = n_nodes_1d();
  std::vector<int> out(n1);
  for (int m = 0; m < n1; ++m) {
    switch (face) {
      case 0: out[m] = m * n1; break;
      case 1: out[m] = m * n1 + degree_; break;
      case 2: out[m] = m; break;
      case 3: out[m] = degree_ * n1 + m; break;
      default: throw std::invalid_argument("face index out of range");
    }
  }
  return out;
}

}  // namespace gepup
