#pragma once

#include <array>
#include <span>
#include <vector>

#include "gepup/geometry.hpp"

namespace gepup {

inline constexpr int kMinDegree = 1;
inline constexpr int kMaxDegree = 4;

struct QuadratureRule1D {
  std::vector<double> points;   // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
QuadratureRule1D gauss_legendre(int n_points);

/// Gauss-Lobatto support points of the degree-k Lagrange basis on [0, 1].
std::vector<double> gauss_lobatto_nodes(int degree);

/// 1D Lagrange basis on the given nodes: values and derivatives at x.
void lagrange_1d(std::span<const double> nodes, double x, std::span<double> values,
                 std::span<double> derivatives);

struct ShapeValues {
  std::vector<double> values;
  std::vector<std::array<double, 2>> gradients;
};

/// Tensor-product Q_k shape functions at a point of the reference square.
/// Local index i = b*(k+1) + a, with a the x-index and b the y-index.
ShapeValues shape_eval(int degree, Vec2 reference_point);

/// Reference Q_k element on [0,1]^2 with tabulated shape data at the
/// (k+2)^2 Gauss points.
class ReferenceElement {
 public:
  explicit ReferenceElement(int degree);

  int degree() const { return degree_; }
  int n_nodes_1d() const { return degree_ + 1; }
  int n_local() const { return n_nodes_1d() * n_nodes_1d(); }
  int n_quad_1d() const { return static_cast<int>(quad_.points.size()); }
  int n_quad() const { return n_quad_1d() * n_quad_1d(); }

  const std::vector<double>& nodes_1d() const { return nodes_; }
  const QuadratureRule1D& quadrature_1d() const { return quad_; }

  Vec2 node(int i) const;
  Vec2 quad_point(int q) const;
  double quad_weight(int q) const;

  /// Shape value / reference gradient of local function i at quadrature point q.
  double value(int q, int i) const { return values_[q * n_local() + i]; }
  double grad_x(int q, int i) const { return grad_x_[q * n_local() + i]; }
  double grad_y(int q, int i) const { return grad_y_[q * n_local() + i]; }

  /// 1D tables: basis a at 1D quadrature point q, and at 1D node m.
  double value_1d(int q, int a) const { return value_1d_[q * n_nodes_1d() + a]; }
  double deriv_1d(int q, int a) const { return deriv_1d_[q * n_nodes_1d() + a]; }
  double deriv_at_node_1d(int m, int a) const { return deriv_node_1d_[m * n_nodes_1d() + a]; }

  /// Local indices of the k+1 nodes on a face, ordered by increasing coordinate.
  std::vector<int> face_nodes(int face) const;

 private:
  int degree_;
  std::vector<double> nodes_;
  QuadratureRule1D quad_;
  std::vector<double> values_, grad_x_, grad_y_;
  std::vector<double> value_1d_, deriv_1d_, deriv_node_1d_;
};

}  // namespace gepup
