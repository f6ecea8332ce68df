#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "gepup/mesh.hpp"
#include "gepup/reference_element.hpp"
#include "gepup/sparse.hpp"

namespace gepup {

using ScalarFunction = std::function<double(Vec2, double)>;
using VectorFunction = std::function<Vec2(Vec2, double)>;
/// Gradients of the two components of a vector field: {grad u_x, grad u_y}.
using VectorGradientFunction = std::function<std::array<Vec2, 2>(Vec2, double)>;

/// Degree-k continuous Lagrange space on a structured quad mesh.
/// Global DoFs form a (k*nx+1) x (k*ny+1) lattice numbered row-major.
class FeSpace {
 public:
  FeSpace(StructuredQuadMesh mesh, int degree);

  const StructuredQuadMesh& mesh() const { return mesh_; }
  const ReferenceElement& reference() const { return ref_; }
  int degree() const { return ref_.degree(); }
  int n_dofs() const { return n_dofs_x_ * n_dofs_y_; }
  int n_dofs_x() const { return n_dofs_x_; }
  int n_dofs_y() const { return n_dofs_y_; }
  int n_local() const { return ref_.n_local(); }

  std::span<const int> element_dofs(int e) const {
    return {element_dofs_.data() + static_cast<std::size_t>(e) * n_local(),
            static_cast<std::size_t>(n_local())};
  }
  Vec2 support_point(int dof) const;
  bool is_boundary_dof(int dof) const { return boundary_mask_[dof] != 0; }
  const std::vector<char>& boundary_mask() const { return boundary_mask_; }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }

  /// Physical coordinates of a reference point in element e.
  Vec2 map_to_physical(int e, Vec2 reference_point) const;

 private:
  StructuredQuadMesh mesh_;
  ReferenceElement ref_;
  int n_dofs_x_;
  int n_dofs_y_;
  std::vector<int> element_dofs_;
  std::vector<char> boundary_mask_;
  std::vector<int> boundary_dofs_;
};

/// Gathers the local coefficients of element e.
void gather(const FeSpace& space, int e, std::span<const double> global, std::span<double> local);

/// Values and physical gradients of an FE function at the quadrature points of one element.
struct QuadratureSample {
  std::vector<double> value;
  std::vector<double> dx;
  std::vector<double> dy;
};
void sample_at_quadrature(const FeSpace& space, std::span<const double> local,
                          QuadratureSample& out);

/// Point evaluation of an FE function (value and gradient).
double evaluate(const FeSpace& space, std::span<const double> coeffs, Vec2 p);
Vec2 evaluate_gradient(const FeSpace& space, std::span<const double> coeffs, Vec2 p);

Vector interpolate(const FeSpace& space, const ScalarFunction& f, double t);
std::array<Vector, 2> interpolate(const FeSpace& space, const VectorFunction& f, double t);

enum class Norm { L2, H1, H1Semi, Linf };

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  /// Full H1 norm: sqrt(l2^2 + h1_semi^2).
  double h1 = 0.0;
  /// Max over element quadrature points and support points.
  double linf = 0.0;

  double get(Norm n) const;
};

ErrorNorms compute_errors(const FeSpace& space, std::span<const double> coeffs,
                          const ScalarFunction& exact, const std::function<Vec2(Vec2, double)>& grad,
                          double t);
double error_norm(const FeSpace& space, std::span<const double> coeffs, const ScalarFunction& exact,
                  const std::function<Vec2(Vec2, double)>& grad, double t, Norm norm);

/// Vector-field errors; Linf uses the Euclidean magnitude of the pointwise error.
ErrorNorms compute_vector_errors(const FeSpace& space, const std::array<Vector, 2>& u,
                                 const VectorFunction& exact, const VectorGradientFunction& grad,
                                 double t);

/// Integral of an FE function over the domain.
double integrate(const FeSpace& space, std::span<const double> coeffs);

}  // namespace gepup
