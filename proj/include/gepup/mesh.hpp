#pragma once

#include <array>
#include <vector>

#include "gepup/geometry.hpp"

namespace gepup {

/// Axis-aligned rectangle [origin, origin + extent].
struct RectDomain {
  Vec2 origin{0.0, 0.0};
  Vec2 extent{1.0, 1.0};

  static RectDomain unit_square() { return {}; }
  double area() const { return extent.x * extent.y; }
};

/// Local face numbering of a quadrilateral: 0 = x-, 1 = x+, 2 = y-, 3 = y+.
enum class LocalFace : int { XMinus = 0, XPlus = 1, YMinus = 2, YPlus = 3 };

struct BoundaryFace {
  int element = 0;
  LocalFace face = LocalFace::XMinus;
  Vec2 normal;
  double length = 0.0;
};

/// Uniform nx-by-ny grid of quadrilaterals. Elements and vertices are numbered
/// row-major: element (i, j) has index j*nx + i.
class StructuredQuadMesh {
 public:
  StructuredQuadMesh(const RectDomain& domain, int nx, int ny, int level);

  const RectDomain& domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int level() const { return level_; }

  double hx() const { return domain_.extent.x / nx_; }
  double hy() const { return domain_.extent.y / ny_; }
  /// Element size used for Courant control and refinement indicators.
  double h_max() const;

  int n_elements() const { return nx_ * ny_; }
  int n_vertices() const { return (nx_ + 1) * (ny_ + 1); }

  int element_index(int i, int j) const { return j * nx_ + i; }
  std::array<int, 2> element_coords(int e) const { return {e % nx_, e / nx_}; }
  /// Lower-left corner of element e.
  Vec2 element_origin(int e) const;
  Vec2 vertex(int i, int j) const;
  /// Element containing the point, clamped to the grid.
  int locate(Vec2 p) const;

 private:
  RectDomain domain_;
  int nx_;
  int ny_;
  int level_;
};

StructuredQuadMesh build_mesh(const RectDomain& domain, std::array<int, 2> base_cells, int level);

/// Nested meshes, coarsest first.
struct MeshHierarchy {
  std::vector<StructuredQuadMesh> levels;

  const StructuredQuadMesh& finest() const { return levels.back(); }
  const StructuredQuadMesh& coarsest() const { return levels.front(); }
  int n_levels() const { return static_cast<int>(levels.size()); }
};

MeshHierarchy build_hierarchy(const RectDomain& domain, std::array<int, 2> base_cells,
                              int finest_level);

/// Faces on the domain boundary in the order x-, x+, y-, y+ sides.
std::vector<BoundaryFace> boundary_faces(const StructuredQuadMesh& mesh);

}  // namespace gepup
