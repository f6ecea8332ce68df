#include "gepup/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gepup {

StructuredQuadMesh::StructuredQuadMesh(const RectDomain& domain, int nx, int ny, int level)
    : domain_(domain), nx_(nx), ny_(ny), level_(level) {
  if (!(domain.extent.x > 0.0) || !(domain.extent.y > 0.0))
    throw std::invalid_argument("domain extent must be strictly positive");
  if (nx <= 0 || ny <= 0)
    throw std::invalid_argument("cells per axis must be positive, got " + std::to_string(nx) +
                                "x" + std::to_string(ny));
  if (level < 0) throw std::invalid_argument("mesh level must be nonnegative");
}

double StructuredQuadMesh::h_max() const { return std::max(hx(), hy()); }

Vec2 StructuredQuadMesh::element_origin(int e) const {
  const auto [i, j] = element_coords(e);
  return vertex(i, j);
}

Vec2 StructuredQuadMesh::vertex(int i, int j) const {
  return {domain_.origin.x + i * hx(), domain_.origin.y + j * hy()};
}

int StructuredQuadMesh::locate(Vec2 p) const {
  const int i = std::clamp(static_cast<int>((p.x - domain_.origin.x) / hx()), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((p.y - domain_.origin.y) / hy()), 0, ny_ - 1);
  return element_index(i, j);
}

StructuredQuadMesh build_mesh(const RectDomain& domain, std::array<int, 2> base_cells,
                              int level) {
  if (base_cells[0] < 1 || base_cells[1] < 1)
    throw std::invalid_argument("base cells must be at least (1,1)");
  if (level < 0 || level > 20) throw std::invalid_argument("mesh level out of range");
  const int factor = 1 << level;
  return StructuredQuadMesh(domain, base_cells[0] * factor, base_cells[1] * factor, level);
}

MeshHierarchy build_hierarchy(const RectDomain& domain, std::array<int, 2> base_cells,
                              int finest_level) {
  if (finest_level < 0) throw std::invalid_argument("finest level must be nonnegative");
  MeshHierarchy h;
  h.levels.reserve(finest_level + 1);
  for (int l = 0; l <= finest_level; ++l) h.levels.push_back(build_mesh(domain, base_cells, l));
  return h;
}

std::vector<BoundaryFace> boundary_faces(const StructuredQuadMesh& mesh) {
  std::vector<BoundaryFace> faces;
  faces.reserve(2 * (mesh.nx() + mesh.ny()));
  for (int j = 0; j < mesh.ny(); ++j)
    faces.push_back({mesh.element_index(0, j), LocalFace::XMinus, {-1.0, 0.0}, mesh.hy()});
  for (int j = 0; j < mesh.ny(); ++j)
    faces.push_back(
        {mesh.element_index(mesh.nx() - 1, j), LocalFace::XPlus, {1.0, 0.0}, mesh.hy()});
  for (int i = 0; i < mesh.nx(); ++i)
    faces.push_back({mesh.element_index(i, 0), LocalFace::YMinus, {0.0, -1.0}, mesh.hx()});
  for (int i = 0; i < mesh.nx(); ++i)
    faces.push_back(
        {mesh.element_index(i, mesh.ny() - 1), LocalFace::YPlus, {0.0, 1.0}, mesh.hx()});
  return faces;
}

}  // namespace gepup
