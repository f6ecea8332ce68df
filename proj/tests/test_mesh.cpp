#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "gepup/mesh.hpp"

using namespace gepup;

TEST_CASE("build_mesh refines by powers of two") {
  const auto m = build_mesh(RectDomain::unit_square(), {1, 1}, 3);
  CHECK(m.nx() == 8);
  CHECK(m.ny() == 8);
  CHECK(m.n_elements() == 64);
  CHECK(m.n_vertices() == 81);
  CHECK(m.hx() == doctest::Approx(1.0 / 8));

  const auto single = build_mesh(RectDomain::unit_square(), {1, 1}, 0);
  CHECK(single.n_elements() == 1);

  const auto fine = build_mesh(RectDomain::unit_square(), {1, 1}, 6);
  CHECK(fine.h_max() == 1.0 / 64);
}

TEST_CASE("build_mesh rejects bad input") {
  CHECK_THROWS_AS(build_mesh(RectDomain::unit_square(), {0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(RectDomain::unit_square(), {1, -2}, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh({{0, 0}, {0.0, 1.0}}, {1, 1}, 0), std::invalid_argument);
}

TEST_CASE("anisotropic meshes report the larger cell width") {
  const auto m = build_mesh({{0, 0}, {2.0, 1.0}}, {1, 1}, 2);
  CHECK(m.hx() == 0.5);
  CHECK(m.hy() == 0.25);
  CHECK(m.h_max() == 0.5);
}

TEST_CASE("element areas sum to the domain area") {
  const RectDomain d{{-0.3, 0.7}, {1.7, 0.9}};
  const auto m = build_mesh(d, {3, 2}, 2);
  double area = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) area += m.hx() * m.hy();
  CHECK(area == doctest::Approx(d.area()).epsilon(1e-14));
}

TEST_CASE("build_hierarchy nests levels") {
  const auto h = build_hierarchy(RectDomain::unit_square(), {1, 1}, 2);
  REQUIRE(h.n_levels() == 3);
  CHECK(h.levels[0].n_elements() == 1);
  CHECK(h.levels[1].n_elements() == 4);
  CHECK(h.levels[2].n_elements() == 16);
  for (int l = 0; l + 1 < h.n_levels(); ++l) {
    CHECK(2 * h.levels[l].nx() == h.levels[l + 1].nx());
    CHECK(2 * h.levels[l].ny() == h.levels[l + 1].ny());
  }

  const auto h6 = build_hierarchy(RectDomain::unit_square(), {1, 1}, 6);
  CHECK(h6.finest().hx() == 1.0 / 64);
  CHECK(build_hierarchy(RectDomain::unit_square(), {2, 3}, 0).n_levels() == 1);
}

TEST_CASE("every coarse element is the union of four fine elements") {
  const auto h = build_hierarchy({{0, 0}, {2, 1}}, {2, 1}, 3);
  for (int l = 0; l + 1 < h.n_levels(); ++l) {
    const auto& c = h.levels[l];
    const auto& f = h.levels[l + 1];
    std::vector<int> count(c.n_elements(), 0);
    for (int e = 0; e < f.n_elements(); ++e) {
      const auto [i, j] = f.element_coords(e);
      ++count[c.element_index(i / 2, j / 2)];
      // the fine element lies inside its parent
      const Vec2 fo = f.element_origin(e);
      const Vec2 co = c.element_origin(c.element_index(i / 2, j / 2));
      CHECK(fo.x >= co.x - 1e-15);
      CHECK(fo.x + f.hx() <= co.x + c.hx() + 1e-15);
    }
    for (int n : count) CHECK(n == 4);
  }
}

TEST_CASE("build_mesh is deterministic") {
  const auto a = build_mesh(RectDomain::unit_square(), {2, 3}, 2);
  const auto b = build_mesh(RectDomain::unit_square(), {2, 3}, 2);
  for (int e = 0; e < a.n_elements(); ++e) CHECK(a.element_origin(e) == b.element_origin(e));
  CHECK(a.element_index(3, 2) == 2 * a.nx() + 3);
}

TEST_CASE("boundary faces") {
  const auto unit = build_mesh(RectDomain::unit_square(), {1, 1}, 0);
  const auto f1 = boundary_faces(unit);
  REQUIRE(f1.size() == 4);
  std::set<std::pair<double, double>> normals;
  for (const auto& f : f1) normals.insert({f.normal.x, f.normal.y});
  CHECK(normals == std::set<std::pair<double, double>>{{-1, 0}, {1, 0}, {0, -1}, {0, 1}});

  const auto m = build_mesh(RectDomain::unit_square(), {1, 1}, 3);
  const auto faces = boundary_faces(m);
  CHECK(faces.size() == 32);
  Vec2 sum;
  std::set<std::pair<int, int>> seen;
  for (const auto& f : faces) {
    sum = sum + f.length * f.normal;
    CHECK(seen.insert({f.element, static_cast<int>(f.face)}).second);
  }
  CHECK(std::abs(sum.x) < 1e-14);
  CHECK(std::abs(sum.y) < 1e-14);
}
