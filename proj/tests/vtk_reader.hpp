#pragma once

// Minimal legacy-ASCII VTK reader used only by the tests. It accepts the
// UNSTRUCTURED_GRID subset the writer emits and throws on anything malformed.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vtk {

struct Grid {
  std::string title;
  std::vector<std::array<double, 3>> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> cell_types;
  std::map<std::string, std::vector<double>> scalars;
  std::map<std::string, std::vector<std::array<double, 3>>> vectors;
};

inline void expect(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("vtk: " + what);
}

inline Grid read(const std::filesystem::path& path) {
  std::ifstream in(path);
  expect(static_cast<bool>(in), "cannot open " + path.string());
  Grid g;
  std::string line;
  std::getline(in, line);
  expect(line.rfind("# vtk DataFile Version", 0) == 0, "bad header");
  std::getline(in, g.title);
  std::getline(in, line);
  expect(line == "ASCII", "only ASCII supported");

  std::string word;
  in >> word;
  expect(word == "DATASET", "missing DATASET");
  in >> word;
  expect(word == "UNSTRUCTURED_GRID", "not an unstructured grid");

  std::size_t n_points = 0;
  while (in >> word) {
    if (word == "POINTS") {
      std::string type;
      in >> n_points >> type;
      g.points.resize(n_points);
      for (auto& p : g.points) in >> p[0] >> p[1] >> p[2];
    } else if (word == "CELLS") {
      std::size_t n = 0, size = 0, consumed = 0;
      in >> n >> size;
      g.cells.resize(n);
      for (auto& c : g.cells) {
        int k = 0;
        in >> k;
        expect(k > 0, "empty cell");
        c.resize(k);
        for (int& id : c) {
          in >> id;
          expect(id >= 0 && static_cast<std::size_t>(id) < n_points, "cell references missing point");
        }
        consumed += k + 1;
      }
      expect(consumed == size, "CELLS size mismatch");
    } else if (word == "CELL_TYPES") {
      std::size_t n = 0;
      in >> n;
      expect(n == g.cells.size(), "CELL_TYPES count mismatch");
      g.cell_types.resize(n);
      for (int& t : g.cell_types) in >> t;
    } else if (word == "POINT_DATA") {
      std::size_t n = 0;
      in >> n;
      expect(n == n_points, "POINT_DATA count mismatch");
    } else if (word == "SCALARS") {
      std::string name, type, lookup, table;
      int comps = 1;
      in >> name >> type >> comps >> lookup >> table;
      expect(comps == 1 && lookup == "LOOKUP_TABLE", "unsupported SCALARS block");
      auto& v = g.scalars[name];
      v.resize(n_points);
      for (double& x : v) in >> x;
    } else if (word == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      auto& v = g.vectors[name];
      v.resize(n_points);
      for (auto& x : v) in >> x[0] >> x[1] >> x[2];
    } else {
      throw std::runtime_error("vtk: unexpected keyword " + word);
    }
    expect(!in.fail(), "truncated data after " + word);
  }
  return g;
}

}  // namespace vtk
