#include <algorithm>
#include <cmath>
#include <string>

#include "degenlab/error.hpp"
#include "degenlab/grid.hpp"

namespace degenlab {

Mesh build_mesh(int dimension, std::array<Interval, 2> box, std::size_t n, std::size_t cap) {
  if (dimension != 1 && dimension != 2) throw ArgumentError("mesh dimension must be 1 or 2");
  if (n < 8) throw ArgumentError("mesh needs at least 8 cells per axis");
  for (int a = 0; a < dimension; ++a) {
    if (!(box[a].hi > box[a].lo)) throw ArgumentError("mesh box is degenerate");
  }
  const std::size_t per_axis = n + 1;
  const std::size_t total = dimension == 1 ? per_axis : per_axis * per_axis;
  if (total > cap) {
    throw ResourceError("mesh has " + std::to_string(total) + " points, above the cap of " +
                        std::to_string(cap));
  }
  Mesh m;
  m.dimension = dimension;
  m.box = box;
  m.n = n;
  m.h[0] = box[0].width() / static_cast<double>(n);
  if (dimension == 2) {
    m.h[1] = box[1].width() / static_cast<double>(n);
  } else {
    m.box[1] = {0.0, 0.0};
  }
  return m;
}

Point Mesh::point(std::size_t idx) const {
  const auto [i, j] = coords(idx);
  Point p{box[0].lo + static_cast<double>(i) * h[0], 0.0};
  if (dimension == 2) p[1] = box[1].lo + static_cast<double>(j) * h[1];
  return p;
}

std::size_t Mesh::nearest(const Point& p) const {
  auto axis = [&](int a) {
    const double u = std::round((p[a] - box[a].lo) / h[a]);
    return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(n)));
  };
  return dimension == 1 ? axis(0) : index(axis(0), axis(1));
}

std::size_t Mesh::face_count(int axis) const {
  if (dimension == 1) return axis == 0 ? n : 0;
  return n * (n + 1);
}

std::array<std::size_t, 2> Mesh::face_nodes(int axis, std::size_t face) const {
  if (dimension == 1) return {face, face + 1};
  if (axis == 0) {
    const std::size_t j = face / n;
    const std::size_t i = face % n;
    return {index(i, j), index(i + 1, j)};
  }
  const std::size_t j = face / (n + 1);
  const std::size_t i = face % (n + 1);
  return {index(i, j), index(i, j + 1)};
}

Point Mesh::face_midpoint(int axis, std::size_t face) const {
  const auto [a, b] = face_nodes(axis, face);
  const Point pa = point(a);
  const Point pb = point(b);
  return {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])};
}

}  // namespace degenlab
