#pragma once

#include <array>
#include <string>
#include <vector>

#include "ma/types.hpp"

namespace ma {

struct Edge {
  int a = -1, b = -1;               // endpoint vertex ids, a < b
  std::array<int, 2> tri{-1, -1};   // incident triangles; tri[1] == -1 on the boundary
  bool on_boundary() const { return tri[1] < 0; }
};

// Conforming 2D triangulation. Triangles are stored counter-clockwise; edge
// adjacency and mesh sizes are filled in by finalize() (all builders call it).
struct Triangulation {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;   // vertex ids, CCW
  std::vector<Edge> edges;
  std::vector<int> boundary_edges;             // indices into edges
  // tri_edges[t][k] is the edge between local vertices k and (k+1)%3.
  std::vector<std::array<int, 3>> tri_edges;
  double h_max = 0.0;   // largest triangle diameter
  double h_min = 0.0;   // smallest triangle diameter

  int nv() const { return static_cast<int>(vertices.size()); }
  int nt() const { return static_cast<int>(triangles.size()); }

  double tri_area(int t) const;
  double tri_diameter(int t) const;
  double total_area() const;
  double quasi_uniformity() const { return h_max / h_min; }

  // Brute-force point location. Returns the containing triangle id (first hit,
  // boundary-inclusive with tolerance) and its barycentric coordinates, or -1.
  int locate(const Vec2& p, std::array<double, 3>* bary = nullptr) const;
};

// Builds edges/boundary lists, validates orientation (throws Error on a
// clockwise or degenerate triangle, area <= 1e-14 * h_max^2), computes h_max/h_min.
void finalize(Triangulation& mesh);

// m x m grid of squares on [0,1]^2, each square split by its negative-slope
// diagonal into two CCW triangles: 2*m^2 triangles, h_max = sqrt(2)/m.
Triangulation build_square_mesh(int m);

// Structured unit-disk mesh: a center vertex plus `rings` concentric rings,
// ring j holding 6j vertices at radius j/rings; annuli are triangulated by an
// angular sweep. 6*rings^2 triangles, quasi-uniform, boundary on the unit circle.
Triangulation build_disk_mesh(int rings);

// Text format: first data line "nv nt", then nv lines "x y", then nt lines
// "i j k" (0-based vertex ids). '#' starts a comment. Throws ParseError with
// a line number on malformed input; finalize() errors also apply.
Triangulation read_mesh(const std::string& path);
void write_mesh(const Triangulation& mesh, const std::string& path);

// Uniform 4-way refinement by edge midpoints: 4x triangle count, h halved,
// child triangles inherit the parent orientation.
Triangulation refine_uniform(const Triangulation& mesh);

} // namespace ma
