#include "ma/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ma/errors.hpp"

namespace ma {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

} // namespace

double Triangulation::tri_area(int t) const {
  const auto& tr = triangles[t];
  return signed_area(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

double Triangulation::tri_diameter(int t) const {
  const auto& tr = triangles[t];
  double d = 0.0;
  for (int k = 0; k < 3; ++k)
    d = std::max(d, (vertices[tr[k]] - vertices[tr[(k + 1) % 3]]).norm());
  return d;
}

double Triangulation::total_area() const {
  double s = 0.0;
  for (int t = 0; t < nt(); ++t) s += tri_area(t);
  return s;
}

int Triangulation::locate(const Vec2& p, std::array<double, 3>* bary) const {
  for (int t = 0; t < nt(); ++t) {
    const auto& tr = triangles[t];
    const Vec2& a = vertices[tr[0]];
    const Vec2& b = vertices[tr[1]];
    const Vec2& c = vertices[tr[2]];
    const double area = signed_area(a, b, c);
    const double b1 = signed_area(p, b, c) / area;
    const double b2 = signed_area(a, p, c) / area;
    const double b3 = 1.0 - b1 - b2;
    const double tol = 1e-10;
    if (b1 >= -tol && b2 >= -tol && b3 >= -tol) {
      if (bary) *bary = {b1, b2, b3};
      return t;
    }
  }
  return -1;
}

void finalize(Triangulation& mesh) {
  const int nv = mesh.nv();
  const int nt = mesh.nt();
  for (int t = 0; t < nt; ++t)
    for (int v : mesh.triangles[t])
      if (v < 0 || v >= nv)
        throw Error("triangle " + std::to_string(t) + " references vertex " +
                    std::to_string(v) + " outside [0," + std::to_string(nv) + ")");

  // Mesh sizes first (edge lengths are well defined even for bad orientation),
  // so the degeneracy threshold below has a scale to compare against.
  mesh.h_max = 0.0;
  mesh.h_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < nt; ++t) {
    const double d = mesh.tri_diameter(t);
    mesh.h_max = std::max(mesh.h_max, d);
    mesh.h_min = std::min(mesh.h_min, d);
  }

  const double area_tol = 1e-14 * mesh.h_max * mesh.h_max;
  for (int t = 0; t < nt; ++t) {
    const double a = mesh.tri_area(t);
    if (a <= area_tol)
      throw Error("triangle " + std::to_string(t) +
                  (a < -area_tol ? " is clockwise" : " is degenerate") +
                  " (signed area " + std::to_string(a) + ")");
  }

  mesh.edges.clear();
  mesh.boundary_edges.clear();
  mesh.tri_edges.assign(nt, {-1, -1, -1});
  std::map<std::pair<int, int>, int> edge_of;  // (min,max) vertex pair -> edge id
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const int p = mesh.triangles[t][k];
      const int q = mesh.triangles[t][(k + 1) % 3];
      const auto key = std::minmax(p, q);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.a = key.first;
        e.b = key.second;
        e.tri[0] = t;
        it = edge_of.emplace(key, static_cast<int>(mesh.edges.size())).first;
        mesh.edges.push_back(e);
      } else {
        Edge& e = mesh.edges[it->second];
        if (e.tri[1] >= 0)
          throw Error("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                      ") is shared by more than two triangles");
        e.tri[1] = t;
      }
      mesh.tri_edges[t][k] = it->second;
    }
  }
  for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e)
    if (mesh.edges[e].on_boundary()) mesh.boundary_edges.push_back(e);
}

Triangulation build_square_mesh(int m) {
  if (m < 1) throw Error("build_square_mesh: m must be >= 1, got " + std::to_string(m));
  Triangulation mesh;
  const auto vid = [m](int i, int j) { return j * (m + 1) + i; };
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i)
      mesh.vertices.emplace_back(double(i) / m, double(j) / m);
  // Square cell (i,j): negative-slope diagonal from the top-left corner to the
  // bottom-right corner; both triangles come out CCW.
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int bl = vid(i, j), br = vid(i + 1, j);
      const int tr = vid(i + 1, j + 1), tl = vid(i, j + 1);
      mesh.triangles.push_back({bl, br, tl});
      mesh.triangles.push_back({br, tr, tl});
    }
  }
  finalize(mesh);
  return mesh;
}

Triangulation build_disk_mesh(int rings) {
  if (rings < 1) throw Error("build_disk_mesh: rings must be >= 1, got " + std::to_string(rings));
  Triangulation mesh;
  std::vector<std::vector<int>> ring_ids(rings + 1);
  mesh.vertices.emplace_back(0.0, 0.0);
  ring_ids[0] = {0};
  for (int j = 1; j <= rings; ++j) {
    const int n = 6 * j;
    const double r = double(j) / rings;
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * M_PI * i / n;
      ring_ids[j].push_back(mesh.nv());
      mesh.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }
  // Triangulate each annulus by sweeping both rings in angle (merge step of two
  // circular sorted lists). The innermost band degenerates to a fan.
  for (int j = 1; j <= rings; ++j) {
    const auto& inner = ring_ids[j - 1];
    const auto& outer = ring_ids[j];
    const int ni = static_cast<int>(inner.size());
    const int no = static_cast<int>(outer.size());
    if (ni == 1) {
      for (int i = 0; i < no; ++i)
        mesh.triangles.push_back({inner[0], outer[i], outer[(i + 1) % no]});
      continue;
    }
    int ii = 0, oo = 0;  // counts of consumed inner/outer advances
    while (ii < ni || oo < no) {
      const double next_inner = (ii + 1) * 2.0 * M_PI / ni;
      const double next_outer = (oo + 1) * 2.0 * M_PI / no;
      const int ci = inner[ii % ni], co = outer[oo % no];
      if (oo < no && (ii == ni || next_outer <= next_inner)) {
        mesh.triangles.push_back({ci, co, outer[(oo + 1) % no]});
        ++oo;
      } else {
        mesh.triangles.push_back({ci, co, inner[(ii + 1) % ni]});
        ++ii;
      }
    }
  }
  finalize(mesh);
  return mesh;
}

Triangulation read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  Triangulation mesh;
  int line_no = 0;
  long nv = -1, nt = -1;
  long got_v = 0, got_t = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    if ((ls >> std::ws).eof()) continue;  // blank or comment-only line
    if (nv < 0) {
      if (!(ls >> nv >> nt) || nv < 0 || nt < 0)
        throw ParseError(path, line_no, "expected header 'nv nt'");
    } else if (got_v < nv) {
      double x, y;
      if (!(ls >> x >> y))
        throw ParseError(path, line_no, "expected vertex line 'x y'");
      mesh.vertices.emplace_back(x, y);
      ++got_v;
    } else if (got_t < nt) {
      long i, j, k;
      if (!(ls >> i >> j >> k))
        throw ParseError(path, line_no, "expected triangle line 'i j k'");
      mesh.triangles.push_back({int(i), int(j), int(k)});
      ++got_t;
    } else {
      throw ParseError(path, line_no, "unexpected extra data");
    }
    if (!(ls >> std::ws).eof())
      throw ParseError(path, line_no, "trailing tokens on line");
  }
  if (nv < 0) throw ParseError(path, line_no, "missing header 'nv nt'");
  if (got_v < nv || got_t < nt)
    throw ParseError(path, line_no, "truncated file: expected " + std::to_string(nv) +
                                        " vertices and " + std::to_string(nt) + " triangles");
  try {
    finalize(mesh);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
  return mesh;
}

void write_mesh(const Triangulation& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  out << mesh.nv() << " " << mesh.nt() << "\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  if (!out) throw Error("failed writing '" + path + "'");
}

Triangulation refine_uniform(const Triangulation& mesh) {
  Triangulation out;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  const auto mid = [&](int p, int q) {
    const auto key = std::minmax(p, q);
    auto it = midpoint.find(key);
    if (it == midpoint.end()) {
      it = midpoint.emplace(key, out.nv()).first;
      out.vertices.push_back(0.5 * (mesh.vertices[p] + mesh.vertices[q]));
    }
    return it->second;
  };
  for (const auto& tr : mesh.triangles) {
    const int m01 = mid(tr[0], tr[1]), m12 = mid(tr[1], tr[2]), m02 = mid(tr[0], tr[2]);
    out.triangles.push_back({tr[0], m01, m02});
    out.triangles.push_back({m01, tr[1], m12});
    out.triangles.push_back({m02, m12, tr[2]});
    out.triangles.push_back({m01, m12, m02});
  }
  finalize(out);
  return out;
}

} // namespace ma
