#include "ma/bform.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ma/errors.hpp"

namespace ma {

const std::vector<std::array<int, 3>>& bform_indices(int d) {
  static std::map<int, std::vector<std::array<int, 3>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(d);
  if (it == cache.end()) {
    std::vector<std::array<int, 3>> idx;
    for (int a1 = d; a1 >= 0; --a1)
      for (int a2 = d - a1; a2 >= 0; --a2)
        idx.push_back({a1, a2, d - a1 - a2});
    it = cache.emplace(d, std::move(idx)).first;
  }
  return it->second;
}

TriGeometry TriGeometry::from_vertices(const Vec2& a, const Vec2& b, const Vec2& c) {
  TriGeometry g;
  g.v = {a, b, c};
  const double twice_area =
      (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  g.area = 0.5 * twice_area;
  g.grad_b[0] = Vec2(b.y() - c.y(), c.x() - b.x()) / twice_area;
  g.grad_b[1] = Vec2(c.y() - a.y(), a.x() - c.x()) / twice_area;
  g.grad_b[2] = Vec2(a.y() - b.y(), b.x() - a.x()) / twice_area;
  g.diameter = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
  return g;
}

TriGeometry TriGeometry::from(const Triangulation& mesh, int t) {
  const auto& tr = mesh.triangles[t];
  return from_vertices(mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]);
}

std::array<double, 3> TriGeometry::barycentric(const Vec2& p) const {
  // b_i is affine with gradient grad_b[i] and value 1 at vertex i.
  const double b1 = 1.0 + grad_b[0].dot(p - v[0]);
  const double b2 = 0.0 + grad_b[1].dot(p - v[0]);
  return {b1, b2, 1.0 - b1 - b2};
}

void bform_reduce(int d, const double* coeffs, double a1, double a2, double a3, double* out) {
  const auto& lower = bform_indices(d - 1);
  for (size_t b = 0; b < lower.size(); ++b) {
    const auto& [i, j, k] = lower[b];
    out[b] = a1 * coeffs[bform_index(d, i + 1, j)] +
             a2 * coeffs[bform_index(d, i, j + 1)] +
             a3 * coeffs[bform_index(d, i, j)];
  }
}

double bform_eval(int d, const double* coeffs, const BarycentricPoint& p) {
  std::vector<double> work(coeffs, coeffs + basis_count(d));
  std::vector<double> next(basis_count(std::max(d - 1, 0)));
  for (int deg = d; deg >= 1; --deg) {
    bform_reduce(deg, work.data(), p.b1, p.b2, p.b3, next.data());
    work.swap(next);
  }
  return work[0];
}

Vec2 bform_grad(int d, const double* coeffs, const BarycentricPoint& p, const TriGeometry& g) {
  if (d < 1) return Vec2::Zero();
  // Directional coordinates of the x and y unit directions.
  std::vector<double> cx(basis_count(d - 1)), cy(basis_count(d - 1));
  bform_reduce(d, coeffs, g.grad_b[0].x(), g.grad_b[1].x(), g.grad_b[2].x(), cx.data());
  bform_reduce(d, coeffs, g.grad_b[0].y(), g.grad_b[1].y(), g.grad_b[2].y(), cy.data());
  return d * Vec2(bform_eval(d - 1, cx.data(), p), bform_eval(d - 1, cy.data(), p));
}

Mat2 bform_hess(int d, const double* coeffs, const BarycentricPoint& p, const TriGeometry& g) {
  Mat2 h = Mat2::Zero();
  if (d < 2) return h;
  std::vector<double> cx(basis_count(d - 1)), cy(basis_count(d - 1));
  bform_reduce(d, coeffs, g.grad_b[0].x(), g.grad_b[1].x(), g.grad_b[2].x(), cx.data());
  bform_reduce(d, coeffs, g.grad_b[0].y(), g.grad_b[1].y(), g.grad_b[2].y(), cy.data());
  std::vector<double> cxx(basis_count(d - 2)), cxy(basis_count(d - 2)), cyy(basis_count(d - 2));
  bform_reduce(d - 1, cx.data(), g.grad_b[0].x(), g.grad_b[1].x(), g.grad_b[2].x(), cxx.data());
  bform_reduce(d - 1, cx.data(), g.grad_b[0].y(), g.grad_b[1].y(), g.grad_b[2].y(), cxy.data());
  bform_reduce(d - 1, cy.data(), g.grad_b[0].y(), g.grad_b[1].y(), g.grad_b[2].y(), cyy.data());
  const double s = double(d) * (d - 1);
  h(0, 0) = s * bform_eval(d - 2, cxx.data(), p);
  h(0, 1) = h(1, 0) = s * bform_eval(d - 2, cxy.data(), p);
  h(1, 1) = s * bform_eval(d - 2, cyy.data(), p);
  return h;
}

namespace {

double multinomial(int d, int i, int j) {
  // d! / (i! j! (d-i-j)!) via a product of binomials; exact in double for d <= 20.
  double r = 1.0;
  int n = d;
  for (int t = 1; t <= i; ++t) r = r * (n--) / t;
  for (int t = 1; t <= j; ++t) r = r * (n--) / t;
  return r;
}

MatX tabulate(int d, const std::vector<BarycentricPoint>& pts) {
  const auto& idx = bform_indices(d);
  MatX vals(pts.size(), idx.size());
  for (size_t q = 0; q < pts.size(); ++q) {
    const auto& p = pts[q];
    for (size_t a = 0; a < idx.size(); ++a) {
      const auto& [i, j, k] = idx[a];
      vals(q, a) = multinomial(d, i, j) * std::pow(p.b1, i) * std::pow(p.b2, j) *
                   std::pow(p.b3, k);
    }
  }
  return vals;
}

} // namespace

BernsteinTable BernsteinTable::build(int degree, const std::vector<BarycentricPoint>& points) {
  if (degree < 1) throw Error("BernsteinTable: degree must be >= 1");
  BernsteinTable t;
  t.degree = degree;
  t.vals = tabulate(degree, points);
  t.vals1 = tabulate(degree - 1, points);
  if (degree >= 2) t.vals2 = tabulate(degree - 2, points);

  for (const auto& [i, j, k] : bform_indices(degree - 1))
    t.up1.push_back({bform_index(degree, i + 1, j), bform_index(degree, i, j + 1),
                     bform_index(degree, i, j)});
  if (degree >= 2)
    for (const auto& [i, j, k] : bform_indices(degree - 2))
      t.up2.push_back({bform_index(degree, i + 2, j), bform_index(degree, i, j + 2),
                       bform_index(degree, i, j), bform_index(degree, i + 1, j + 1),
                       bform_index(degree, i + 1, j), bform_index(degree, i, j + 1)});
  for (const auto& [i, j, k] : bform_indices(degree))
    t.sub1.push_back({i > 0 ? bform_index(degree - 1, i - 1, j) : -1,
                      j > 0 ? bform_index(degree - 1, i, j - 1) : -1,
                      k > 0 ? bform_index(degree - 1, i, j) : -1});
  return t;
}

double BernsteinTable::value(const double* c, int q) const {
  double s = 0.0;
  for (int a = 0; a < vals.cols(); ++a) s += vals(q, a) * c[a];
  return s;
}

Vec2 BernsteinTable::gradient(const double* c, int q, const TriGeometry& g) const {
  double s1 = 0, s2 = 0, s3 = 0;
  for (int b = 0; b < vals1.cols(); ++b) {
    const double v = vals1(q, b);
    s1 += v * c[up1[b][0]];
    s2 += v * c[up1[b][1]];
    s3 += v * c[up1[b][2]];
  }
  return degree * (s1 * g.grad_b[0] + s2 * g.grad_b[1] + s3 * g.grad_b[2]);
}

Mat2 BernsteinTable::hessian(const double* c, int q, const TriGeometry& g) const {
  Mat2 h = Mat2::Zero();
  if (degree < 2) return h;
  double t11 = 0, t22 = 0, t33 = 0, t12 = 0, t13 = 0, t23 = 0;
  for (int gg = 0; gg < vals2.cols(); ++gg) {
    const double v = vals2(q, gg);
    t11 += v * c[up2[gg][0]];
    t22 += v * c[up2[gg][1]];
    t33 += v * c[up2[gg][2]];
    t12 += v * c[up2[gg][3]];
    t13 += v * c[up2[gg][4]];
    t23 += v * c[up2[gg][5]];
  }
  const auto& db = g.grad_b;
  h = t11 * db[0] * db[0].transpose() + t22 * db[1] * db[1].transpose() +
      t33 * db[2] * db[2].transpose();
  h += t12 * (db[0] * db[1].transpose() + db[1] * db[0].transpose());
  h += t13 * (db[0] * db[2].transpose() + db[2] * db[0].transpose());
  h += t23 * (db[1] * db[2].transpose() + db[2] * db[1].transpose());
  return double(degree) * (degree - 1) * h;
}

Vec2 BernsteinTable::basis_gradient(int a, int q, const TriGeometry& g) const {
  Vec2 r = Vec2::Zero();
  for (int i = 0; i < 3; ++i)
    if (sub1[a][i] >= 0) r += vals1(q, sub1[a][i]) * g.grad_b[i];
  return degree * r;
}

} // namespace ma
