#pragma once

#include <array>
#include <vector>

#include "ma/mesh.hpp"
#include "ma/quadrature.hpp"
#include "ma/types.hpp"

namespace ma {

// Bernstein-Bezier polynomials of degree d on a triangle, coefficients stored
// in lexicographic order, descending on (a1, a2): (d,0,0), (d-1,1,0),
// (d-1,0,1), (d-2,2,0), ..., (0,0,d). a_i is the exponent of the barycentric
// coordinate of local vertex i.

inline int basis_count(int d) { return (d + 1) * (d + 2) / 2; }

// Position of multi-index (a1, a2, d-a1-a2) in the ordering above.
inline int bform_index(int d, int a1, int a2) {
  const int r = d - a1;  // block of fixed a1; blocks of size r+1 precede it
  return r * (r + 1) / 2 + (r - a2);
}

// All multi-indices of degree d in storage order (cached per degree).
const std::vector<std::array<int, 3>>& bform_indices(int d);

// Affine geometry of one triangle: barycentric-coordinate gradients drive all
// Cartesian derivatives of the B-form.
struct TriGeometry {
  std::array<Vec2, 3> v;
  std::array<Vec2, 3> grad_b;
  double area = 0;
  double diameter = 0;

  static TriGeometry from(const Triangulation& mesh, int t);
  static TriGeometry from_vertices(const Vec2& a, const Vec2& b, const Vec2& c);
  Vec2 point(const BarycentricPoint& p) const {
    return p.b1 * v[0] + p.b2 * v[1] + p.b3 * v[2];
  }
  std::array<double, 3> barycentric(const Vec2& p) const;
};

// Degree reduction: out_beta = a1*c[beta+e1] + a2*c[beta+e2] + a3*c[beta+e3].
// Evaluation uses (a) = the barycentric point; directional derivatives use
// (a) = the directional coordinates grad_b[i] . u, which sum to zero.
void bform_reduce(int d, const double* coeffs, double a1, double a2, double a3, double* out);

// de Casteljau evaluation; coeffs has basis_count(d) entries.
double bform_eval(int d, const double* coeffs, const BarycentricPoint& p);

// Cartesian gradient and Hessian at a barycentric point. Degree 0 gradient and
// degree <= 1 Hessian are identically zero.
Vec2 bform_grad(int d, const double* coeffs, const BarycentricPoint& p, const TriGeometry& g);
Mat2 bform_hess(int d, const double* coeffs, const BarycentricPoint& p, const TriGeometry& g);

// Tabulated Bernstein values of degrees d, d-1, d-2 at a fixed set of points,
// plus index maps between the three degree levels; this is the fast path used
// by assembly and norm evaluation.
struct BernsteinTable {
  int degree = 0;
  MatX vals;    // nq x basis_count(d)
  MatX vals1;   // nq x basis_count(d-1), empty for d == 0
  MatX vals2;   // nq x basis_count(d-2), empty for d <= 1
  // up1[b][i]: degree-d index of beta+e_i for beta of degree d-1.
  std::vector<std::array<int, 3>> up1;
  // up2[g][m]: degree-d index of gamma+e_i+e_j, pairs ordered 11,22,33,12,13,23.
  std::vector<std::array<int, 6>> up2;
  // sub1[a][i]: degree-(d-1) index of alpha-e_i, or -1 when alpha_i == 0.
  std::vector<std::array<int, 3>> sub1;

  static BernsteinTable build(int degree, const std::vector<BarycentricPoint>& points);

  // Value / gradient / Hessian of the B-form with local coefficients c at
  // tabulated point q on a triangle with geometry g.
  double value(const double* c, int q) const;
  Vec2 gradient(const double* c, int q, const TriGeometry& g) const;
  Mat2 hessian(const double* c, int q, const TriGeometry& g) const;
  // Gradient of a single basis function.
  Vec2 basis_gradient(int a, int q, const TriGeometry& g) const;
};

} // namespace ma
