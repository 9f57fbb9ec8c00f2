#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ma/bform.hpp"
#include "ma/mesh.hpp"
#include "ma/quadrature.hpp"
#include "ma/types.hpp"

namespace ma {

using ScalarField = std::function<double(const Vec2&)>;

// Linear constraint rows R c = values on the unconstrained coefficient vector.
struct ConstraintRows {
  SpMat rows;    // M x dof
  VecX values;   // length M
  long count() const { return rows.rows(); }
};

// Piecewise Bernstein-Bezier space of degree d on a triangulation, with the
// linear constraints that carve out the C^1-smooth subspace and impose
// boundary data. Coefficients are stored per triangle (triangle t owns the
// contiguous block [t*nb, (t+1)*nb) in bform_index order); all coupling between
// triangles goes through constraint rows.
class SplineSpace {
 public:
  SplineSpace(Triangulation mesh, int degree);

  const Triangulation& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  int nb() const { return nb_; }                       // basis functions per triangle
  long dof() const { return (long)mesh_.nt() * nb_; }  // unconstrained coefficients
  long coeff_offset(int t) const { return (long)t * nb_; }
  const TriGeometry& geometry(int t) const { return geoms_[t]; }

  // C0 rows: one per shared-edge coefficient pair. Equalities between the
  // copies of a vertex coefficient are emitted as a star against the first
  // incident triangle (duplicates around a vertex are deduplicated that way).
  // C1 rows: d per interior edge, the classical B-net condition
  //   c'(1,j,k) = b_a c(1,j,k) + b_p c(0,j+1,k) + b_q c(0,j,k+1),
  // where (b_a, b_p, b_q) are the barycentric coordinates of the neighbor apex
  // with respect to the first triangle. Right-hand side is zero.
  const SpMat& smoothness_constraints() const { return smoothness_; }

  // One row per boundary-edge coefficient, pinning it to the value of the
  // degree-d trace interpolating g at the d+1 equally spaced points of the
  // edge. Corner coefficients pinned by two edges are emitted once per mesh
  // vertex (first edge wins; consistent for continuous g).
  ConstraintRows boundary_constraints(const ScalarField& g) const;

  // Stacked [smoothness; boundary] rows with right-hand side [0; G_g].
  ConstraintRows constraints(const ScalarField& g) const;
  // The same rows with a zero right-hand side (test-space constraints).
  const ConstraintRows& homogeneous_constraints() const;

  // Quadrature + Bernstein tables shared by assembly (exactness covers the
  // cofactor forms, degree max(3d-4, 2d)) and by norm evaluation (2d+2).
  const QuadratureRule& form_rule() const { return *form_rule_; }
  const QuadratureRule& norm_rule() const { return *norm_rule_; }
  const BernsteinTable& form_table() const { return form_table_; }
  const BernsteinTable& norm_table() const { return norm_table_; }

 private:
  void build_smoothness();

  Triangulation mesh_;
  int degree_;
  int nb_;
  std::vector<TriGeometry> geoms_;
  SpMat smoothness_;
  const QuadratureRule* form_rule_;
  const QuadratureRule* norm_rule_;
  BernsteinTable form_table_;
  BernsteinTable norm_table_;
  Eigen::PartialPivLU<MatX> edge_interp_;  // trace interpolation on one edge
  mutable std::unique_ptr<ConstraintRows> homogeneous_;
};

// A spline given by unconstrained per-triangle coefficients. Functions
// produced by the solvers satisfy the smoothness rows to solver tolerance;
// interpolate_local output generally does not.
struct SplineFunction {
  const SplineSpace* space = nullptr;
  VecX coeffs;

  const double* local(int t) const { return coeffs.data() + space->coeff_offset(t); }
  double eval(const Vec2& p) const;
  Vec2 grad(const Vec2& p) const;
  Mat2 hess(const Vec2& p) const;
  // Evaluation from a specified triangle (extrapolates outside it).
  double eval_on(int t, const BarycentricPoint& b) const;
  Vec2 grad_on(int t, const BarycentricPoint& b) const;
  Mat2 hess_on(int t, const BarycentricPoint& b) const;
};

// Max absolute smoothness-row violation |R_s c|_inf (0 for conforming splines).
double smoothness_violation(const SplineFunction& v);

// Per-triangle interpolation at the domain points (a1,a2,a3)/d. Reproduces
// global polynomials of degree <= d exactly (hence conforming for them); for
// general f the result is not C^1.
SplineFunction interpolate_local(const SplineSpace& space, const ScalarField& f);

// Conforming least-squares fit: minimizes the L2 distance to f over splines
// satisfying the smoothness rows (no boundary rows).
SplineFunction project_to_space(const SplineSpace& space, const ScalarField& f);

} // namespace ma
