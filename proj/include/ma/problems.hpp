#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ma/iterate.hpp"
#include "ma/mesh.hpp"
#include "ma/spline_space.hpp"
#include "ma/types.hpp"

namespace ma {

// A Dirichlet problem det D^2 u = f, u = g on the domain boundary, with the
// exact solution (and its derivatives) attached when known.
struct ProblemSpec {
  std::string name;
  enum class Domain { square, disk } domain = Domain::square;
  ScalarField f, g;
  bool has_exact = false;
  ScalarField exact;
  std::function<Vec2(const Vec2&)> exact_grad;
  std::function<Mat2(const Vec2&)> exact_hess;

  // Point on the true domain boundary, t in [0,1) walking the perimeter.
  Vec2 boundary_point(double t) const;
  // Mesh for a study level (square: 2^level x 2^level grid; disk: 2^(level+1)
  // rings). The returned h is the reported grid spacing 1/m resp. 1/rings.
  Triangulation level_mesh(int level, double* h = nullptr) const;
};

// Built-in problems:
//   test1  u = exp((x^2+y^2)/2), f = (1+x^2+y^2) exp(x^2+y^2)       [smooth]
//   test3  f = 1, g = 0                                  [no closed form]
//   test4  u = -sqrt(2-x^2-y^2), f = 2/(2-x^2-y^2)^2   [corner singularity]
//   test5  unit disk, u = x^2+y^2-1, f = 4, g = 0
//   test6  f = 0, g = |x-1/2|                  [degenerate, smoke test only]
ProblemSpec builtin(const std::string& name);
std::vector<std::string> builtin_names();

struct ErrorReport {
  double h = 0;
  long dof = 0;
  int n_it = 0;
  double l2 = 0, h1 = 0, h2 = 0;  // h1/h2 are seminorm-completed; h2 is broken
  double rate_l2 = 0, rate_h1 = 0, rate_h2 = 0;  // NaN when undefined
  double time_s = 0;
};

// Errors of u_h against the problem's exact solution by quadrature (rule of
// exactness 2d+2). Requires spec.has_exact.
ErrorReport error_norms(const SplineSpace& space, const SplineFunction& u,
                        const ProblemSpec& spec);

// Full H1 distance sqrt(|a-b|_L2^2 + |a-b|_H1^2) between two splines on the
// same space, via the mass and Laplace matrices.
double h1_distance(const SplineFunction& a, const SplineFunction& b);

struct StudyConfig {
  IterateConfig iterate;
  int degree = 5;
  int levels = 3;
  std::vector<double> nu_schedule;  // optional per-level nu (overrides iterate.nu)
};

struct StudyRow {
  ErrorReport report;
  bool failed = false;
  std::string message;  // failure reason when failed
};

// Solves the problem on a sequence of uniformly refined meshes and fills
// error reports and log2 rates. A failing level is recorded and the study
// continues. Problems without an exact solution get NaN error columns.
std::vector<StudyRow> convergence_study(const ProblemSpec& spec, const StudyConfig& cfg);

// CSV with header h,dof,n_it,l2,rate_l2,h1,rate_h1,h2,rate_h2,time_s; floats
// in scientific notation with 6 significant digits, undefined values as nan.
void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows);

} // namespace ma
