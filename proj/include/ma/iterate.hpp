#pragma once

#include <utility>
#include <vector>

#include "ma/errors.hpp"
#include "ma/linalg.hpp"
#include "ma/spline_space.hpp"
#include "ma/types.hpp"

namespace ma {

// All methods solve the same discrete problem: find a conforming spline u with
// the given boundary rows whose divergence-form residual vanishes against the
// constrained test space. They differ only in the step matrix:
//   newton        K_cof(u_k)                (nu = 0)
//   ptc_laplace   nu*K_lap + K_cof(u_k)     (nu > 0)
//   ptc_identity  nu*M     + K_cof(u_k)     (nu > 0)
//   march_laplace nu*K_lap                  (nu > 0, constant: factored once)
//   march_mass    nu*M                      (nu > 0, constant: factored once)
// Each step solves K_step theta = r(u_k) under the homogeneous constraints and
// updates u_{k+1} = u_k + theta, so boundary rows hold exactly at every step.
enum class Method { newton, ptc_laplace, ptc_identity, march_laplace, march_mass };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct IterateConfig {
  Method method = Method::newton;
  double nu = 0.0;       // must be 0 for newton, > 0 otherwise
  double tol = 1e-10;    // on the projected residual norm
  int max_iter = 500;
  bool concave = false;  // select the concave branch (see solve())
  bool monitor = true;   // attach convexity monitors to the trace
  int threads = 1;
};

// Convexity diagnostics sampled at the assembly quadrature points.
struct ConvexityReport {
  double min_eig = 0;        // min over points of the smaller Hessian eigenvalue
  double max_eig = 0;        // max over points of the larger Hessian eigenvalue
  double min_lap = 0;        // min of the spline Laplacian (= eig1 + eig2)
  double max_lap = 0;
  double frac_negative = 0;  // fraction of points with min eigenvalue < 0
};

struct TraceRow {
  int k = 0;
  double residual = 0;       // projected residual norm at u_k
  double increment_h1 = 0;   // |u_{k+1} - u_k|_H1 (0 on the final row)
  double min_eig = 0;
  double min_lap = 0;
  double time_s = 0;         // cumulative wall time
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  double final_residual = 0;
  int iterations() const { return rows.empty() ? 0 : rows.back().k; }
};

// Both iteration failures carry the trace and the last iterate's coefficients
// (physical orientation, i.e. already negated back in concave mode) so callers
// can still inspect or export the partial solution.
struct NonConvergence : Error {
  NonConvergence(const std::string& msg, IterationTrace t, VecX coeffs = VecX())
      : Error(msg), trace(std::move(t)), last_coeffs(std::move(coeffs)) {}
  IterationTrace trace;
  VecX last_coeffs;
};

struct DivergenceDetected : Error {
  DivergenceDetected(const std::string& msg, IterationTrace t, VecX coeffs = VecX())
      : Error(msg), trace(std::move(t)), last_coeffs(std::move(coeffs)) {}
  IterationTrace trace;
  VecX last_coeffs;
};

// Poisson initial guess: Du0 . Dpsi = -2 sqrt(f) psi under the boundary rows
// for g (concave mode negates the right-hand side). Requires f >= -1e-12 at
// every quadrature point; negative values are clamped to zero under the sqrt.
SplineFunction initial_guess(const SplineSpace& space, const ScalarField& f,
                             const ScalarField& g, bool concave = false, int threads = 1);

// The linear problem of one step at iterate u (homogeneous constraint rows).
SaddleProblem step_system(const SplineSpace& space, const SplineFunction& u,
                          const ScalarField& f, double nu, Method method,
                          int threads = 1);

// Single steps (standalone; solve() caches factorizations across steps).
SplineFunction step_ptc(const SplineSpace& space, const SplineFunction& u,
                        const ScalarField& f, double nu,
                        Method variant = Method::ptc_laplace);
SplineFunction step_march(const SplineSpace& space, const SplineFunction& u,
                          const ScalarField& f, double nu,
                          Method variant = Method::march_laplace);

ConvexityReport convexity_monitor(const SplineSpace& space, const SplineFunction& v);

// Full iteration from the Poisson initial guess. Stops when the projected
// residual falls below tol; throws NonConvergence after max_iter and
// DivergenceDetected if the residual grows 1e3x above its running minimum
// (both carry the trace). The concave branch solves for w = -u (boundary data
// -g, standard orientation) and returns u = -w; trace monitor columns are
// reported for the physical iterate u.
std::pair<SplineFunction, IterationTrace> solve(const SplineSpace& space,
                                                const ScalarField& f,
                                                const ScalarField& g,
                                                const IterateConfig& cfg);

} // namespace ma
