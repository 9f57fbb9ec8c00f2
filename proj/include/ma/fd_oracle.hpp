#pragma once

#include <optional>
#include <vector>

#include "ma/spline_space.hpp"
#include "ma/types.hpp"

namespace ma {

// Independent finite-difference solver for det D^2 u = f, u = g on the unit
// square, used to cross-check the spline solver. Uniform (N+1)x(N+1) grid,
// central differences for the Hessian entries, and the time-marching update
//   nu * (-Lap_h) theta = det_h(u_k) - f,   u_{k+1} = u_k + theta
// with boundary values pinned to g. Shares no code with the spline path.
struct FdConfig {
  int n = 32;            // grid cells per side (spacing 1/n)
  double nu = 50.0;
  double tol = 1e-10;    // max-norm of the update theta
  int max_iter = 20000;
};

struct FdSolution {
  int n = 0;
  double h = 0;
  std::vector<double> u;  // row-major (N+1)x(N+1), u[j*(N+1)+i] at (i*h, j*h)
  int iterations = 0;
  bool converged = false;
  double value(int i, int j) const { return u[(size_t)j * (n + 1) + i]; }
};

// Solves on the unit square. The initial guess solves the Poisson problem
// -Lap_h u0 = -2 sqrt(max(f,0)) with u0 = g on the boundary, unless an
// explicit full-grid initial guess is supplied.
FdSolution fd_solve(const ScalarField& f, const ScalarField& g, const FdConfig& cfg,
                    const std::vector<double>* init = nullptr);

// Max-norm error against a reference function at all grid points.
double fd_max_error(const FdSolution& sol, const ScalarField& exact);

// Max-norm difference against a spline at the interior grid points.
double fd_compare_to_spline(const FdSolution& sol, const SplineFunction& u);

} // namespace ma
