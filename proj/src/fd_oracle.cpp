#include "ma/fd_oracle.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "ma/errors.hpp"

namespace ma {

namespace {

// Negative 5-point Laplacian on interior nodes of an (n+1)^2 grid, scaled by
// h^-2; interior nodes are indexed row-major, (i,j) -> (j-1)*(n-1)+(i-1).
SpMat interior_neg_laplacian(int n, double h) {
  const int m = n - 1;
  const double s = 1.0 / (h * h);
  std::vector<Triplet> trips;
  trips.reserve((size_t)m * m * 5);
  auto id = [m](int i, int j) { return (j - 1) * m + (i - 1); };
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) {
      const int row = id(i, j);
      trips.emplace_back(row, row, 4.0 * s);
      if (i > 1) trips.emplace_back(row, id(i - 1, j), -s);
      if (i < n - 1) trips.emplace_back(row, id(i + 1, j), -s);
      if (j > 1) trips.emplace_back(row, id(i, j - 1), -s);
      if (j < n - 1) trips.emplace_back(row, id(i, j + 1), -s);
    }
  SpMat A(m * m, m * m);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

// Right-hand side correction moving known boundary values of u to the RHS of
// (-Lap_h) u = rhs restricted to interior nodes.
void add_boundary_terms(int n, double h, const std::vector<double>& u, VecX& rhs) {
  const int m = n - 1;
  const double s = 1.0 / (h * h);
  auto val = [&](int i, int j) { return u[(size_t)j * (n + 1) + i]; };
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) {
      const int row = (j - 1) * m + (i - 1);
      if (i == 1) rhs[row] += s * val(0, j);
      if (i == n - 1) rhs[row] += s * val(n, j);
      if (j == 1) rhs[row] += s * val(i, 0);
      if (j == n - 1) rhs[row] += s * val(i, n);
    }
}

// Central-difference Hessian determinant at interior node (i,j).
double det_h(const FdSolution& grid, int i, int j) {
  const double h = grid.h;
  const double uxx =
      (grid.value(i + 1, j) - 2.0 * grid.value(i, j) + grid.value(i - 1, j)) / (h * h);
  const double uyy =
      (grid.value(i, j + 1) - 2.0 * grid.value(i, j) + grid.value(i, j - 1)) / (h * h);
  const double uxy = (grid.value(i + 1, j + 1) - grid.value(i + 1, j - 1) -
                      grid.value(i - 1, j + 1) + grid.value(i - 1, j - 1)) /
                     (4.0 * h * h);
  return uxx * uyy - uxy * uxy;
}

} // namespace

FdSolution fd_solve(const ScalarField& f, const ScalarField& g, const FdConfig& cfg,
                    const std::vector<double>* init) {
  if (cfg.n < 2) throw Error("fd_solve: need at least 2 cells per side");
  if (cfg.nu <= 0) throw Error("fd_solve: nu must be positive");
  const int n = cfg.n;
  const int m = n - 1;
  FdSolution grid;
  grid.n = n;
  grid.h = 1.0 / n;
  grid.u.assign((size_t)(n + 1) * (n + 1), 0.0);

  auto point = [&](int i, int j) { return Vec2(i * grid.h, j * grid.h); };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (i == 0 || i == n || j == 0 || j == n)
        grid.u[(size_t)j * (n + 1) + i] = g(point(i, j));

  SpMat A = interior_neg_laplacian(n, grid.h);
  Eigen::SimplicialLDLT<SpMat> fact(A);
  if (fact.info() != Eigen::Success)
    throw SolveError("fd_solve: grid Laplacian factorization failed");

  if (init) {
    if (init->size() != grid.u.size())
      throw Error("fd_solve: initial guess has wrong grid size");
    std::vector<double> u0 = *init;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        if (i == 0 || i == n || j == 0 || j == n)
          u0[(size_t)j * (n + 1) + i] = grid.u[(size_t)j * (n + 1) + i];
    grid.u = std::move(u0);
  } else {
    // Poisson start: -Lap_h u0 = -2 sqrt(max(f,0)), u0 = g on the boundary.
    VecX rhs(m * m);
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        rhs[(j - 1) * m + (i - 1)] = -2.0 * std::sqrt(std::max(f(point(i, j)), 0.0));
    add_boundary_terms(n, grid.h, grid.u, rhs);
    const VecX u0 = fact.solve(rhs);
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        grid.u[(size_t)j * (n + 1) + i] = u0[(j - 1) * m + (i - 1)];
  }

  VecX fv(m * m);
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) fv[(j - 1) * m + (i - 1)] = f(point(i, j));

  for (int k = 0; k < cfg.max_iter; ++k) {
    VecX res(m * m);
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        res[(j - 1) * m + (i - 1)] = det_h(grid, i, j) - fv[(j - 1) * m + (i - 1)];
    const VecX theta = fact.solve(res) / cfg.nu;
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        grid.u[(size_t)j * (n + 1) + i] += theta[(j - 1) * m + (i - 1)];
    grid.iterations = k + 1;
    if (theta.lpNorm<Eigen::Infinity>() < cfg.tol) {
      grid.converged = true;
      break;
    }
  }
  if (!grid.converged)
    throw SolveError("fd_solve: no convergence in " + std::to_string(cfg.max_iter) +
                     " iterations");
  return grid;
}

double fd_max_error(const FdSolution& sol, const ScalarField& exact) {
  double e = 0;
  for (int j = 0; j <= sol.n; ++j)
    for (int i = 0; i <= sol.n; ++i)
      e = std::max(e, std::abs(sol.value(i, j) - exact(Vec2(i * sol.h, j * sol.h))));
  return e;
}

double fd_compare_to_spline(const FdSolution& sol, const SplineFunction& u) {
  double e = 0;
  for (int j = 1; j < sol.n; ++j)
    for (int i = 1; i < sol.n; ++i)
      e = std::max(e, std::abs(sol.value(i, j) - u.eval(Vec2(i * sol.h, j * sol.h))));
  return e;
}

} // namespace ma
