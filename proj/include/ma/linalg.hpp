#pragma once

#include <memory>
#include <vector>

#include "ma/types.hpp"

namespace ma {

// Constrained linear problem: minimize (1/2) c^T K c - F^T c over R c = G,
// i.e. the KKT system [[K, R^T], [R, 0]] [c; lambda] = [F; G]. Constraint rows
// may be linearly dependent as long as G is consistent (the spline smoothness
// rows around interior vertices always carry structural dependencies).
struct SaddleProblem {
  SpMat K;
  VecX F;
  SpMat R;
  VecX G;
};

struct SaddleSolution {
  VecX c;
  VecX lambda;
  int iterations = 0;
  // Constraint residual |R c - G| per outer iteration (augmented Lagrangian).
  std::vector<double> constraint_residuals;
};

// Direct solver: sparse LU of the KKT matrix with a tiny -eps*I regularization
// of the multiplier block (which makes dependent constraint rows harmless),
// plus iterative refinement against the unregularized system. The returned
// solution satisfies |K c + R^T lambda - F| <= 1e-10 (1 + |F|) and
// |R c - G| <= 1e-10 (1 + |G|); a SolveError reporting possible loss of
// coercivity (and advising the augmented-Lagrangian fallback) is thrown
// otherwise.
class KktSolver {
 public:
  KktSolver(const SpMat& K, const SpMat& R);
  VecX solve(const VecX& F, const VecX& G, VecX* lambda = nullptr) const;
  // Re-factorizes with a new K against the same constraint rows, reusing the
  // symbolic analysis when the sparsity pattern is unchanged (the common case
  // for a sequence of linearized step matrices on one space).
  void update_matrix(const SpMat& K);

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

SaddleSolution solve_kkt(const SaddleProblem& p);

struct ALConfig {
  double mu = 1e-6;      // penalty parameter
  double tol = 1e-12;    // stop when |R c - G| <= tol * (1 + |G|)
  int max_outer = 200;
};

// Augmented-Lagrangian iteration with a fixed SPD factorization of
// K + mu^{-1} R^T R:
//   (K + mu^{-1} R^T R) c = F - R^T lambda + mu^{-1} R^T G,
//   lambda <- lambda + mu^{-1} (R c - G).
// Throws SolveError on factorization failure or non-convergence.
SaddleSolution solve_augmented_lagrangian(const SaddleProblem& p, const ALConfig& cfg = {});

// Euclidean projection onto ker(R): project(r) = r - R^T y with y the least-
// squares multiplier. Used for the constrained residual norm.
class ConstraintProjector {
 public:
  explicit ConstraintProjector(const SpMat& R);
  VecX project(const VecX& r) const;
  double norm(const VecX& r) const { return project(r).norm(); }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

} // namespace ma
