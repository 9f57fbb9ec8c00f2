#include "ma/linalg.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "ma/errors.hpp"

namespace ma {

namespace {

double max_abs(const SpMat& m) {
  double v = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

} // namespace

// The K block is equilibrated to unit magnitude before factoring (c stays in
// original units; the multiplier is rescaled on output). Without this, a step
// matrix like nu*K_lap with huge nu would force the multiplier-block
// regularization far above the Schur complement's scale and stall refinement.
struct KktSolver::Impl {
  long n = 0, m = 0;
  SpMat A;      // exact scaled KKT matrix, used for refinement residuals
  SpMat R, Rt;
  SpMat mult_identity;  // identity on the multiplier block, for regularization
  double kscale = 1.0;
  Eigen::SparseLU<SpMat> lu;
  bool analyzed = false;
  long pattern_nnz = -1;

  Impl(const SpMat& K_, const SpMat& R_) : n(K_.rows()), m(R_.rows()), R(R_) {
    if (K_.rows() != K_.cols()) throw SolveError("KKT: K must be square");
    if (R.cols() != K_.cols()) throw SolveError("KKT: R column count must match K");
    Rt = R.transpose();
    std::vector<Triplet> st;
    st.reserve(m);
    for (long i = 0; i < m; ++i) st.emplace_back(n + i, n + i, 1.0);
    mult_identity.resize(n + m, n + m);
    mult_identity.setFromTriplets(st.begin(), st.end());
    assemble(K_);
    factor();
  }

  void assemble(const SpMat& K_) {
    kscale = std::max(1.0, max_abs(K_));
    std::vector<Triplet> trip;
    trip.reserve(K_.nonZeros() + 2 * R.nonZeros());
    for (int k = 0; k < K_.outerSize(); ++k)
      for (SpMat::InnerIterator it(K_, k); it; ++it)
        trip.emplace_back(it.row(), it.col(), it.value() / kscale);
    for (int k = 0; k < R.outerSize(); ++k)
      for (SpMat::InnerIterator it(R, k); it; ++it) {
        trip.emplace_back(n + it.row(), it.col(), it.value());
        trip.emplace_back(it.col(), n + it.row(), it.value());
      }
    A.resize(n + m, n + m);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
  }

  // Regularizes the multiplier block only; the factorized matrix stays within
  // O(eps) of A, and refinement against A removes the perturbation.  The
  // symbolic analysis is reused when the sparsity pattern has not changed
  // since the previous factorization.
  void factor() {
    double eps = 1e-10;
    for (int attempt = 0; attempt < 3; ++attempt) {
      SpMat Aeps = A - eps * mult_identity;
      Aeps.makeCompressed();
      if (!analyzed || Aeps.nonZeros() != pattern_nnz) {
        lu.analyzePattern(Aeps);
        pattern_nnz = Aeps.nonZeros();
        analyzed = true;
      }
      lu.factorize(Aeps);
      if (lu.info() == Eigen::Success) return;
      analyzed = false;  // retry from a fresh symbolic analysis
      eps *= 1e3;
    }
    analyzed = false;
    throw SolveError(
        "KKT factorization failed: step matrix may have lost coercivity on the "
        "constrained space; consider the augmented-Lagrangian solver");
  }

  void update_matrix(const SpMat& Knew) {
    if (Knew.rows() != n || Knew.cols() != n)
      throw SolveError("KKT: updated matrix must match the original size");
    assemble(Knew);
    factor();
  }

  VecX solve(const VecX& F, const VecX& G, VecX* lambda) const {
    VecX b(n + m);
    b.head(n) = F / kscale;
    b.tail(m) = G;
    VecX x = lu.solve(b);
    const double bscale = 1.0 + b.norm();
    VecX best = x;
    double best_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 20; ++it) {
      const VecX r = b - A * x;
      const double rn = r.norm();
      if (rn < best_res) {
        best_res = rn;
        best = x;
      }
      if (rn <= 1e-13 * bscale) break;
      x += lu.solve(r);
    }
    x = best;

    const VecX c = x.head(n);
    const VecX lam = x.tail(m);
    // Contracts in scaled units for the stationarity block (the equation's
    // natural scale) and in original units for the constraint block.
    const VecX r1v = (A * x - b).head(n);
    const double r1 = r1v.norm();
    const double r2 = (R * c - G).norm();
    if (r1 > 1e-10 * (1.0 + b.head(n).norm()) || r2 > 1e-10 * (1.0 + G.norm()))
      throw SolveError(
          "KKT solve failed the residual check (|Kc+R'l-F|=" + std::to_string(r1) +
          ", |Rc-G|=" + std::to_string(r2) +
          "): step matrix may have lost coercivity on the constrained space; "
          "consider the augmented-Lagrangian solver");
    if (lambda) *lambda = VecX(kscale * lam);
    return c;
  }
};

KktSolver::KktSolver(const SpMat& K, const SpMat& R) : impl_(std::make_shared<Impl>(K, R)) {}

VecX KktSolver::solve(const VecX& F, const VecX& G, VecX* lambda) const {
  return impl_->solve(F, G, lambda);
}

void KktSolver::update_matrix(const SpMat& K) { impl_->update_matrix(K); }

SaddleSolution solve_kkt(const SaddleProblem& p) {
  KktSolver solver(p.K, p.R);
  SaddleSolution sol;
  sol.c = solver.solve(p.F, p.G, &sol.lambda);
  sol.iterations = 1;
  return sol;
}

SaddleSolution solve_augmented_lagrangian(const SaddleProblem& p, const ALConfig& cfg) {
  if (cfg.mu <= 0) throw SolveError("augmented Lagrangian: mu must be positive");
  const double inv_mu = 1.0 / cfg.mu;
  const SpMat Rt = p.R.transpose();
  SpMat A = p.K + SpMat(inv_mu * (Rt * p.R));
  A.makeCompressed();
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw SolveError(
        "augmented Lagrangian: factorization of K + mu^{-1} R^T R failed "
        "(matrix not positive definite on the constrained space)");

  SaddleSolution sol;
  sol.lambda = VecX::Zero(p.R.rows());
  const VecX rhs_g = inv_mu * (Rt * p.G);
  const double gscale = 1.0 + p.G.norm();
  for (int l = 0; l < cfg.max_outer; ++l) {
    sol.c = ldlt.solve(p.F - Rt * sol.lambda + rhs_g);
    const VecX viol = p.R * sol.c - p.G;
    sol.lambda += inv_mu * viol;
    sol.constraint_residuals.push_back(viol.norm());
    sol.iterations = l + 1;
    if (viol.norm() <= cfg.tol * gscale) return sol;
  }
  throw SolveError("augmented Lagrangian did not reach |Rc-G| <= " +
                   std::to_string(cfg.tol) + " within " + std::to_string(cfg.max_outer) +
                   " iterations (last residual " +
                   std::to_string(sol.constraint_residuals.back()) + ")");
}

struct ConstraintProjector::Impl {
  SpMat R, Rt;
  Eigen::SimplicialLDLT<SpMat> ldlt;

  explicit Impl(const SpMat& R_) : R(R_), Rt(R_.transpose()) {
    SpMat N = R * Rt;
    const double eps = 1e-12 * std::max(1.0, max_abs(N));
    SpMat shift(N.rows(), N.cols());
    shift.setIdentity();
    N += SpMat(eps * shift);
    N.makeCompressed();
    ldlt.compute(N);
    if (ldlt.info() != Eigen::Success)
      throw SolveError("constraint projector: factorization of R R^T failed");
  }

  VecX project(const VecX& r) const {
    const VecX rr = R * r;
    VecX y = ldlt.solve(rr);
    for (int it = 0; it < 3; ++it) y += ldlt.solve(rr - R * (Rt * y));
    return r - Rt * y;
  }
};

ConstraintProjector::ConstraintProjector(const SpMat& R) : impl_(std::make_shared<Impl>(R)) {}

VecX ConstraintProjector::project(const VecX& r) const { return impl_->project(r); }

} // namespace ma
