#pragma once

#include <random>

#include <Eigen/Dense>

#include "ma/types.hpp"

namespace ma::testing {

inline VecX random_vector(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  VecX v(n);
  for (long i = 0; i < n; ++i) v[i] = unif(rng);
  return v;
}

// Exact (dense SVD) orthogonal projection onto ker(R); independent oracle for
// the sparse constraint machinery. Only suitable for small test spaces.
inline MatX dense_nullspace(const SpMat& R) {
  const MatX Rd = MatX(R);
  Eigen::BDCSVD<MatX> svd(Rd, Eigen::ComputeFullV);
  const double tol = 1e-10 * std::max(1.0, svd.singularValues().size() > 0
                                               ? svd.singularValues()[0]
                                               : 0.0);
  long rank = 0;
  for (long i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  return svd.matrixV().rightCols(Rd.cols() - rank);
}

inline VecX project_to_nullspace(const MatX& null_basis, const VecX& c) {
  return null_basis * (null_basis.transpose() * c);
}

inline long dense_rank(const SpMat& R) {
  const MatX Rd = MatX(R);
  Eigen::BDCSVD<MatX> svd(Rd);
  const double tol = 1e-10 * std::max(1.0, svd.singularValues()[0]);
  long rank = 0;
  for (long i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  return rank;
}

} // namespace ma::testing
