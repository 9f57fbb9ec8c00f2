#pragma once

#include "ma/spline_space.hpp"
#include "ma/types.hpp"

namespace ma {

// Cofactor matrix of a 2x2 matrix: cof([[a,b],[c,d]]) = [[d,-c],[-b,a]].
// For symmetric H, H * cof(H) = det(H) * I and cof preserves eigenvectors
// while swapping eigenvalues.
inline Mat2 cofactor2(const Mat2& h) {
  Mat2 c;
  c << h(1, 1), -h(1, 0), -h(0, 1), h(0, 0);
  return c;
}

// Nonlinear residual in divergence form,
//   r_j = -(1/2) \int (cof D^2 v) Dv . Dphi_j - \int f phi_j,
// which equals \int (det D^2 v - f) phi_j against interior test functions.
VecX assemble_residual(const SplineSpace& space, const SplineFunction& v,
                       const ScalarField& f, int threads = 1);

// Linearized stiffness K_cof(v)_{jl} = \int (cof D^2 v) Dphi_l . Dphi_j;
// symmetric, and positive semidefinite wherever D^2 v is positive definite.
SpMat assemble_cof_stiffness(const SplineSpace& space, const SplineFunction& v,
                             int threads = 1);

// Laplace stiffness \int Dphi_i . Dphi_j and mass \int phi_i phi_j; both exact
// for the space's quadrature rule.
std::pair<SpMat, SpMat> assemble_laplace_and_mass(const SplineSpace& space,
                                                  int threads = 1);

// Load vector \int f phi_j with the form rule.
VecX assemble_load(const SplineSpace& space, const ScalarField& f, int threads = 1);

} // namespace ma
