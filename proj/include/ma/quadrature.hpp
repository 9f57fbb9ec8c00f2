#pragma once

#include <vector>

#include "ma/types.hpp"

namespace ma {

// Barycentric coordinates of a point in a triangle: nonnegative, summing to 1.
struct BarycentricPoint {
  double b1 = 0, b2 = 0, b3 = 0;
};

// Validates b1+b2+b3 == 1 (1e-14) and b_i >= -1e-14; throws Error otherwise.
BarycentricPoint make_barycentric(double b1, double b2, double b3);

// Quadrature rule on the reference triangle in barycentric form. Weights sum
// to 1; a physical integral is area(T) * sum_i w_i f(p_i). The rule is
// invariant under cyclic relabeling of the triangle vertices.
struct QuadratureRule {
  int exactness_degree = 0;
  std::vector<BarycentricPoint> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

// Rule integrating all polynomials of total degree <= degree exactly.
// degree 1 is the one-point centroid rule. Supported range: 1..20.
const QuadratureRule& quadrature_for(int degree);

// Gauss-Legendre nodes/weights on [0,1]; exact for degree <= 2n-1. Exposed for
// the 1D boundary-trace interpolation tests.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace ma
