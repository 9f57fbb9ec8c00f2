#include "ma/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ma/errors.hpp"

namespace ma {

BarycentricPoint make_barycentric(double b1, double b2, double b3) {
  if (std::abs(b1 + b2 + b3 - 1.0) > 1e-14)
    throw Error("barycentric coordinates must sum to 1");
  if (b1 < -1e-14 || b2 < -1e-14 || b3 < -1e-14)
    throw Error("barycentric coordinates must be nonnegative");
  return {b1, b2, b3};
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error("gauss_legendre_01: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on P_n over [-1,1], then map to [0,1]. Symmetric pairs
  // are generated from the lower half.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (1.0 - x);          // x near +1 maps to the low end; order is irrelevant
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = weights[n - 1 - i] = 0.5 * w;
  }
}

namespace {

// Conical-product rule: x = xi, y = eta*(1-xi) maps [0,1]^2 onto the reference
// triangle with Jacobian (1-xi). Using Gauss-Legendre in both directions and
// folding (1-xi) into the weight needs one extra point in xi. The product rule
// is then symmetrized over the three cyclic vertex relabelings.
QuadratureRule make_rule(int degree) {
  QuadratureRule rule;
  rule.exactness_degree = degree;
  if (degree <= 1) {
    rule.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    rule.weights.push_back(1.0);
    return rule;
  }
  const int n_eta = degree / 2 + 1;        // integrand degree <= degree in eta
  const int n_xi = (degree + 1) / 2 + 1;   // degree+1 in xi after the Jacobian
  std::vector<double> xn, xw, en, ew;
  gauss_legendre_01(n_xi, xn, xw);
  gauss_legendre_01(n_eta, en, ew);
  for (int i = 0; i < n_xi; ++i) {
    for (int j = 0; j < n_eta; ++j) {
      const double x = xn[i];
      const double y = en[j] * (1.0 - xn[i]);
      // Normalized so weights sum to 1 over the triangle (factor 2 = 1/area).
      const double w = 2.0 * xw[i] * ew[j] * (1.0 - xn[i]);
      const double b2 = x, b3 = y, b1 = 1.0 - x - y;
      rule.points.push_back({b1, b2, b3});
      rule.weights.push_back(w / 3.0);
      rule.points.push_back({b2, b3, b1});
      rule.weights.push_back(w / 3.0);
      rule.points.push_back({b3, b1, b2});
      rule.weights.push_back(w / 3.0);
    }
  }
  return rule;
}

} // namespace

const QuadratureRule& quadrature_for(int degree) {
  if (degree < 1 || degree > 20)
    throw Error("quadrature_for: unsupported exactness degree " + std::to_string(degree) +
                " (supported range 1..20)");
  static std::map<int, QuadratureRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make_rule(degree)).first;
  return it->second;
}

} // namespace ma
