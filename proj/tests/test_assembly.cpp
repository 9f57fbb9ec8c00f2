#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ma/assembly.hpp"
#include "ma/linalg.hpp"
#include "ma/spline_space.hpp"

using namespace ma;
using ma::testing::dense_nullspace;
using ma::testing::project_to_nullspace;
using ma::testing::random_vector;

namespace {

// Both sides of the divergence-form identity for spline v against the basis
// function load; contracted with a test coefficient vector by the caller.
VecX det_load(const SplineSpace& space, const SplineFunction& v) {
  const auto& rule = space.form_rule();
  const auto& tab = space.form_table();
  VecX out = VecX::Zero(space.dof());
  for (int t = 0; t < space.mesh().nt(); ++t) {
    const TriGeometry& g = space.geometry(t);
    const double* c = v.local(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * g.area;
      const Mat2 h = tab.hessian(c, q, g);
      const double det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
      for (int a = 0; a < space.nb(); ++a)
        out[space.coeff_offset(t) + a] += w * det * tab.vals(q, a);
    }
  }
  return out;
}

SplineFunction from_coeffs(const SplineSpace& space, VecX c) {
  SplineFunction u;
  u.space = &space;
  u.coeffs = std::move(c);
  return u;
}

} // namespace

TEST_SUITE("assembly") {

TEST_CASE("cofactor identities on random symmetric matrices") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Mat2 sample;
  sample << 2.0, -0.5, -0.5, 3.0;
  const Mat2 cs = cofactor2(sample);
  CHECK(cs(0, 0) == 3.0);
  CHECK(cs(0, 1) == 0.5);
  CHECK(cs(1, 0) == 0.5);
  CHECK(cs(1, 1) == 2.0);
  for (int k = 0; k < 1000; ++k) {
    Mat2 h;
    const double a = unif(rng), b = unif(rng), c = unif(rng);
    h << a, b, b, c;
    const Mat2 cof = cofactor2(h);
    const double det = h.determinant();
    // det A = (1/2) cof A : A
    CHECK(std::abs(0.5 * cof.cwiseProduct(h).sum() - det) <= 1e-13);
    // A cof(A) = det(A) I
    CHECK((h * cof - det * Mat2::Identity()).norm() <= 1e-13);
  }
}

TEST_CASE("quadratic iterate: cofactor stiffness equals the Laplace matrix") {
  SplineSpace space(build_square_mesh(2), 3);
  const SplineFunction v =
      interpolate_local(space, [](const Vec2& p) { return 0.5 * p.squaredNorm(); });
  const SpMat kcof = assemble_cof_stiffness(space, v);
  auto [lap, mass] = assemble_laplace_and_mass(space);
  CHECK((MatX(kcof) - MatX(lap)).norm() <= 1e-12 * MatX(lap).norm());
  CHECK(mass.rows() == space.dof());
}

TEST_CASE("mass and load agree on the partition of unity") {
  SplineSpace space(build_square_mesh(3), 4);
  auto [lap, mass] = assemble_laplace_and_mass(space);
  const VecX load = assemble_load(space, [](const Vec2&) { return 1.0; });
  CHECK(load.sum() == doctest::Approx(1.0).epsilon(1e-13));  // total area
  const VecX ones = VecX::Ones(space.dof());
  CHECK((mass * ones - load).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK((lap * ones).lpNorm<Eigen::Infinity>() <= 1e-12);  // constants in kernel
  // Symmetry and positivity.
  CHECK((MatX(mass) - MatX(mass).transpose()).norm() <= 1e-14);
  const VecX x = random_vector(space.dof(), 3);
  CHECK(x.dot(mass * x) > 0);
  CHECK(x.dot(lap * x) >= -1e-12);
}

TEST_CASE("residual of the quadratic solution vanishes on the test space") {
  // v = (x^2+y^2)/2 solves det D^2 v = 1; the divergence-form residual against
  // constrained (conforming, zero-trace) test functions must vanish.
  SplineSpace space(build_square_mesh(2), 3);
  const SplineFunction v =
      interpolate_local(space, [](const Vec2& p) { return 0.5 * p.squaredNorm(); });
  const VecX r = assemble_residual(space, v, [](const Vec2&) { return 1.0; });
  const ConstraintProjector projector(space.homogeneous_constraints().rows);
  CHECK(projector.norm(r) <= 1e-10 * (1 + r.norm()));
  CHECK(r.norm() > 1e-3);  // raw vector carries boundary flux: projection matters
}

TEST_CASE("divergence-form identity, exactly conforming random splines") {
  for (int d : {4, 5}) {
    SplineSpace space(build_square_mesh(2), d);
    const MatX smooth_null = dense_nullspace(space.smoothness_constraints());
    const MatX test_null = dense_nullspace(space.homogeneous_constraints().rows);
    for (int trial = 0; trial < 5; ++trial) {
      const SplineFunction v = from_coeffs(
          space, project_to_nullspace(smooth_null, random_vector(space.dof(), 7 * d + trial)));
      const VecX phi =
          project_to_nullspace(test_null, random_vector(space.dof(), 90 + 7 * d + trial));
      // LHS int det(D^2 v) phi; RHS is the f = 0 residual contracted with phi,
      // which is -(1/2) int cof(D^2 v) Dv . Dphi.
      const double lhs = det_load(space, v).dot(phi);
      const double rhs =
          assemble_residual(space, v, [](const Vec2&) { return 0.0; }).dot(phi);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + std::abs(rhs) + 1e-6));
    }
  }
}

TEST_CASE("residual directional derivative equals the negated cofactor stiffness") {
  SplineSpace space(build_square_mesh(2), 4);
  const auto f = [](const Vec2& p) { return 1.0 + 0.5 * p.x(); };
  const MatX smooth_null = dense_nullspace(space.smoothness_constraints());
  const ConstraintProjector projector(space.homogeneous_constraints().rows);
  const SplineFunction v = from_coeffs(
      space, project_to_nullspace(smooth_null, random_vector(space.dof(), 17)));
  for (int trial = 0; trial < 3; ++trial) {
    const VecX w = project_to_nullspace(smooth_null, random_vector(space.dof(), 50 + trial));
    const double eps = 1e-5;
    const SplineFunction vp = from_coeffs(space, v.coeffs + eps * w);
    const SplineFunction vm = from_coeffs(space, v.coeffs - eps * w);
    const VecX fd = (assemble_residual(space, vp, f) - assemble_residual(space, vm, f)) /
                    (2 * eps);
    const VecX jac = -(assemble_cof_stiffness(space, v) * w);
    const VecX dp = projector.project(fd), dj = projector.project(jac);
    CHECK((dp - dj).norm() <= 1e-5 * (1 + dj.norm()));
  }
}

TEST_CASE("threaded assembly is bitwise deterministic") {
  SplineSpace space(build_square_mesh(2), 4);
  const MatX smooth_null = dense_nullspace(space.smoothness_constraints());
  const SplineFunction v = from_coeffs(
      space, project_to_nullspace(smooth_null, random_vector(space.dof(), 5)));
  const auto f = [](const Vec2& p) { return 1.0 + p.y(); };
  const VecX r1 = assemble_residual(space, v, f, 1);
  const VecX r3 = assemble_residual(space, v, f, 3);
  CHECK(r1 == r3);
  const SpMat k1 = assemble_cof_stiffness(space, v, 1);
  const SpMat k3 = assemble_cof_stiffness(space, v, 3);
  CHECK((MatX(k1) - MatX(k3)).lpNorm<Eigen::Infinity>() == 0.0);
  const VecX l1 = assemble_load(space, f, 1);
  const VecX l4 = assemble_load(space, f, 4);
  CHECK(l1 == l4);
}

TEST_CASE("cofactor stiffness is symmetric") {
  SplineSpace space(build_square_mesh(2), 3);
  const SplineFunction v = interpolate_local(space, [](const Vec2& p) {
    return std::exp(0.5 * p.squaredNorm());
  });
  const SpMat k = assemble_cof_stiffness(space, v);
  CHECK((MatX(k) - MatX(k).transpose()).lpNorm<Eigen::Infinity>() <= 1e-13);
}

} // TEST_SUITE
