#include "ma/spline_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "ma/assembly.hpp"
#include "ma/errors.hpp"
#include "ma/linalg.hpp"

namespace ma {

namespace {

// Storage index of the coefficient with exponent i on local vertex `la`,
// j on `lp`, k on `lq` (a permutation of {0,1,2}).
int coeff_at(int d, int la, int lp, int lq, int i, int j, int k) {
  int a[3];
  a[la] = i;
  a[lp] = j;
  a[lq] = k;
  (void)d;
  return bform_index(d, a[0], a[1]);
}

int local_vertex(const std::array<int, 3>& tri, int v) {
  for (int k = 0; k < 3; ++k)
    if (tri[k] == v) return k;
  throw Error("vertex not in triangle");
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

} // namespace

SplineSpace::SplineSpace(Triangulation mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree), nb_(basis_count(degree)) {
  if (degree_ < 1) throw Error("SplineSpace: degree must be >= 1");
  if (mesh_.nt() == 0) throw Error("SplineSpace: empty mesh");
  if (mesh_.edges.empty())
    throw Error("SplineSpace: mesh has no edge data (was finalize() run?)");
  geoms_.reserve(mesh_.nt());
  for (int t = 0; t < mesh_.nt(); ++t) geoms_.push_back(TriGeometry::from(mesh_, t));

  const int d = degree_;
  form_rule_ = &quadrature_for(std::max({2, 3 * d - 4, 2 * d}));
  norm_rule_ = &quadrature_for(std::min(20, 2 * d + 2));
  form_table_ = BernsteinTable::build(d, form_rule_->points);
  norm_table_ = BernsteinTable::build(d, norm_rule_->points);

  // Trace interpolation matrix on one edge: A(r,m) = B^d_m(r/d) with the
  // univariate Bernstein basis; identical for every edge.
  MatX A(d + 1, d + 1);
  for (int r = 0; r <= d; ++r) {
    const double s = double(r) / d;
    for (int m = 0; m <= d; ++m)
      A(r, m) = binomial(d, m) * std::pow(1.0 - s, d - m) * std::pow(s, m);
  }
  edge_interp_.compute(A);

  build_smoothness();
}

void SplineSpace::build_smoothness() {
  const int d = degree_;
  std::vector<Triplet> trip;
  long row = 0;

  // Vertex coefficient equalities: star against the first incident triangle.
  std::vector<std::vector<std::pair<long, int>>> at_vertex(mesh_.nv());
  for (int t = 0; t < mesh_.nt(); ++t)
    for (int k = 0; k < 3; ++k) {
      int a[3] = {0, 0, 0};
      a[k] = d;
      at_vertex[mesh_.triangles[t][k]].push_back(
          {coeff_offset(t) + bform_index(d, a[0], a[1]), t});
    }
  for (int v = 0; v < mesh_.nv(); ++v) {
    auto& list = at_vertex[v];
    std::sort(list.begin(), list.end(),
              [](const auto& x, const auto& y) { return x.second < y.second; });
    for (size_t i = 1; i < list.size(); ++i) {
      trip.emplace_back(row, list[0].first, 1.0);
      trip.emplace_back(row, list[i].first, -1.0);
      ++row;
    }
  }

  for (const Edge& e : mesh_.edges) {
    if (e.on_boundary()) continue;
    const int tA = e.tri[0], tB = e.tri[1];
    const auto& TA = mesh_.triangles[tA];
    const auto& TB = mesh_.triangles[tB];
    const int lpA = local_vertex(TA, e.a), lqA = local_vertex(TA, e.b);
    const int lpB = local_vertex(TB, e.a), lqB = local_vertex(TB, e.b);
    const int laA = 3 - lpA - lqA, laB = 3 - lpB - lqB;

    // C0 on edge-interior coefficients (vertex copies are handled above).
    for (int j = d - 1; j >= 1; --j) {
      const int k = d - j;
      trip.emplace_back(row, coeff_offset(tA) + coeff_at(d, laA, lpA, lqA, 0, j, k), 1.0);
      trip.emplace_back(row, coeff_offset(tB) + coeff_at(d, laB, lpB, lqB, 0, j, k), -1.0);
      ++row;
    }

    // C1: barycentric coordinates of tB's apex with respect to tA, permuted
    // into (apex, p, q) order of tA.
    const auto bc = geoms_[tA].barycentric(mesh_.vertices[TB[laB]]);
    const double beta_a = bc[laA], beta_p = bc[lpA], beta_q = bc[lqA];
    for (int j = d - 1; j >= 0; --j) {
      const int k = d - 1 - j;
      trip.emplace_back(row, coeff_offset(tB) + coeff_at(d, laB, lpB, lqB, 1, j, k), 1.0);
      trip.emplace_back(row, coeff_offset(tA) + coeff_at(d, laA, lpA, lqA, 1, j, k), -beta_a);
      trip.emplace_back(row, coeff_offset(tA) + coeff_at(d, laA, lpA, lqA, 0, j + 1, k), -beta_p);
      trip.emplace_back(row, coeff_offset(tA) + coeff_at(d, laA, lpA, lqA, 0, j, k + 1), -beta_q);
      ++row;
    }
  }

  smoothness_.resize(row, dof());
  smoothness_.setFromTriplets(trip.begin(), trip.end());
  smoothness_.makeCompressed();
}

// Boundary rows must be jointly consistent with the C1 rows: where two
// collinear boundary edges meet, the C1 fan forces one gradient at the vertex
// and hence a single tangential slope, so pinning each edge to its own
// interpolant (which has a slightly different endpoint slope) would make
// R c = G infeasible at O(h^d). Instead, each edge trace is determined
// Hermite-style: endpoint values of g, endpoint slopes (shared across
// collinear neighbors), and interpolation of g at the d-3 interior points.
ConstraintRows SplineSpace::boundary_constraints(const ScalarField& g) const {
  const int d = degree_;
  std::vector<Triplet> trip;
  std::vector<double> values;
  long row = 0;

  if (d <= 2) {
    // Too few edge coefficients for endpoint-slope rows; pin the plain
    // per-edge interpolant (these degenerate spaces are kept for testing).
    std::set<int> pinned_vertex;
    for (int be : mesh_.boundary_edges) {
      const Edge& e = mesh_.edges[be];
      const int t = e.tri[0];
      const auto& T = mesh_.triangles[t];
      const int lp = local_vertex(T, e.a), lq = local_vertex(T, e.b);
      const int la = 3 - lp - lq;
      const Vec2 P = mesh_.vertices[e.a], Q = mesh_.vertices[e.b];
      VecX gv(d + 1);
      for (int r = 0; r <= d; ++r) {
        const double s = double(r) / d;
        gv(r) = g((1.0 - s) * P + s * Q);
      }
      const VecX coef = edge_interp_.solve(gv);
      for (int m = 0; m <= d; ++m) {
        if (m == 0 && !pinned_vertex.insert(e.a).second) continue;
        if (m == d && !pinned_vertex.insert(e.b).second) continue;
        trip.emplace_back(row, coeff_offset(t) + coeff_at(d, la, lp, lq, 0, d - m, m),
                          1.0);
        values.push_back(coef(m));
        ++row;
      }
    }
  } else {
    struct EdgeData {
      int t, la, lp, lq;
      Vec2 P, Q;
      double len = 0;
      double away_p = 0, away_q = 0;  // interpolant slope at P resp. Q, into the edge
    };
    std::vector<EdgeData> data;
    data.reserve(mesh_.boundary_edges.size());
    std::map<int, std::vector<std::pair<int, int>>> at_vertex;  // vertex -> (slot, end)
    for (size_t s = 0; s < mesh_.boundary_edges.size(); ++s) {
      const Edge& e = mesh_.edges[mesh_.boundary_edges[s]];
      EdgeData ed;
      ed.t = e.tri[0];
      const auto& T = mesh_.triangles[ed.t];
      ed.lp = local_vertex(T, e.a);
      ed.lq = local_vertex(T, e.b);
      ed.la = 3 - ed.lp - ed.lq;
      ed.P = mesh_.vertices[e.a];
      ed.Q = mesh_.vertices[e.b];
      ed.len = (ed.Q - ed.P).norm();
      VecX gv(d + 1);
      for (int r = 0; r <= d; ++r) gv(r) = g(ed.P + (double(r) / d) * (ed.Q - ed.P));
      const VecX coef = edge_interp_.solve(gv);
      ed.away_p = d * (coef(1) - coef(0)) / ed.len;
      ed.away_q = d * (coef(d - 1) - coef(d)) / ed.len;
      at_vertex[e.a].push_back({(int)s, 0});
      at_vertex[e.b].push_back({(int)s, 1});
      data.push_back(ed);
    }

    // Share one tangential slope (the average of the two one-sided interpolant
    // slopes) at every straight boundary vertex.
    for (auto& [v, inc] : at_vertex) {
      if (inc.size() != 2) continue;
      const auto dir = [&](const std::pair<int, int>& q) -> Vec2 {
        const EdgeData& ed = data[q.first];
        return Vec2(q.second == 0 ? ed.Q - ed.P : ed.P - ed.Q).normalized();
      };
      if (dir(inc[0]).dot(dir(inc[1])) > -1.0 + 1e-12) continue;  // genuine corner
      const auto slope = [&](const std::pair<int, int>& q) -> double& {
        EdgeData& ed = data[q.first];
        return q.second == 0 ? ed.away_p : ed.away_q;
      };
      const double a = 0.5 * (slope(inc[0]) - slope(inc[1]));
      slope(inc[0]) = a;
      slope(inc[1]) = -a;
    }

    std::set<int> pinned_vertex;
    for (size_t s = 0; s < mesh_.boundary_edges.size(); ++s) {
      const Edge& e = mesh_.edges[mesh_.boundary_edges[s]];
      const EdgeData& ed = data[s];
      const auto cm = [&](int m) {
        return coeff_offset(ed.t) + coeff_at(d, ed.la, ed.lp, ed.lq, 0, d - m, m);
      };
      if (pinned_vertex.insert(e.a).second) {
        trip.emplace_back(row, cm(0), 1.0);
        values.push_back(g(ed.P));
        ++row;
      }
      if (pinned_vertex.insert(e.b).second) {
        trip.emplace_back(row, cm(d), 1.0);
        values.push_back(g(ed.Q));
        ++row;
      }
      // Endpoint slopes of the trace: d (c1 - c0) / len = away slope.
      trip.emplace_back(row, cm(1), 1.0);
      trip.emplace_back(row, cm(0), -1.0);
      values.push_back(ed.len * ed.away_p / d);
      ++row;
      trip.emplace_back(row, cm(d - 1), 1.0);
      trip.emplace_back(row, cm(d), -1.0);
      values.push_back(ed.len * ed.away_q / d);
      ++row;
      // Interpolate g at the interior equally spaced points.
      for (int r = 2; r <= d - 2; ++r) {
        const double t = double(r) / d;
        for (int m = 0; m <= d; ++m)
          trip.emplace_back(
              row, cm(m),
              binomial(d, m) * std::pow(1.0 - t, d - m) * std::pow(t, m));
        values.push_back(g(ed.P + t * (ed.Q - ed.P)));
        ++row;
      }
    }
  }

  ConstraintRows out;
  out.rows.resize(row, dof());
  out.rows.setFromTriplets(trip.begin(), trip.end());
  out.rows.makeCompressed();
  out.values = Eigen::Map<VecX>(values.data(), values.size());
  return out;
}

ConstraintRows SplineSpace::constraints(const ScalarField& g) const {
  ConstraintRows bnd = boundary_constraints(g);
  ConstraintRows out;
  const long ms = smoothness_.rows(), mb = bnd.rows.rows();
  out.rows.resize(ms + mb, dof());
  std::vector<Triplet> trip;
  trip.reserve(smoothness_.nonZeros() + bnd.rows.nonZeros());
  for (int k = 0; k < smoothness_.outerSize(); ++k)
    for (SpMat::InnerIterator it(smoothness_, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < bnd.rows.outerSize(); ++k)
    for (SpMat::InnerIterator it(bnd.rows, k); it; ++it)
      trip.emplace_back(ms + it.row(), it.col(), it.value());
  out.rows.setFromTriplets(trip.begin(), trip.end());
  out.rows.makeCompressed();
  out.values = VecX::Zero(ms + mb);
  out.values.tail(mb) = bnd.values;
  return out;
}

const ConstraintRows& SplineSpace::homogeneous_constraints() const {
  if (!homogeneous_) {
    auto rows = constraints([](const Vec2&) { return 0.0; });
    homogeneous_ = std::make_unique<ConstraintRows>(std::move(rows));
  }
  return *homogeneous_;
}

double SplineFunction::eval(const Vec2& p) const {
  std::array<double, 3> b;
  const int t = space->mesh().locate(p, &b);
  if (t < 0) throw Error("evaluation point outside the mesh");
  return eval_on(t, {b[0], b[1], b[2]});
}

Vec2 SplineFunction::grad(const Vec2& p) const {
  std::array<double, 3> b;
  const int t = space->mesh().locate(p, &b);
  if (t < 0) throw Error("evaluation point outside the mesh");
  return grad_on(t, {b[0], b[1], b[2]});
}

Mat2 SplineFunction::hess(const Vec2& p) const {
  std::array<double, 3> b;
  const int t = space->mesh().locate(p, &b);
  if (t < 0) throw Error("evaluation point outside the mesh");
  return hess_on(t, {b[0], b[1], b[2]});
}

double SplineFunction::eval_on(int t, const BarycentricPoint& b) const {
  return bform_eval(space->degree(), local(t), b);
}

Vec2 SplineFunction::grad_on(int t, const BarycentricPoint& b) const {
  return bform_grad(space->degree(), local(t), b, space->geometry(t));
}

Mat2 SplineFunction::hess_on(int t, const BarycentricPoint& b) const {
  return bform_hess(space->degree(), local(t), b, space->geometry(t));
}

double smoothness_violation(const SplineFunction& v) {
  const VecX r = v.space->smoothness_constraints() * v.coeffs;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

SplineFunction interpolate_local(const SplineSpace& space, const ScalarField& f) {
  const int d = space.degree();
  const auto& idx = bform_indices(d);
  const int nb = space.nb();
  // Interpolation at domain points: one Vandermonde in barycentric form serves
  // every triangle.
  MatX V(nb, nb);
  std::vector<BarycentricPoint> dompts;
  for (const auto& [i, j, k] : idx)
    dompts.push_back({double(i) / d, double(j) / d, double(k) / d});
  for (int r = 0; r < nb; ++r) {
    VecX unit = VecX::Zero(nb);
    for (int c = 0; c < nb; ++c) {
      unit.setZero();
      unit(c) = 1.0;
      V(r, c) = bform_eval(d, unit.data(), dompts[r]);
    }
  }
  Eigen::PartialPivLU<MatX> lu(V);
  SplineFunction out{&space, VecX::Zero(space.dof())};
  VecX fv(nb);
  for (int t = 0; t < space.mesh().nt(); ++t) {
    const TriGeometry& g = space.geometry(t);
    for (int r = 0; r < nb; ++r) fv(r) = f(g.point(dompts[r]));
    out.coeffs.segment(space.coeff_offset(t), nb) = lu.solve(fv);
  }
  return out;
}

SplineFunction project_to_space(const SplineSpace& space, const ScalarField& f) {
  auto [lap, mass] = assemble_laplace_and_mass(space);
  (void)lap;
  SaddleProblem p;
  p.K = std::move(mass);
  p.F = assemble_load(space, f);
  p.R = space.smoothness_constraints();
  p.G = VecX::Zero(p.R.rows());
  const SaddleSolution sol = solve_kkt(p);
  return SplineFunction{&space, sol.c};
}

} // namespace ma
