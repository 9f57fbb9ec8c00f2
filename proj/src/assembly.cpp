#include "ma/assembly.hpp"

#include <thread>
#include <vector>

namespace ma {

namespace {

// Runs fn(t, chunk_id) over all triangles, splitting them into `threads`
// contiguous chunks. Chunk-local outputs are merged by the callers in chunk
// order, so results are reproducible for a fixed thread count.
void for_each_triangle(int nt, int threads, const std::function<void(int, int)>& fn) {
  threads = std::max(1, std::min(threads, nt));
  if (threads == 1) {
    for (int t = 0; t < nt; ++t) fn(t, 0);
    return;
  }
  std::vector<std::thread> pool;
  for (int c = 0; c < threads; ++c) {
    const int lo = (long(nt) * c) / threads;
    const int hi = (long(nt) * (c + 1)) / threads;
    pool.emplace_back([=, &fn] {
      for (int t = lo; t < hi; ++t) fn(t, c);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace

VecX assemble_residual(const SplineSpace& space, const SplineFunction& v,
                       const ScalarField& f, int threads) {
  const auto& rule = space.form_rule();
  const auto& tab = space.form_table();
  const int nb = space.nb();
  const int nq = rule.size();
  threads = std::max(1, std::min(threads, space.mesh().nt()));
  std::vector<VecX> partial(threads, VecX::Zero(space.dof()));

  for_each_triangle(space.mesh().nt(), threads, [&](int t, int chunk) {
    const TriGeometry& g = space.geometry(t);
    const double* c = v.local(t);
    VecX local = VecX::Zero(nb);
    std::vector<Vec2> bg(nb);
    for (int q = 0; q < nq; ++q) {
      const double w = rule.weights[q] * g.area;
      const Vec2 dv = tab.gradient(c, q, g);
      const Mat2 cof = cofactor2(tab.hessian(c, q, g));
      const Vec2 flux = cof * dv;
      const double fq = f(g.point(rule.points[q]));
      for (int a = 0; a < nb; ++a) bg[a] = tab.basis_gradient(a, q, g);
      for (int a = 0; a < nb; ++a)
        local(a) += w * (-0.5 * flux.dot(bg[a]) - fq * tab.vals(q, a));
    }
    partial[chunk].segment(space.coeff_offset(t), nb) = local;
  });

  VecX r = std::move(partial[0]);
  for (int c = 1; c < threads; ++c) r += partial[c];
  return r;
}

SpMat assemble_cof_stiffness(const SplineSpace& space, const SplineFunction& v,
                             int threads) {
  const auto& rule = space.form_rule();
  const auto& tab = space.form_table();
  const int nb = space.nb();
  const int nq = rule.size();
  threads = std::max(1, std::min(threads, space.mesh().nt()));
  std::vector<std::vector<Triplet>> trip(threads);

  for_each_triangle(space.mesh().nt(), threads, [&](int t, int chunk) {
    const TriGeometry& g = space.geometry(t);
    const double* c = v.local(t);
    MatX local = MatX::Zero(nb, nb);
    std::vector<Vec2> bg(nb);
    for (int q = 0; q < nq; ++q) {
      const double w = rule.weights[q] * g.area;
      const Mat2 cof = cofactor2(tab.hessian(c, q, g));
      for (int a = 0; a < nb; ++a) bg[a] = tab.basis_gradient(a, q, g);
      for (int a = 0; a < nb; ++a) {
        const Vec2 ca = cof * bg[a];
        for (int b = a; b < nb; ++b) local(a, b) += w * ca.dot(bg[b]);
      }
    }
    const long off = space.coeff_offset(t);
    for (int a = 0; a < nb; ++a)
      for (int b = a; b < nb; ++b) {
        trip[chunk].emplace_back(off + a, off + b, local(a, b));
        if (b > a) trip[chunk].emplace_back(off + b, off + a, local(a, b));
      }
  });

  std::vector<Triplet> all;
  for (auto& tl : trip) all.insert(all.end(), tl.begin(), tl.end());
  SpMat K(space.dof(), space.dof());
  K.setFromTriplets(all.begin(), all.end());
  K.makeCompressed();
  return K;
}

std::pair<SpMat, SpMat> assemble_laplace_and_mass(const SplineSpace& space, int threads) {
  const auto& rule = space.form_rule();
  const auto& tab = space.form_table();
  const int nb = space.nb();
  const int nq = rule.size();
  threads = std::max(1, std::min(threads, space.mesh().nt()));
  std::vector<std::vector<Triplet>> ltrip(threads), mtrip(threads);

  for_each_triangle(space.mesh().nt(), threads, [&](int t, int chunk) {
    const TriGeometry& g = space.geometry(t);
    MatX lap = MatX::Zero(nb, nb), mass = MatX::Zero(nb, nb);
    std::vector<Vec2> bg(nb);
    for (int q = 0; q < nq; ++q) {
      const double w = rule.weights[q] * g.area;
      for (int a = 0; a < nb; ++a) bg[a] = tab.basis_gradient(a, q, g);
      for (int a = 0; a < nb; ++a)
        for (int b = a; b < nb; ++b) {
          lap(a, b) += w * bg[a].dot(bg[b]);
          mass(a, b) += w * tab.vals(q, a) * tab.vals(q, b);
        }
    }
    const long off = space.coeff_offset(t);
    for (int a = 0; a < nb; ++a)
      for (int b = a; b < nb; ++b) {
        ltrip[chunk].emplace_back(off + a, off + b, lap(a, b));
        mtrip[chunk].emplace_back(off + a, off + b, mass(a, b));
        if (b > a) {
          ltrip[chunk].emplace_back(off + b, off + a, lap(a, b));
          mtrip[chunk].emplace_back(off + b, off + a, mass(a, b));
        }
      }
  });

  std::vector<Triplet> la, ma_;
  for (auto& tl : ltrip) la.insert(la.end(), tl.begin(), tl.end());
  for (auto& tl : mtrip) ma_.insert(ma_.end(), tl.begin(), tl.end());
  SpMat L(space.dof(), space.dof()), M(space.dof(), space.dof());
  L.setFromTriplets(la.begin(), la.end());
  M.setFromTriplets(ma_.begin(), ma_.end());
  L.makeCompressed();
  M.makeCompressed();
  return {std::move(L), std::move(M)};
}

VecX assemble_load(const SplineSpace& space, const ScalarField& f, int threads) {
  const auto& rule = space.form_rule();
  const auto& tab = space.form_table();
  const int nb = space.nb();
  const int nq = rule.size();
  threads = std::max(1, std::min(threads, space.mesh().nt()));
  std::vector<VecX> partial(threads, VecX::Zero(space.dof()));

  for_each_triangle(space.mesh().nt(), threads, [&](int t, int chunk) {
    const TriGeometry& g = space.geometry(t);
    VecX local = VecX::Zero(nb);
    for (int q = 0; q < nq; ++q) {
      const double w = rule.weights[q] * g.area;
      const double fq = f(g.point(rule.points[q]));
      for (int a = 0; a < nb; ++a) local(a) += w * fq * tab.vals(q, a);
    }
    partial[chunk].segment(space.coeff_offset(t), nb) = local;
  });

  VecX r = std::move(partial[0]);
  for (int c = 1; c < threads; ++c) r += partial[c];
  return r;
}

} // namespace ma
