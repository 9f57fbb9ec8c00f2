#include "ma/iterate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>

#include "ma/assembly.hpp"

namespace ma {

const char* method_name(Method m) {
  switch (m) {
    case Method::newton: return "newton";
    case Method::ptc_laplace: return "ptc-laplace";
    case Method::ptc_identity: return "ptc-identity";
    case Method::march_laplace: return "march-laplace";
    case Method::march_mass: return "march-mass";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::newton, Method::ptc_laplace, Method::ptc_identity,
                   Method::march_laplace, Method::march_mass})
    if (name == method_name(m)) return m;
  throw Error("unknown method '" + name +
              "' (expected newton|ptc-laplace|ptc-identity|march-laplace|march-mass)");
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void validate(const IterateConfig& cfg) {
  if (cfg.method == Method::newton && cfg.nu != 0.0)
    throw Error("newton requires nu = 0");
  if (cfg.method != Method::newton && cfg.nu <= 0.0)
    throw Error(std::string(method_name(cfg.method)) + " requires nu > 0");
  if (cfg.tol <= 0) throw Error("tol must be positive");
  if (cfg.max_iter < 1) throw Error("max_iter must be >= 1");
}

bool uses_cof(Method m) {
  return m == Method::newton || m == Method::ptc_laplace || m == Method::ptc_identity;
}

bool uses_mass(Method m) {
  return m == Method::ptc_identity || m == Method::march_mass;
}

} // namespace

SplineFunction initial_guess(const SplineSpace& space, const ScalarField& f,
                             const ScalarField& g, bool concave, int threads) {
  const auto& rule = space.form_rule();
  for (int t = 0; t < space.mesh().nt(); ++t) {
    const TriGeometry& geom = space.geometry(t);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = geom.point(rule.points[q]);
      if (f(x) < -1e-12)
        throw Error("initial_guess: f is negative (" + num(f(x)) + ") at (" + num(x.x()) +
                    "," + num(x.y()) + ")");
    }
  }
  const double sign = concave ? 1.0 : -1.0;
  const ScalarField rhs = [&f, sign](const Vec2& x) {
    return sign * 2.0 * std::sqrt(std::max(f(x), 0.0));
  };
  SaddleProblem p;
  p.K = assemble_laplace_and_mass(space, threads).first;
  p.F = assemble_load(space, rhs, threads);
  auto con = space.constraints(g);
  p.R = std::move(con.rows);
  p.G = std::move(con.values);
  return SplineFunction{&space, solve_kkt(p).c};
}

SaddleProblem step_system(const SplineSpace& space, const SplineFunction& u,
                          const ScalarField& f, double nu, Method method, int threads) {
  SaddleProblem p;
  auto [lap, mass] = assemble_laplace_and_mass(space, threads);
  switch (method) {
    case Method::newton: p.K = assemble_cof_stiffness(space, u, threads); break;
    case Method::ptc_laplace:
      p.K = SpMat(nu * lap) + assemble_cof_stiffness(space, u, threads);
      break;
    case Method::ptc_identity:
      p.K = SpMat(nu * mass) + assemble_cof_stiffness(space, u, threads);
      break;
    case Method::march_laplace: p.K = nu * lap; break;
    case Method::march_mass: p.K = nu * mass; break;
  }
  p.K.makeCompressed();
  p.F = assemble_residual(space, u, f, threads);
  const auto& hom = space.homogeneous_constraints();
  p.R = hom.rows;
  p.G = hom.values;
  return p;
}

namespace {

SplineFunction one_step(const SplineSpace& space, const SplineFunction& u,
                        const ScalarField& f, double nu, Method method) {
  const SaddleProblem p = step_system(space, u, f, nu, method);
  SplineFunction next = u;
  next.coeffs += solve_kkt(p).c;
  return next;
}

} // namespace

SplineFunction step_ptc(const SplineSpace& space, const SplineFunction& u,
                        const ScalarField& f, double nu, Method variant) {
  if (variant != Method::ptc_laplace && variant != Method::ptc_identity)
    throw Error("step_ptc: variant must be ptc-laplace or ptc-identity");
  return one_step(space, u, f, nu, variant);
}

SplineFunction step_march(const SplineSpace& space, const SplineFunction& u,
                          const ScalarField& f, double nu, Method variant) {
  if (variant != Method::march_laplace && variant != Method::march_mass)
    throw Error("step_march: variant must be march-laplace or march-mass");
  return one_step(space, u, f, nu, variant);
}

ConvexityReport convexity_monitor(const SplineSpace& space, const SplineFunction& v) {
  const auto& rule = space.form_rule();
  const auto& tab = space.form_table();
  ConvexityReport rep;
  rep.min_eig = rep.min_lap = std::numeric_limits<double>::infinity();
  rep.max_eig = rep.max_lap = -std::numeric_limits<double>::infinity();
  long negative = 0, total = 0;
  for (int t = 0; t < space.mesh().nt(); ++t) {
    const TriGeometry& g = space.geometry(t);
    const double* c = v.local(t);
    for (int q = 0; q < rule.size(); ++q) {
      const Mat2 h = tab.hessian(c, q, g);
      const double mean = 0.5 * (h(0, 0) + h(1, 1));
      const double rad = std::hypot(0.5 * (h(0, 0) - h(1, 1)), h(0, 1));
      const double lo = mean - rad, hi = mean + rad;
      rep.min_eig = std::min(rep.min_eig, lo);
      rep.max_eig = std::max(rep.max_eig, hi);
      rep.min_lap = std::min(rep.min_lap, lo + hi);
      rep.max_lap = std::max(rep.max_lap, lo + hi);
      if (lo < 0) ++negative;
      ++total;
    }
  }
  rep.frac_negative = double(negative) / double(total);
  return rep;
}

std::pair<SplineFunction, IterationTrace> solve(const SplineSpace& space,
                                                const ScalarField& f,
                                                const ScalarField& g,
                                                const IterateConfig& cfg) {
  validate(cfg);
  // Concave branch: w = -u is convex, solves det D^2 w = f with data -g.
  const ScalarField g_eff =
      cfg.concave ? ScalarField([&g](const Vec2& x) { return -g(x); }) : g;

  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  auto [lap, mass] = assemble_laplace_and_mass(space, cfg.threads);
  const auto& hom = space.homogeneous_constraints();
  ConstraintProjector projector(hom.rows);

  SplineFunction u = initial_guess(space, f, g_eff, false, cfg.threads);

  // Constant-matrix methods are factored once and reused.  Methods whose step
  // matrix changes keep one solver and re-factorize in place, which reuses the
  // symbolic analysis (the sparsity pattern is fixed by the space).
  std::unique_ptr<KktSolver> fixed;
  std::unique_ptr<KktSolver> varying;
  if (cfg.method == Method::march_laplace)
    fixed = std::make_unique<KktSolver>(SpMat(cfg.nu * lap), hom.rows);
  else if (cfg.method == Method::march_mass)
    fixed = std::make_unique<KktSolver>(SpMat(cfg.nu * mass), hom.rows);

  IterationTrace trace;
  double min_residual = std::numeric_limits<double>::infinity();
  const VecX zero_g = VecX::Zero(hom.rows.rows());

  for (int k = 0; k <= cfg.max_iter; ++k) {
    const VecX r = assemble_residual(space, u, f, cfg.threads);
    const double rn = projector.norm(r);

    TraceRow row;
    row.k = k;
    row.residual = rn;
    if (cfg.monitor) {
      const ConvexityReport rep = convexity_monitor(space, u);
      // Report for the physical iterate: eigenvalues flip sign with u -> -u.
      row.min_eig = cfg.concave ? -rep.max_eig : rep.min_eig;
      row.min_lap = cfg.concave ? -rep.max_lap : rep.min_lap;
    }

    if (rn <= cfg.tol) {
      row.time_s = elapsed();
      trace.rows.push_back(row);
      trace.converged = true;
      trace.final_residual = rn;
      break;
    }
    min_residual = std::min(min_residual, rn);
    if (rn > 1e3 * min_residual) {
      row.time_s = elapsed();
      trace.rows.push_back(row);
      trace.final_residual = rn;
      throw DivergenceDetected("residual grew beyond 1e3x its running minimum (" +
                                   num(rn) + " vs " + num(min_residual) + ") at step " +
                                   std::to_string(k),
                               trace, cfg.concave ? VecX(-u.coeffs) : u.coeffs);
    }
    if (k == cfg.max_iter) {
      row.time_s = elapsed();
      trace.rows.push_back(row);
      trace.final_residual = rn;
      throw NonConvergence("no convergence to tol " + num(cfg.tol) + " within " +
                               std::to_string(cfg.max_iter) + " steps (residual " +
                               num(rn) + ")",
                           trace, cfg.concave ? VecX(-u.coeffs) : u.coeffs);
    }

    VecX theta;
    if (fixed) {
      theta = fixed->solve(r, zero_g);
    } else {
      SpMat Kstep = assemble_cof_stiffness(space, u, cfg.threads);
      if (cfg.method == Method::ptc_laplace)
        Kstep = SpMat(cfg.nu * lap) + Kstep;
      else if (cfg.method == Method::ptc_identity)
        Kstep = SpMat(cfg.nu * mass) + Kstep;
      Kstep.makeCompressed();
      if (!varying)
        varying = std::make_unique<KktSolver>(Kstep, hom.rows);
      else
        varying->update_matrix(Kstep);
      theta = varying->solve(r, zero_g);
    }
    u.coeffs += theta;
    row.increment_h1 = std::sqrt(theta.dot(lap * theta));
    row.time_s = elapsed();
    trace.rows.push_back(row);
  }

  if (cfg.concave) u.coeffs = -u.coeffs;
  return {std::move(u), std::move(trace)};
}

} // namespace ma
