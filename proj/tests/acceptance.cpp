// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failures.  Criteria pin the solver's headline behaviors: method agreement,
// Newton's quadratic tail, marching accuracy/rates, convexity certificates,
// exact reproduction of representable solutions, core identities, and the
// independent finite-difference cross-check.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "ma/assembly.hpp"
#include "ma/errors.hpp"
#include "ma/fd_oracle.hpp"
#include "ma/iterate.hpp"
#include "ma/linalg.hpp"
#include "ma/mesh.hpp"
#include "ma/problems.hpp"
#include "ma/quadrature.hpp"
#include "ma/spline_space.hpp"

using namespace ma;
using ma::testing::dense_nullspace;
using ma::testing::project_to_nullspace;
using ma::testing::random_vector;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int idx, const std::string& label, bool ok, double secs,
            const std::string& note = "") {
  std::printf("[%s] %2d %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", idx, label.c_str(),
              secs, note.empty() ? "" : " -- ", note.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void info(const std::string& line) {
  std::printf("       %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}

// One solver run with everything the criteria inspect afterwards.
struct Run {
  std::shared_ptr<Triangulation> mesh;
  std::shared_ptr<SplineSpace> space;
  std::optional<SplineFunction> u;
  IterationTrace trace;
  double h = 0;
  bool ok = false;  // converged without throwing
  std::string error;
};

Run run_on(std::shared_ptr<Triangulation> mesh, std::shared_ptr<SplineSpace> space,
           double h, const ProblemSpec& spec, Method method, double nu, double tol,
           int max_iter, bool concave = false) {
  Run out;
  out.mesh = std::move(mesh);
  out.space = std::move(space);
  out.h = h;
  IterateConfig cfg;
  cfg.method = method;
  cfg.nu = nu;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.concave = concave;
  try {
    auto [u, trace] = solve(*out.space, spec.f, spec.g, cfg);
    out.u = std::move(u);
    out.trace = std::move(trace);
    out.ok = out.trace.converged;
  } catch (const NonConvergence& e) {
    out.trace = e.trace;
    out.error = e.what();
    if (e.last_coeffs.size() > 0)
      out.u = SplineFunction{out.space.get(), e.last_coeffs};
  } catch (const DivergenceDetected& e) {
    out.trace = e.trace;
    out.error = e.what();
    if (e.last_coeffs.size() > 0)
      out.u = SplineFunction{out.space.get(), e.last_coeffs};
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

Run run_level(const ProblemSpec& spec, int level, int degree, Method method, double nu,
              double tol, int max_iter, bool concave = false) {
  double h = 0;
  auto mesh = std::make_shared<Triangulation>(spec.level_mesh(level, &h));
  auto space = std::make_shared<SplineSpace>(*mesh, degree);
  return run_on(std::move(mesh), std::move(space), h, spec, method, nu, tol, max_iter,
                concave);
}

SplineFunction from_coeffs(const SplineSpace& space, VecX c) {
  SplineFunction u;
  u.space = &space;
  u.coeffs = std::move(c);
  return u;
}

// Load vector of det(D^2 v) against every basis function, by the form rule.
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

// Largest value / gradient jump across interior edges, sampled pointwise.
std::pair<double, double> max_interior_jumps(const SplineFunction& u) {
  const SplineSpace& space = *u.space;
  const Triangulation& mesh = space.mesh();
  double jv = 0, jg = 0;
  for (size_t e = 0; e < mesh.edges.size(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.on_boundary()) continue;
    const Vec2 A = mesh.vertices[edge.a], B = mesh.vertices[edge.b];
    const int n = space.degree() + 2;
    for (int i = 1; i <= n; ++i) {
      const double s = (double)i / (n + 1);
      const Vec2 p = (1 - s) * A + s * B;
      std::array<double, 2> val;
      std::array<Vec2, 2> grad;
      for (int side = 0; side < 2; ++side) {
        const int t = edge.tri[side];
        const auto b = space.geometry(t).barycentric(p);
        const BarycentricPoint bp{b[0], b[1], b[2]};
        val[side] = u.eval_on(t, bp);
        grad[side] = u.grad_on(t, bp);
      }
      jv = std::max(jv, std::abs(val[0] - val[1]));
      jg = std::max(jg, (grad[0] - grad[1]).norm());
    }
  }
  return {jv, jg};
}

// Least-squares slope of ln(residual) vs step index over the final `window`
// trace rows; exp(slope) is the fitted one-step geometric ratio.
double fitted_geometric_ratio(const IterationTrace& trace, int window) {
  const auto& rows = trace.rows;
  const int n = (int)rows.size();
  const int lo = std::max(0, n - window - 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = lo; i < n; ++i) {
    const double r = rows[i].residual;
    if (!(r > 0) || !std::isfinite(r)) continue;
    const double x = rows[i].k, y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = m * sxx - sx * sx;
  if (denom == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::exp((m * sxy - sx * sy) / denom);
}

// ---------------------------------------------------------------------------
// Criteria 1 & 2 share one set of runs on test1, d = 5, h = 1/4.

static std::optional<SplineFunction> g_h8_solution;  // test1 d=5 h=1/8 (criterion 3)
static std::shared_ptr<SplineSpace> g_h8_space;
static std::shared_ptr<Triangulation> g_h8_mesh;

void criteria_1_2() {
  const ProblemSpec t1 = builtin("test1");
  const auto t0 = Clock::now();

  auto mesh = std::make_shared<Triangulation>(t1.level_mesh(2));
  auto space = std::make_shared<SplineSpace>(*mesh, 5);
  Run newton = run_on(mesh, space, 0.25, t1, Method::newton, 0.0, 1e-10, 50);
  Run ptc = run_on(mesh, space, 0.25, t1, Method::ptc_laplace, 1.0, 1e-10, 400);
  Run march = run_on(mesh, space, 0.25, t1, Method::march_laplace, 50.0, 1e-10, 20000);
  const double secs = seconds_since(t0);

  bool ok1 = newton.ok && ptc.ok && march.ok;
  std::string note1;
  if (ok1) {
    const double dnp = h1_distance(*newton.u, *ptc.u);
    const double dnm = h1_distance(*newton.u, *march.u);
    const double dpm = h1_distance(*ptc.u, *march.u);
    ok1 = dnp <= 1e-8 && dnm <= 1e-8 && dpm <= 1e-8 && secs <= 120.0;
    note1 = "H1 gaps " + fmt(dnp) + " / " + fmt(dnm) + " / " + fmt(dpm) + ", steps " +
            std::to_string(newton.trace.iterations()) + "/" +
            std::to_string(ptc.trace.iterations()) + "/" +
            std::to_string(march.trace.iterations());
  } else {
    note1 = "a run failed: " + newton.error + ptc.error + march.error;
  }
  report(1, "scheme equivalence: newton, ptc (nu=1), marching (nu=50) agree in H1", ok1,
         secs, note1);

  bool ok2 = newton.ok;
  std::string note2;
  const auto& rows = newton.trace.rows;
  if (ok2) {
    const size_t n = rows.size();
    ok2 = rows.back().k <= 8 && rows.back().residual < 1e-10 && n >= 4;
    if (ok2) {
      // Quadratic tail: over the final three steps the log-residual decrement
      // grows monotonically and at least doubles across the window.
      const double d3 = std::log(rows[n - 4].residual / rows[n - 3].residual);
      const double d2 = std::log(rows[n - 3].residual / rows[n - 2].residual);
      const double d1 = std::log(rows[n - 2].residual / rows[n - 1].residual);
      ok2 = d3 > 0 && d2 >= d3 && d1 >= d2 && d1 >= 2.0 * d3;
      note2 = "final log-decrements " + fmt(d3) + " -> " + fmt(d2) + " -> " + fmt(d1);
    }
    std::string seq = "residuals:";
    for (const auto& r : rows) seq += " " + fmt(r.residual);
    info(seq);
  } else {
    note2 = "newton failed: " + newton.error;
  }
  report(2, "newton reaches 1e-10 in <= 8 steps with doubling log-decrements", ok2, 0.0,
         note2);
}

// ---------------------------------------------------------------------------
// Criteria 3 & 4: marching (nu = 50, d = 5) on test1 across h = 1/2, 1/4, 1/8.

std::vector<Run> g_march_runs;

void criteria_3_4() {
  const ProblemSpec t1 = builtin("test1");
  const auto t0 = Clock::now();
  std::vector<ErrorReport> reports;
  bool all_ok = true;
  std::string fail_note;
  for (int level = 1; level <= 3; ++level) {
    Run r = run_level(t1, level, 5, Method::march_laplace, 50.0, 1e-10, 40000);
    if (r.ok) {
      reports.push_back(error_norms(*r.space, *r.u, t1));
    } else {
      all_ok = false;
      fail_note += "level " + std::to_string(level) + ": " + r.error + "; ";
      reports.push_back(ErrorReport{});
    }
    g_march_runs.push_back(std::move(r));
  }
  const double secs = seconds_since(t0);

  bool ok3 = all_ok && secs <= 600.0;
  std::string note3 = fail_note;
  if (all_ok) {
    const double rate_h1 = std::log2(reports[1].h1 / reports[2].h1);
    const double rate_h2 = std::log2(reports[1].h2 / reports[2].h2);
    const double l2_mid = reports[1].l2;
    const double target = 1.1504e-7;
    ok3 = ok3 && rate_h1 >= 4.3 && rate_h2 >= 3.5 && l2_mid >= target / 5.0 &&
          l2_mid <= target * 5.0;
    note3 = "H1 rate " + fmt(rate_h1) + ", broken-H2 rate " + fmt(rate_h2) +
            ", L2(h=1/4) " + fmt(l2_mid);
    for (int i = 0; i < 3; ++i)
      info("h=" + fmt(reports[i].h) + "  l2=" + fmt(reports[i].l2) + "  h1=" +
           fmt(reports[i].h1) + "  h2=" + fmt(reports[i].h2) + "  steps=" +
           std::to_string(g_march_runs[i].trace.iterations()));
    g_h8_solution = g_march_runs[2].u;
    g_h8_space = g_march_runs[2].space;
    g_h8_mesh = g_march_runs[2].mesh;
  }
  report(3, "marching accuracy and rates across h=1/2,1/4,1/8 (d=5, nu=50)", ok3, secs,
         note3);

  bool ok4 = all_ok;
  std::string note4;
  if (all_ok) {
    for (const Run& r : g_march_runs) {
      const double s = fitted_geometric_ratio(r.trace, 50);
      ok4 = ok4 && std::isfinite(s) && s < 1.0;
      note4 += fmt(s) + " ";
    }
    note4 = "fitted ratios over final 50 steps: " + note4;
  } else {
    note4 = "marching runs unavailable";
  }
  report(4, "marching converges at a fitted geometric ratio s < 1", ok4, 0.0, note4);
}

// ---------------------------------------------------------------------------

void criterion_5() {
  const ProblemSpec t4 = builtin("test4");
  const auto t0 = Clock::now();

  Run direct = run_level(t4, 3, 3, Method::newton, 0.0, 1e-9, 100);
  std::string which = "newton";
  if (!direct.ok) {
    direct = run_level(t4, 3, 3, Method::ptc_laplace, 1.0, 1e-9, 1000);
    which = "ptc (nu=1)";
  }
  // The marching reference value is itself an early-stopped iterate (its quoted
  // error is below the discrete solution's own error at this resolution), so
  // the error is measured at termination whether or not the run reached the
  // residual tolerance.  The cap is far past the point where the trajectory
  // settles (it locks into its asymptotic regime within ~50 steps).
  Run march = run_level(t4, 3, 3, Method::march_laplace, 4.5, 1e-9, 2000);

  bool ok = direct.ok && march.u.has_value();
  std::string note;
  if (ok) {
    const double l2_direct = error_norms(*direct.space, *direct.u, t4).l2;
    const double l2_march = error_norms(*march.space, *march.u, t4).l2;
    ok = l2_direct <= 3e-3 && l2_march <= 1.5e-3;
    note = which + " L2 " + fmt(l2_direct) + " (<= 3e-3); marching L2 " + fmt(l2_march) +
           " (<= 1.5e-3)";
    if (!march.ok)
      note += " at step cap, residual " + fmt(march.trace.final_residual);
  } else {
    note = (direct.ok ? "" : which + " failed: " + direct.error + "; ") +
           (march.u ? std::string() : "marching failed: " + march.error);
  }
  report(5, "corner-singular problem error magnitudes (d=3, h=1/8)", ok,
         seconds_since(t0), note);
}

void criterion_6() {
  const ProblemSpec t3 = builtin("test3");
  const auto t0 = Clock::now();

  // Convex branch: pseudo-transient continuation at nu = 7.5.  Concave branch:
  // time marching at nu = 50 (the configuration of the reference concave run).
  Run convex = run_level(t3, 4, 5, Method::ptc_laplace, 7.5, 1e-10, 2000);
  Run concave = run_level(t3, 4, 5, Method::march_laplace, 50.0, 1e-10, 5000, true);

  const auto branch = [](const Run& r, bool concave_branch) {
    std::string s = r.ok ? "converged in " + std::to_string(r.trace.iterations()) +
                               " steps"
                         : r.error;
    if (r.u) {
      const ConvexityReport cv = convexity_monitor(*r.space, *r.u);
      s += concave_branch ? "; max eig " + fmt(cv.max_eig)
                          : "; min eig " + fmt(cv.min_eig);
    }
    return s;
  };
  bool ok = convex.ok && concave.ok;
  if (ok) {
    const ConvexityReport cv = convexity_monitor(*convex.space, *convex.u);
    const ConvexityReport cc = convexity_monitor(*concave.space, *concave.u);
    ok = cv.min_eig >= -1e-6 && cc.max_eig <= 1e-6;
  }
  const std::string note =
      "convex: " + branch(convex, false) + " | concave: " + branch(concave, true);
  report(6, "convexity certificates for f=1, g=0 (d=5, h=1/16)", ok,
         seconds_since(t0), note);
}

void criterion_7() {
  const auto t0 = Clock::now();
  ProblemSpec quad;
  quad.name = "quadratic";
  quad.domain = ProblemSpec::Domain::square;
  quad.f = [](const Vec2&) { return 4.0; };
  quad.g = [](const Vec2& x) { return x.squaredNorm(); };
  quad.has_exact = true;
  quad.exact = quad.g;
  quad.exact_grad = [](const Vec2& x) { return Vec2(2 * x); };
  quad.exact_hess = [](const Vec2&) { return Mat2(2 * Mat2::Identity()); };

  Run r = run_level(quad, 2, 5, Method::newton, 0.0, 1e-10, 50);
  bool ok = r.ok;
  std::string note;
  if (ok) {
    const ErrorReport e = error_norms(*r.space, *r.u, quad);
    ok = e.l2 <= 1e-9 && e.h1 <= 1e-9 && e.h2 <= 1e-9;
    note = "l2 " + fmt(e.l2) + ", h1 " + fmt(e.h1) + ", broken h2 " + fmt(e.h2);
  } else {
    note = r.error;
  }
  report(7, "exact reproduction of a representable quadratic (errors <= 1e-9)", ok,
         seconds_since(t0), note);
}

// ---------------------------------------------------------------------------
// Criterion 8: property suites, each under one minute.

bool suite_cofactor() {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst_tr = 0, worst_inv = 0;
  for (int i = 0; i < 1000; ++i) {
    Mat2 a;
    const double x = unif(rng), y = unif(rng), z = unif(rng);
    a << x, y, y, z;
    const Mat2 cof = cofactor2(a);
    const double det = a.determinant();
    worst_tr = std::max(worst_tr, std::abs(det - 0.5 * (cof.array() * a.array()).sum()));
    worst_inv = std::max(worst_inv, (a * cof - det * Mat2::Identity()).norm());
  }
  info("cofactor identities: worst |det - cof:A/2| " + fmt(worst_tr) +
       ", worst |A cof - det I| " + fmt(worst_inv));
  return worst_tr <= 1e-13 && worst_inv <= 1e-13;
}

bool suite_c1_jump() {
  SplineSpace space(build_square_mesh(2), 5);
  const MatX null_basis = dense_nullspace(space.smoothness_constraints());
  double worst = 0;
  for (unsigned seed = 1; seed <= 5; ++seed) {
    VecX c = project_to_nullspace(null_basis, random_vector(space.dof(), seed));
    c /= c.cwiseAbs().maxCoeff();
    const SplineFunction u = from_coeffs(space, c);
    const auto [jv, jg] = max_interior_jumps(u);
    worst = std::max({worst, jv, jg});
  }
  info("C1 conformity: worst sampled value/gradient jump " + fmt(worst));
  return worst <= 1e-10;
}

bool suite_divergence_form() {
  bool ok = true;
  double worst = 0;
  for (int degree : {4, 5}) {
    SplineSpace space(build_square_mesh(2), degree);
    const MatX smooth_null = dense_nullspace(space.smoothness_constraints());
    const MatX hom_null = dense_nullspace(space.homogeneous_constraints().rows);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const SplineFunction v = from_coeffs(
          space, project_to_nullspace(smooth_null, random_vector(space.dof(), seed)));
      const VecX phi =
          project_to_nullspace(hom_null, random_vector(space.dof(), 100 + seed));
      const double lhs = det_load(space, v).dot(phi);
      const double rhs =
          assemble_residual(space, v, [](const Vec2&) { return 0.0; }).dot(phi);
      const double rel =
          std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-6);
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-10;
    }
  }
  info("divergence form: worst relative two-sided gap " + fmt(worst));
  return ok;
}

bool suite_jacobian_fd() {
  SplineSpace space(build_square_mesh(2), 4);
  const auto f = [](const Vec2& p) { return 1.0 + 0.5 * p.x(); };
  const MatX smooth_null = dense_nullspace(space.smoothness_constraints());
  const ConstraintProjector projector(space.homogeneous_constraints().rows);
  const SplineFunction v = from_coeffs(
      space, project_to_nullspace(smooth_null, random_vector(space.dof(), 17)));
  const double eps = 1e-5;
  bool ok = true;
  double worst = 0;
  for (unsigned seed = 30; seed < 33; ++seed) {
    const VecX w = project_to_nullspace(smooth_null, random_vector(space.dof(), seed));
    SplineFunction vp = from_coeffs(space, v.coeffs + eps * w);
    SplineFunction vm = from_coeffs(space, v.coeffs - eps * w);
    const VecX fd = (assemble_residual(space, vp, f) - assemble_residual(space, vm, f)) /
                    (2 * eps);
    const VecX jac = -(assemble_cof_stiffness(space, v) * w);
    const VecX dfd = projector.project(fd), djac = projector.project(jac);
    const double rel = (dfd - djac).norm() / (1.0 + djac.norm());
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-5;
  }
  info("residual jacobian: worst projected FD mismatch " + fmt(worst));
  return ok;
}

bool suite_kkt_vs_al() {
  const ProblemSpec t1 = builtin("test1");
  Triangulation mesh = t1.level_mesh(1);
  SplineSpace space(mesh, 3);
  const SplineFunction u0 = initial_guess(space, t1.f, t1.g, false);
  const SaddleProblem p = step_system(space, u0, t1.f, 1.0, Method::ptc_laplace);
  const VecX c_kkt = solve_kkt(p).c;
  const VecX c_al = solve_augmented_lagrangian(p).c;
  const double gap = (c_kkt - c_al).norm() / (1.0 + c_kkt.norm());
  info("kkt vs augmented lagrangian: primal gap " + fmt(gap));
  return gap <= 1e-8;
}

bool suite_quadrature() {
  double worst = 0;
  for (int d = 1; d <= 20; ++d) {
    const QuadratureRule rule = quadrature_for(d);
    for (int i = 0; i <= d; ++i)
      for (int j = 0; i + j <= d; ++j) {
        const int k = d - i - j;
        double integral = 0;
        for (int q = 0; q < rule.size(); ++q)
          integral += rule.weights[q] * std::pow(rule.points[q].b1, i) *
                      std::pow(rule.points[q].b2, j) * std::pow(rule.points[q].b3, k);
        // Closed form: mean of b1^i b2^j b3^k = i! j! k! 2! / (i+j+k+2)!
        double exact = 1.0;
        for (int t = 1; t <= i; ++t) exact *= t;
        for (int t = 1; t <= j; ++t) exact *= t;
        for (int t = 1; t <= k; ++t) exact *= t;
        exact *= 2.0;
        for (int t = 1; t <= d + 2; ++t) exact /= t;
        worst = std::max(worst, std::abs(integral - exact));
      }
  }
  info("quadrature exactness: worst moment error " + fmt(worst));
  return worst <= 1e-12;
}

void criterion_8() {
  const auto t0 = Clock::now();
  struct Suite {
    const char* name;
    bool (*fn)();
  };
  const Suite suites[] = {
      {"cofactor/determinant identities", suite_cofactor},
      {"C1 jump on random conforming splines", suite_c1_jump},
      {"divergence-form identity", suite_divergence_form},
      {"residual-jacobian FD consistency", suite_jacobian_fd},
      {"kkt vs augmented-lagrangian", suite_kkt_vs_al},
      {"quadrature vs factorial closed form", suite_quadrature},
  };
  bool ok = true;
  std::string note;
  for (const Suite& s : suites) {
    const auto s0 = Clock::now();
    bool sok = false;
    try {
      sok = s.fn();
    } catch (const Error& e) {
      info(std::string(s.name) + " threw: " + e.what());
    }
    const double ssecs = seconds_since(s0);
    if (ssecs >= 60.0) {
      sok = false;
      note += std::string(s.name) + " too slow; ";
    }
    if (!sok && note.find(s.name) == std::string::npos)
      note += std::string(s.name) + " failed; ";
    ok = ok && sok;
  }
  report(8, "property suites (identities, conformity, consistency, solvers, quadrature)",
         ok, seconds_since(t0), note);
}

// ---------------------------------------------------------------------------

void criterion_9() {
  const ProblemSpec t1 = builtin("test1");
  const auto t0 = Clock::now();
  bool ok = true;
  std::string note;
  try {
    FdConfig c64;
    c64.n = 64;
    c64.nu = 50;
    c64.tol = 1e-11;
    c64.max_iter = 60000;
    FdConfig c32 = c64;
    c32.n = 32;
    const FdSolution fd64 = fd_solve(t1.f, t1.g, c64);
    const FdSolution fd32 = fd_solve(t1.f, t1.g, c32);
    const double e64 = fd_max_error(fd64, t1.exact);
    const double e32 = fd_max_error(fd32, t1.exact);
    const double ratio = e32 / e64;

    if (!g_h8_solution) {
      Run r = run_level(t1, 3, 5, Method::newton, 0.0, 1e-10, 50);
      if (!r.ok) throw Error("fallback spline run failed: " + r.error);
      g_h8_solution = r.u;
      g_h8_space = r.space;
      g_h8_mesh = r.mesh;
    }
    const double gap = fd_compare_to_spline(fd64, *g_h8_solution);
    ok = gap <= 5e-4 && ratio >= 3.2 && ratio <= 4.8;
    note = "grid-vs-spline gap " + fmt(gap) + ", self-convergence ratio " + fmt(ratio) +
           " (errors " + fmt(e32) + " -> " + fmt(e64) + ")";
  } catch (const Error& e) {
    ok = false;
    note = e.what();
  }
  report(9, "finite-difference cross-check (N=65 grid vs spline d=5, h=1/8)", ok,
         seconds_since(t0), note);
}

void criterion_10() {
  const auto t0 = Clock::now();
  info("out of scope by design: external iteration-count and wall-clock comparisons,");
  info("3D variants, and the original unstructured disk mesh; the degenerate problem");
  info("(f=0 with piecewise-linear boundary data) runs as a bounded smoke test only.");

  const ProblemSpec t6 = builtin("test6");
  Run r = run_level(t6, 4, 5, Method::march_laplace, 50.0, 1e-14, 200);
  const auto& rows = r.trace.rows;
  bool finite = !rows.empty();
  for (const auto& row : rows) finite = finite && std::isfinite(row.residual);
  const bool full = !rows.empty() && (rows.back().k >= 200 || r.trace.converged);
  const bool below = rows.size() >= 2 && rows.back().residual < rows.front().residual;
  const bool ok = finite && full && below;
  std::string note;
  if (!rows.empty()) {
    note = "residual " + fmt(rows.front().residual) + " -> " + fmt(rows.back().residual) +
           " over " + std::to_string(rows.back().k) + " steps" +
           (finite ? ", all finite" : ", trace contains NaN/inf");
    if (!r.error.empty()) note += "; stopped early: " + r.error;
  } else {
    note = "no trace: " + r.error;
  }
  report(10, "scope exclusions noted; degenerate smoke run stays finite and decreases",
         ok, seconds_since(t0), note);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  std::printf("acceptance gate: 10 criteria\n");
  criteria_1_2();
  criteria_3_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria failed (total %.1f s)\n", g_failures,
              seconds_since(t0));
  return g_failures;
}
