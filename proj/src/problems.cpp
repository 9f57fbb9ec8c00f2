#include "ma/problems.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ma/assembly.hpp"
#include "ma/errors.hpp"

namespace ma {

Vec2 ProblemSpec::boundary_point(double t) const {
  t -= std::floor(t);
  if (domain == Domain::disk)
    return {std::cos(2.0 * M_PI * t), std::sin(2.0 * M_PI * t)};
  const double s = 4.0 * t;
  if (s < 1.0) return {s, 0.0};
  if (s < 2.0) return {1.0, s - 1.0};
  if (s < 3.0) return {3.0 - s, 1.0};
  return {0.0, 4.0 - s};
}

Triangulation ProblemSpec::level_mesh(int level, double* h) const {
  if (level < 1) throw Error("study level must be >= 1");
  if (domain == Domain::disk) {
    const int rings = 1 << (level + 1);
    if (h) *h = 1.0 / rings;
    return build_disk_mesh(rings);
  }
  const int m = 1 << level;
  if (h) *h = 1.0 / m;
  return build_square_mesh(m);
}

ProblemSpec builtin(const std::string& name) {
  ProblemSpec p;
  p.name = name;
  if (name == "test1") {
    p.f = [](const Vec2& x) {
      return (1.0 + x.squaredNorm()) * std::exp(x.squaredNorm());
    };
    p.exact = [](const Vec2& x) { return std::exp(0.5 * x.squaredNorm()); };
    p.g = p.exact;
    p.has_exact = true;
    p.exact_grad = [](const Vec2& x) -> Vec2 {
      return std::exp(0.5 * x.squaredNorm()) * x;
    };
    p.exact_hess = [](const Vec2& x) -> Mat2 {
      const double u = std::exp(0.5 * x.squaredNorm());
      Mat2 h;
      h << 1.0 + x.x() * x.x(), x.x() * x.y(), x.x() * x.y(), 1.0 + x.y() * x.y();
      return u * h;
    };
  } else if (name == "test3") {
    p.f = [](const Vec2&) { return 1.0; };
    p.g = [](const Vec2&) { return 0.0; };
  } else if (name == "test4") {
    p.f = [](const Vec2& x) {
      const double w = 2.0 - x.squaredNorm();
      return 2.0 / (w * w);
    };
    p.exact = [](const Vec2& x) { return -std::sqrt(2.0 - x.squaredNorm()); };
    p.g = p.exact;
    p.has_exact = true;
    p.exact_grad = [](const Vec2& x) -> Vec2 {
      return x / std::sqrt(2.0 - x.squaredNorm());
    };
    p.exact_hess = [](const Vec2& x) -> Mat2 {
      const double s = 1.0 / std::sqrt(2.0 - x.squaredNorm());
      const double s3 = s * s * s;
      Mat2 h;
      h << s + x.x() * x.x() * s3, x.x() * x.y() * s3, x.x() * x.y() * s3,
          s + x.y() * x.y() * s3;
      return h;
    };
  } else if (name == "test5") {
    p.domain = ProblemSpec::Domain::disk;
    p.f = [](const Vec2&) { return 4.0; };
    p.g = [](const Vec2&) { return 0.0; };  // exact trace on the unit circle
    p.exact = [](const Vec2& x) { return x.squaredNorm() - 1.0; };
    p.has_exact = true;
    p.exact_grad = [](const Vec2& x) -> Vec2 { return 2.0 * x; };
    p.exact_hess = [](const Vec2&) -> Mat2 { return 2.0 * Mat2::Identity(); };
  } else if (name == "test6") {
    p.f = [](const Vec2&) { return 0.0; };
    p.g = [](const Vec2& x) { return std::abs(x.x() - 0.5); };
  } else {
    throw Error("unknown problem '" + name + "' (available: test1 test3 test4 test5 test6)");
  }
  return p;
}

std::vector<std::string> builtin_names() {
  return {"test1", "test3", "test4", "test5", "test6"};
}

ErrorReport error_norms(const SplineSpace& space, const SplineFunction& u,
                        const ProblemSpec& spec) {
  if (!spec.has_exact)
    throw Error("error_norms: problem '" + spec.name + "' has no exact solution");
  const auto& rule = space.norm_rule();
  const auto& tab = space.norm_table();
  double e0 = 0, e1 = 0, e2 = 0;  // squared L2 / H1-semi / broken H2-semi
  for (int t = 0; t < space.mesh().nt(); ++t) {
    const TriGeometry& g = space.geometry(t);
    const double* c = u.local(t);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * g.area;
      const Vec2 x = g.point(rule.points[q]);
      const double dv = tab.value(c, q) - spec.exact(x);
      const Vec2 dg = tab.gradient(c, q, g) - spec.exact_grad(x);
      const Mat2 dh = tab.hessian(c, q, g) - spec.exact_hess(x);
      e0 += w * dv * dv;
      e1 += w * dg.squaredNorm();
      e2 += w * dh.squaredNorm();
    }
  }
  ErrorReport r;
  r.dof = space.dof();
  r.l2 = std::sqrt(e0);
  r.h1 = std::sqrt(e0 + e1);
  r.h2 = std::sqrt(e0 + e1 + e2);
  r.rate_l2 = r.rate_h1 = r.rate_h2 = std::nan("");
  return r;
}

double h1_distance(const SplineFunction& a, const SplineFunction& b) {
  if (a.space != b.space) throw Error("h1_distance: functions live on different spaces");
  auto [lap, mass] = assemble_laplace_and_mass(*a.space);
  const VecX d = a.coeffs - b.coeffs;
  return std::sqrt(d.dot(lap * d) + d.dot(mass * d));
}

std::vector<StudyRow> convergence_study(const ProblemSpec& spec, const StudyConfig& cfg) {
  if (!cfg.nu_schedule.empty() && (int)cfg.nu_schedule.size() != cfg.levels)
    throw Error("nu schedule must list one value per level");
  std::vector<StudyRow> rows;
  for (int level = 1; level <= cfg.levels; ++level) {
    StudyRow row;
    double h = 0;
    Triangulation mesh = spec.level_mesh(level, &h);
    row.report.h = h;
    IterateConfig icfg = cfg.iterate;
    if (!cfg.nu_schedule.empty()) icfg.nu = cfg.nu_schedule[level - 1];
    try {
      SplineSpace space(std::move(mesh), cfg.degree);
      row.report.dof = space.dof();
      try {
        auto [u, trace] = solve(space, spec.f, spec.g, icfg);
        row.report.n_it = trace.iterations();
        row.report.time_s = trace.rows.empty() ? 0.0 : trace.rows.back().time_s;
        if (spec.has_exact) {
          ErrorReport e = error_norms(space, u, spec);
          row.report.l2 = e.l2;
          row.report.h1 = e.h1;
          row.report.h2 = e.h2;
        } else {
          row.report.l2 = row.report.h1 = row.report.h2 = std::nan("");
        }
      } catch (const NonConvergence& err) {
        // A capped run still has a well-defined terminal iterate; report its
        // error norms (marked failed, so no rates are formed from them).
        row.failed = true;
        row.message = err.what();
        row.report.n_it = err.trace.iterations();
        row.report.time_s = err.trace.rows.empty() ? 0.0 : err.trace.rows.back().time_s;
        row.report.l2 = row.report.h1 = row.report.h2 = std::nan("");
        if (spec.has_exact && err.last_coeffs.size() > 0) {
          const SplineFunction terminal{&space, err.last_coeffs};
          ErrorReport e = error_norms(space, terminal, spec);
          row.report.l2 = e.l2;
          row.report.h1 = e.h1;
          row.report.h2 = e.h2;
          row.message += " (error columns are for the capped iterate)";
        }
      }
    } catch (const Error& err) {
      row.failed = true;
      row.message = err.what();
      row.report.l2 = row.report.h1 = row.report.h2 = std::nan("");
    }
    row.report.rate_l2 = row.report.rate_h1 = row.report.rate_h2 = std::nan("");
    if (!rows.empty() && !row.failed && !rows.back().failed && spec.has_exact) {
      const ErrorReport& prev = rows.back().report;
      row.report.rate_l2 = std::log2(prev.l2 / row.report.l2);
      row.report.rate_h1 = std::log2(prev.h1 / row.report.h1);
      row.report.rate_h2 = std::log2(prev.h2 / row.report.h2);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

} // namespace

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "h,dof,n_it,l2,rate_l2,h1,rate_h1,h2,rate_h2,time_s\n";
  for (const auto& row : rows) {
    const ErrorReport& r = row.report;
    out << sci(r.h) << "," << r.dof << "," << r.n_it << "," << sci(r.l2) << ","
        << sci(r.rate_l2) << "," << sci(r.h1) << "," << sci(r.rate_h1) << "," << sci(r.h2)
        << "," << sci(r.rate_h2) << "," << sci(r.time_s) << "\n";
  }
}

} // namespace ma
