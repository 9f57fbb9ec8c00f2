#include "ma/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ma/errors.hpp"
#include "ma/fd_oracle.hpp"
#include "ma/problems.hpp"

namespace ma {

namespace {

struct Options {
  std::string problem = "test1";
  std::string mesh_path;
  std::vector<std::string> methods{"newton"};
  std::vector<double> nus;
  int degree = 5;
  double h = 0.25;
  int levels = 3;
  double tol = 1e-10;
  int max_iter = 500;
  std::string out = "ma2d_out";
  int threads = 1;
  bool concave = false;
  long seed = 0;  // reserved for randomized tooling; runs are deterministic
  int subdiv = 4;
  std::vector<double> nu_schedule;
  int grid = 33;
  bool compare_spline = false;
};

void add_common_flags(CLI::App* cmd, Options& o, bool wants_method) {
  // Help stays on --help only; the short -h would clash with the --h option.
  cmd->set_help_flag("--help", "print help and exit");
  cmd->add_option("--problem", o.problem, "built-in problem name")
      ->check(CLI::IsMember(builtin_names()));
  cmd->add_option("--mesh", o.mesh_path, "path to a mesh file (overrides --h)");
  cmd->add_option("--degree", o.degree, "spline degree d >= 1")->check(CLI::PositiveNumber);
  cmd->add_option("--h", o.h, "target mesh size (square: 1/h cells per side)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "stopping tolerance on the projected residual");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output path stem");
  cmd->add_option("--threads", o.threads, "assembly threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--concave", o.concave, "solve the concave branch");
  cmd->add_option("--seed", o.seed, "seed for randomized tooling");
  if (wants_method) {
    cmd->add_option("--method", o.methods,
                    "newton|ptc-laplace|ptc-identity|march-laplace|march-mass");
    cmd->add_option("--nu", o.nus, "continuation/marching parameter (0 for newton)");
  }
}

Triangulation make_mesh(const ProblemSpec& spec, const Options& o) {
  if (!o.mesh_path.empty()) return read_mesh(o.mesh_path);
  const int m = (int)std::lround(1.0 / o.h);
  if (m < 1) throw Error("--h must be at most 1");
  if (spec.domain == ProblemSpec::Domain::disk) return build_disk_mesh(m);
  return build_square_mesh(m);
}

IterateConfig make_iterate_config(const Options& o, size_t which) {
  IterateConfig cfg;
  cfg.method = method_from_name(o.methods.at(which));
  cfg.nu = which < o.nus.size() ? o.nus[which]
                                : (cfg.method == Method::newton ? 0.0 : 1.0);
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.concave = o.concave;
  cfg.threads = o.threads;
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file '" + path + "'");
  return out;
}

void write_trace_csv(const IterationTrace& trace, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "k,residual,increment_h1,min_eig,min_lap\n";
  char buf[160];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.10e,%.10e,%.10e,%.10e\n", r.k, r.residual,
                  r.increment_h1, r.min_eig, r.min_lap);
    out << buf;
  }
}

void write_surface_files(const SplineFunction& u, const Options& o) {
  std::ofstream surf = open_out(o.out + ".surface.txt");
  export_surface(u, surf, o.subdiv);
  std::ofstream sect = open_out(o.out + ".section.txt");
  export_section(u, sect);
}

void print_solution_summary(const SplineSpace& space, const SplineFunction& u,
                            const IterationTrace& trace, const ProblemSpec& spec) {
  std::cout << "converged in " << trace.iterations()
            << " iterations, final residual " << trace.final_residual << "\n";
  if (spec.has_exact) {
    ErrorReport e = error_norms(space, u, spec);
    std::cout << "errors vs exact: L2 " << e.l2 << "  H1 " << e.h1 << "  H2 " << e.h2
              << "\n";
  }
}

int cmd_solve(const Options& o, bool surface_only) {
  ProblemSpec spec = builtin(o.problem);
  SplineSpace space(make_mesh(spec, o), o.degree);
  IterateConfig cfg = make_iterate_config(o, 0);
  try {
    auto [u, trace] = solve(space, spec.f, spec.g, cfg);
    if (!surface_only) write_trace_csv(trace, o.out + ".trace.csv");
    write_surface_files(u, o);
    print_solution_summary(space, u, trace, spec);
    return 0;
  } catch (const NonConvergence& e) {
    write_trace_csv(e.trace, o.out + ".trace.csv");
    std::cerr << "error: " << e.what() << " (trace written)\n";
    return 2;
  } catch (const DivergenceDetected& e) {
    write_trace_csv(e.trace, o.out + ".trace.csv");
    std::cerr << "error: " << e.what() << " (trace written)\n";
    return 2;
  }
}

int cmd_study(const Options& o) {
  ProblemSpec spec = builtin(o.problem);
  StudyConfig cfg;
  cfg.iterate = make_iterate_config(o, 0);
  cfg.degree = o.degree;
  cfg.levels = o.levels;
  cfg.nu_schedule = o.nu_schedule;
  std::vector<StudyRow> rows = convergence_study(spec, cfg);
  std::ofstream out = open_out(o.out + ".study.csv");
  write_study_csv(out, rows);
  int code = 0;
  for (const StudyRow& row : rows) {
    if (row.failed) {
      std::cerr << "level with h=" << row.report.h << " failed: " << row.message << "\n";
      code = 2;
    }
  }
  std::cout << "study written to " << o.out << ".study.csv\n";
  return code;
}

int cmd_compare(const Options& o) {
  ProblemSpec spec = builtin(o.problem);
  SplineSpace space(make_mesh(spec, o), o.degree);
  struct Run {
    std::string label;
    std::optional<SplineFunction> u;
    std::string message;
    int n_it = 0;
    double residual = 0;
  };
  std::vector<Run> runs;
  for (size_t i = 0; i < o.methods.size(); ++i) {
    Run run;
    IterateConfig cfg = make_iterate_config(o, i);
    run.label = o.methods[i] + (cfg.nu > 0 ? " nu=" + std::to_string(cfg.nu) : "");
    try {
      auto [u, trace] = solve(space, spec.f, spec.g, cfg);
      run.u = std::move(u);
      run.n_it = trace.iterations();
      run.residual = trace.final_residual;
    } catch (const Error& e) {
      run.message = e.what();
    }
    runs.push_back(std::move(run));
  }
  int code = 0;
  for (const Run& run : runs) {
    if (run.u)
      std::cout << run.label << ": " << run.n_it << " iterations, residual "
                << run.residual << "\n";
    else {
      std::cout << run.label << ": FAILED (" << run.message << ")\n";
      code = 2;
    }
  }
  for (size_t i = 0; i < runs.size(); ++i)
    for (size_t j = i + 1; j < runs.size(); ++j)
      if (runs[i].u && runs[j].u)
        std::cout << "H1 distance " << runs[i].label << " vs " << runs[j].label << ": "
                  << h1_distance(*runs[i].u, *runs[j].u) << "\n";
  return code;
}

int cmd_fd_check(const Options& o) {
  ProblemSpec spec = builtin(o.problem);
  if (spec.domain != ProblemSpec::Domain::square)
    throw Error("fd-check supports square-domain problems only");
  FdConfig cfg;
  cfg.n = o.grid - 1;
  cfg.nu = o.nus.empty() ? 50.0 : o.nus[0];
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  FdSolution fd = fd_solve(spec.f, spec.g, cfg);
  std::cout << "fd grid " << o.grid << "x" << o.grid << ": converged in "
            << fd.iterations << " iterations\n";
  if (spec.has_exact)
    std::cout << "max error vs exact: " << fd_max_error(fd, spec.exact) << "\n";
  if (o.compare_spline) {
    SplineSpace space(make_mesh(spec, o), o.degree);
    IterateConfig icfg = make_iterate_config(o, 0);
    auto [u, trace] = solve(space, spec.f, spec.g, icfg);
    std::cout << "max interior gap fd vs spline: " << fd_compare_to_spline(fd, u)
              << "\n";
  }
  return 0;
}

} // namespace

void export_surface(const SplineFunction& u, std::ostream& out, int subdiv) {
  if (subdiv < 1) throw Error("surface subdivision must be >= 1");
  const SplineSpace& space = *u.space;
  const int s = subdiv;
  const int nt = space.mesh().nt();
  const int verts_per = (s + 1) * (s + 2) / 2;
  out << (long)nt * verts_per << " " << (long)nt * s * s << "\n";
  out.precision(12);
  // Vertex (i,j) of a triangle sits at barycentric ((s-i-j)/s, i/s, j/s); rows
  // are ordered by j, then i, matching the face index map below.
  auto local_index = [s](int i, int j) { return j * (s + 1) - j * (j - 1) / 2 + i; };
  for (int t = 0; t < nt; ++t) {
    const TriGeometry& g = space.geometry(t);
    for (int j = 0; j <= s; ++j)
      for (int i = 0; i + j <= s; ++i) {
        const BarycentricPoint b =
            make_barycentric((double)(s - i - j) / s, (double)i / s, (double)j / s);
        const Vec2 p = g.point(b);
        out << p.x() << " " << p.y() << " " << bform_eval(space.degree(), u.local(t), b)
            << "\n";
      }
  }
  for (int t = 0; t < nt; ++t) {
    const long base = (long)t * verts_per;
    for (int j = 0; j < s; ++j)
      for (int i = 0; i + j < s; ++i) {
        out << base + local_index(i, j) << " " << base + local_index(i + 1, j) << " "
            << base + local_index(i, j + 1) << "\n";
        if (i + j < s - 1)
          out << base + local_index(i + 1, j) << " " << base + local_index(i + 1, j + 1)
              << " " << base + local_index(i, j + 1) << "\n";
      }
  }
}

void export_section(const SplineFunction& u, std::ostream& out, int samples) {
  if (samples < 2) throw Error("section needs at least 2 samples");
  const auto& verts = u.space->mesh().vertices;
  double lo = verts[0].x(), hi = verts[0].x();
  for (const Vec2& v : verts) {
    lo = std::min({lo, v.x(), v.y()});
    hi = std::max({hi, v.x(), v.y()});
  }
  out.precision(12);
  for (int k = 0; k < samples; ++k) {
    const double t = lo + (hi - lo) * k / (samples - 1);
    try {
      const double z = u.eval(Vec2(t, t));
      out << t << " " << z << "\n";
    } catch (const Error&) {
      // diagonal point outside the mesh (e.g. polygonal disk corners): skip
    }
  }
}

int run(int argc, const char* const* argv) {
  Options o;
  CLI::App app{"C1 spline finite-element solver for det D^2 u = f, u = g"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one problem");
  add_common_flags(solve_cmd, o, true);
  solve_cmd->add_option("--subdiv", o.subdiv, "surface subdivision per triangle")
      ->check(CLI::PositiveNumber);
  CLI::App* study_cmd = app.add_subcommand("study", "convergence study");
  add_common_flags(study_cmd, o, true);
  study_cmd->add_option("--levels", o.levels, "number of refinement levels")
      ->check(CLI::PositiveNumber);
  study_cmd->add_option("--nu-schedule", o.nu_schedule, "per-level nu values");
  CLI::App* compare_cmd = app.add_subcommand("compare", "compare methods");
  add_common_flags(compare_cmd, o, true);
  CLI::App* export_cmd = app.add_subcommand("export-surface", "solve and export surface");
  add_common_flags(export_cmd, o, true);
  export_cmd->add_option("--subdiv", o.subdiv, "surface subdivision per triangle")
      ->check(CLI::PositiveNumber);
  CLI::App* fd_cmd = app.add_subcommand("fd-check", "finite-difference oracle");
  add_common_flags(fd_cmd, o, true);
  fd_cmd->add_option("--grid", o.grid, "grid points per side")
      ->check(CLI::Range(3, 100000));
  fd_cmd->add_flag("--compare-spline", o.compare_spline,
                   "also solve with splines and report the interior gap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(o, false);
    if (study_cmd->parsed()) return cmd_study(o);
    if (compare_cmd->parsed()) return cmd_compare(o);
    if (export_cmd->parsed()) return cmd_solve(o, true);
    if (fd_cmd->parsed()) return cmd_fd_check(o);
  } catch (const SolveError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceDetected& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

} // namespace ma
