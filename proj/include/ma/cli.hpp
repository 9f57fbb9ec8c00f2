#pragma once

#include <iosfwd>

#include "ma/iterate.hpp"
#include "ma/spline_space.hpp"

namespace ma {

// Command-line front end. Subcommands:
//   solve           solve one problem; writes <out>.trace.csv, <out>.surface.txt,
//                   <out>.section.txt
//   study           convergence study over refined meshes; writes a CSV
//   compare         run several methods on one problem, report pairwise H1 gaps
//   export-surface  solve and write only the surface/section files
//   fd-check        finite-difference oracle run, optionally vs the spline solve
// Exit codes: 0 success, 1 usage or input errors, 2 solver non-convergence
// (the trace is still written when available).
int run(int argc, const char* const* argv);

// Writes a subdivided graph of the spline: header "<nv> <nf>", then nv lines
// "x y z", then nf lines "i j k" (0-based vertex indices). Each mesh triangle
// contributes subdiv^2 faces.
void export_surface(const SplineFunction& u, std::ostream& out, int subdiv = 4);

// Two-column "x z" section of the graph along the diagonal y = x; points
// falling outside the mesh are skipped.
void export_section(const SplineFunction& u, std::ostream& out, int samples = 201);

} // namespace ma
