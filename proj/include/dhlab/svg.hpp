// SPDX-License-Identifier: Apache-2.0
//
// SVG picture of a Homeo: the image of a 41 x 41 coordinate grid and arrows
// from marked points to their targets. Output bytes depend only on the
// inputs (fixed-precision coordinates, no timestamps).

#pragma once

#include "dhlab/moves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dhlab::svg {

struct Projection {
  int u = 0, v = 1;  // coordinate axes spanning the drawn plane
};

struct Options {
  int grid_lines = 41;
  int samples_per_cell = 6;
  double extent = 0;  // half-width of the grid square; 0 picks it from the data
  int pixels = 800;
  /// Required when dim > 2: the grid lies in the (u, v) coordinate plane and
  /// images are projected orthogonally back onto it.
  std::optional<Projection> projection;
};

struct Arrow {
  VecN from, to;
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  std::string s = buf;
  return s == "-0.000" ? "0.000" : s;
}

}  // namespace detail

/// Throws std::invalid_argument for dim > 2 without a projection, or for
/// projection axes outside [0, dim).
inline std::string render(const Homeo &h, const std::vector<Arrow> &arrows, const Options &opt = {}) {
  const int dim = h.dim();
  Projection proj = opt.projection.value_or(Projection{});
  if (dim > 2 && !opt.projection)
    throw std::invalid_argument("render: dim " + std::to_string(dim) + " needs an orthographic projection");
  if (proj.u == proj.v || proj.u < 0 || proj.v < 0 || proj.u >= dim || proj.v >= dim)
    throw std::invalid_argument("render: projection axes must be two distinct coordinates below dim");
  if (opt.grid_lines < 2 || opt.samples_per_cell < 1 || opt.pixels < 16)
    throw std::invalid_argument("render: bad grid options");

  double extent = opt.extent;
  if (!(extent > 0)) {
    extent = std::max(1.0, h.support_bound());
    for (const Arrow &a : arrows)
      extent = std::max({extent, std::abs(a.from[proj.u]), std::abs(a.from[proj.v]), std::abs(a.to[proj.u]),
                         std::abs(a.to[proj.v])});
    extent *= 1.1;
  }
  const double view = 1.25 * extent;
  const double scale = opt.pixels / (2 * view);
  auto sx = [&](double x) { return detail::fmt((x + view) * scale); };
  auto sy = [&](double y) { return detail::fmt((view - y) * scale); };
  auto lift = [&](double x, double y) {
    VecN p(dim);
    p[proj.u] = x;
    p[proj.v] = y;
    return p;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.pixels << "\" height=\"" << opt.pixels
      << "\" viewBox=\"0 0 " << opt.pixels << ' ' << opt.pixels << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<defs><marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">"
         "<path d=\"M0,0 L8,4 L0,8 z\" fill=\"#c0392b\"/></marker></defs>\n";
  out << "<g fill=\"none\" stroke=\"#34495e\" stroke-width=\"0.6\">\n";
  const int lines = opt.grid_lines;
  const int steps = (lines - 1) * opt.samples_per_cell;
  for (int dir = 0; dir < 2; ++dir)
    for (int i = 0; i < lines; ++i) {
      double fixed = -extent + 2 * extent * i / (lines - 1);
      out << "<polyline points=\"";
      for (int s = 0; s <= steps; ++s) {
        double run = -extent + 2 * extent * s / steps;
        VecN q = dir == 0 ? h.apply(lift(run, fixed)) : h.apply(lift(fixed, run));
        out << (s ? " " : "") << sx(q[proj.u]) << ',' << sy(q[proj.v]);
      }
      out << "\"/>\n";
    }
  out << "</g>\n<g stroke=\"#c0392b\" stroke-width=\"1.2\" marker-end=\"url(#head)\">\n";
  for (const Arrow &a : arrows)
    out << "<line x1=\"" << sx(a.from[proj.u]) << "\" y1=\"" << sy(a.from[proj.v]) << "\" x2=\"" << sx(a.to[proj.u])
        << "\" y2=\"" << sy(a.to[proj.v]) << "\"/>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace dhlab::svg
