// SPDX-License-Identifier: Apache-2.0
//
// Exact model of the Bing space B on the rational closed upper half-plane and
// of its semi-regularization (the Ritter space).
//
// A point (a, b) has two "feet" a - (b/3)sqrt3 and a + (b/3)sqrt3 on the
// x-axis (they coincide when b = 0). The basic neighbourhood N_eps(a, b) is
// the point itself together with the rational axis points within distance
// eps of either foot. All feet live in Q(sqrt3), so every membership test
// below is an exact sign computation.
//
// Boundary conventions:
//   nbhd_contains   strict  (|x - f| < eps)
//   in_closure      closed  (|f_p - f_U| <= eps)
//   ritter_contains strict  (every foot of p strictly inside a strip of U)

#pragma once

#include "dhlab/exact.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dhlab::bing {

struct BPoint {
  Rat x;
  Rat y;

  BPoint() = default;
  BPoint(Rat x_, Rat y_) : x(std::move(x_)), y(std::move(y_)) {
    if (y.sign() < 0) throw std::invalid_argument("BPoint: y must be >= 0, got " + y.str());
  }

  bool on_axis() const { return y.is_zero(); }
  Quad3 left_foot() const { return {x, -(y / Rat(3))}; }
  Quad3 right_foot() const { return {x, y / Rat(3)}; }

  /// Distinct feet only: one entry for axis points, two otherwise.
  std::vector<Quad3> feet() const {
    if (on_axis()) return {Quad3(x)};
    return {left_foot(), right_foot()};
  }

  std::string str() const { return "(" + x.str() + ", " + y.str() + ")"; }

  friend bool operator==(const BPoint &, const BPoint &) = default;
};

/// Lexicographic order, used only to make outputs deterministic.
inline bool lex_less(const BPoint &a, const BPoint &b) {
  return a.x != b.x ? a.x < b.x : a.y < b.y;
}

struct BasicNbhd {
  BPoint center;
  Rat eps;

  BasicNbhd(BPoint c, Rat e) : center(std::move(c)), eps(std::move(e)) {
    if (eps.sign() <= 0) throw std::invalid_argument("BasicNbhd: eps must be > 0, got " + eps.str());
  }

  Quad3 left() const { return center.left_foot(); }
  Quad3 right() const { return center.right_foot(); }
};

namespace detail {

inline bool dist_lt(const Quad3 &a, const Quad3 &b, const Rat &r) {
  return (Quad3(r) - abs(a - b)).sign() > 0;
}
inline bool dist_le(const Quad3 &a, const Quad3 &b, const Rat &r) {
  return (Quad3(r) - abs(a - b)).sign() >= 0;
}

inline bool near_some_foot(const Quad3 &f, const BasicNbhd &U, bool strict) {
  for (const Quad3 &g : U.center.feet())
    if (strict ? dist_lt(f, g, U.eps) : dist_le(f, g, U.eps)) return true;
  return false;
}

}  // namespace detail

/// p in N_eps(center): p is the center, or an axis point strictly within eps
/// of one of the center's feet.
inline bool nbhd_contains(const BasicNbhd &U, const BPoint &p) {
  if (p == U.center) return true;
  return p.on_axis() && detail::near_some_foot(Quad3(p.x), U, /*strict=*/true);
}

/// U and V share a point. Open foot intervals overlap exactly when the feet
/// are closer than eps_U + eps_V, and any overlap of real intervals contains
/// rationals.
inline bool nbhds_intersect(const BasicNbhd &U, const BasicNbhd &V) {
  Rat reach = U.eps + V.eps;
  for (const Quad3 &f : U.center.feet())
    for (const Quad3 &g : V.center.feet())
      if (detail::dist_lt(f, g, reach)) return true;
  return nbhd_contains(U, V.center) || nbhd_contains(V, U.center);
}

/// p in Cl(U). N_eps'(p) meets U for every eps' > 0 exactly when p is in U or
/// some foot of p lies within closed distance eps of some foot of U.
inline bool in_closure(const BasicNbhd &U, const BPoint &p) {
  if (nbhd_contains(U, p)) return true;
  for (const Quad3 &f : p.feet())
    if (detail::near_some_foot(f, U, /*strict=*/false)) return true;
  return false;
}

/// p in Int(Cl(U)), the regular open set generated by U; these sets form a
/// base of the Ritter topology. Every foot of p must sit strictly inside the
/// closed eps-strips around the feet of U. Two strips of U never touch end to
/// end (that would need (2y/3)sqrt3 = 2 eps with rational y > 0, eps), so
/// strict distance is the whole interior condition.
inline bool ritter_contains(const BasicNbhd &U, const BPoint &p) {
  for (const Quad3 &f : p.feet())
    if (!detail::near_some_foot(f, U, /*strict=*/true)) return false;
  return true;
}

/// Smallest distance between a foot of p and a foot of q (zero iff p == q).
inline Quad3 min_foot_gap(const BPoint &p, const BPoint &q) {
  std::optional<Quad3> best;
  for (const Quad3 &f : p.feet())
    for (const Quad3 &g : q.feet()) {
      Quad3 d = abs(f - g);
      if (!best || d < *best) best = std::move(d);
    }
  return *best;
}

/// Rational eps > 0 for which N_eps(p) and N_eps(q) are disjoint (p != q).
inline Rat separating_eps(const BPoint &p, const BPoint &q) {
  if (p == q) throw std::invalid_argument("separating_eps: points coincide " + p.str());
  return positive_lower_bound(min_foot_gap(p, q)) * Rat(1, 2);
}

struct ApexCertificate {
  BPoint apex;
  Rat eps;
  std::vector<BPoint> captured;
};

/// Lists exactly the points of D in the closure of N_eps(apex).
inline ApexCertificate capture_count(const BPoint &apex, const Rat &eps,
                                     const std::vector<BPoint> &D) {
  BasicNbhd U(apex, eps);
  ApexCertificate cert{apex, eps, {}};
  for (const BPoint &d : D)
    if (in_closure(U, d)) cert.captured.push_back(d);
  return cert;
}

/// Radius eps whose basic neighbourhood at apex has a closure holding at most
/// one point of D: half a rational lower bound on the smallest foot gap from
/// apex to the points of D other than apex. Distinct points of the half-plane
/// never share a foot, so for finite D the gap is positive and no failure is
/// possible; std::nullopt is reserved for set descriptions that are not
/// finite lists.
inline std::optional<Rat> theta_certificate(const BPoint &apex, const std::vector<BPoint> &D) {
  std::optional<Quad3> gap;
  for (const BPoint &d : D) {
    if (d == apex) continue;
    Quad3 g = min_foot_gap(apex, d);
    assert(g.sign() > 0);
    if (!gap || g < *gap) gap = std::move(g);
  }
  if (!gap) return Rat(1);
  return positive_lower_bound(*gap) * Rat(1, 2);
}

enum class Side { left, right };

/// Certified finite prefix of one of the built-in countable families.
struct SeqFamily {
  enum class Kind { naturals_on_axis, row_at_height, line_approach };

  Kind kind = Kind::naturals_on_axis;
  Rat height;        // row_at_height
  BPoint apex;       // line_approach
  Side side = Side::left;
  int prefix_length = 1;

  static SeqFamily naturals_on_axis(int K) { return {Kind::naturals_on_axis, Rat(0), {}, Side::left, K}; }
  static SeqFamily row_at_height(Rat b, int K) {
    if (b.sign() < 0) throw std::invalid_argument("row_at_height: b must be >= 0, got " + b.str());
    return {Kind::row_at_height, std::move(b), {}, Side::left, K};
  }
  static SeqFamily line_approach(BPoint apex, Side side, int K) {
    return {Kind::line_approach, Rat(0), std::move(apex), side, K};
  }
};

/// k-th point (k >= 1) of the line-approach family: height k, abscissa the
/// nearest multiple of 10^-k to the value that would put the chosen foot
/// exactly on the apex's foot on the same side.
inline BPoint line_approach_point(const BPoint &apex, Side side, int k) {
  Quad3 offset{Rat(0), Rat(k, 3)};
  Quad3 target = side == Side::left ? apex.left_foot() + offset : apex.right_foot() - offset;
  Rat scale = pow10(k);
  mpz_class n = floor(target * Quad3(scale) + Quad3(Rat(1, 2)));
  BPoint d(Rat(n) / scale, Rat(k));
  Quad3 err = side == Side::left ? d.left_foot() - apex.left_foot()
                                 : d.right_foot() - apex.right_foot();
  if (!detail::dist_le(err, Quad3(0), pow10(-k)))
    throw std::logic_error("line_approach_point: rounding certificate failed at k=" + std::to_string(k));
  return d;
}

inline std::vector<BPoint> generate_sequence(const SeqFamily &f) {
  if (f.prefix_length < 1) throw std::invalid_argument("generate_sequence: prefix_length must be >= 1");
  std::vector<BPoint> out;
  out.reserve(static_cast<std::size_t>(f.prefix_length));
  for (int k = 1; k <= f.prefix_length; ++k) {
    switch (f.kind) {
    case SeqFamily::Kind::naturals_on_axis: out.emplace_back(Rat(k), Rat(0)); break;
    case SeqFamily::Kind::row_at_height: out.emplace_back(Rat(k), f.height); break;
    case SeqFamily::Kind::line_approach: out.push_back(line_approach_point(f.apex, f.side, k)); break;
    }
  }
  return out;
}

struct GrowthRow {
  Rat eps;
  std::size_t count;
};

inline std::vector<GrowthRow> capture_growth(const BPoint &apex, const SeqFamily &f,
                                             const std::vector<Rat> &eps_list) {
  auto pts = generate_sequence(f);
  std::vector<GrowthRow> rows;
  for (const Rat &e : eps_list) rows.push_back({e, capture_count(apex, e, pts).captured.size()});
  return rows;
}

struct PairSeparation {
  std::size_t i, j;
  Rat eps;  // N_eps(p_i) and N_eps(p_j) are disjoint
};

struct DiscretenessReport {
  bool discrete = true;
  std::vector<Rat> point_eps;  // N_eps(p_i) holds no other listed point
  std::vector<PairSeparation> pairs;
  std::optional<BPoint> accumulation_near;
  std::optional<Rat> min_axis_gap;
};

/// Per-point discreteness certificates for a finite list of distinct points.
///
/// The accumulation flag is a prefix-level heuristic, not a statement about
/// any infinite set: with m axis points, it fires when two consecutive axis
/// abscissae are closer than 1/m, and names the left point of the closest pair.
inline DiscretenessReport is_discrete_prefix(const std::vector<BPoint> &pts) {
  DiscretenessReport rep;
  const std::size_t n = pts.size();
  rep.point_eps.assign(n, Rat(1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pts[i] == pts[j])
        throw std::invalid_argument("is_discrete_prefix: repeated point " + pts[i].str());
      Rat e = separating_eps(pts[i], pts[j]);
      if (e < rep.point_eps[i]) rep.point_eps[i] = e;
      if (e < rep.point_eps[j]) rep.point_eps[j] = e;
      rep.pairs.push_back({i, j, std::move(e)});
    }

  std::vector<Rat> axis;
  for (const BPoint &p : pts)
    if (p.on_axis()) axis.push_back(p.x);
  std::sort(axis.begin(), axis.end());
  if (axis.size() >= 2) {
    std::size_t at = 0;
    for (std::size_t k = 1; k + 1 < axis.size(); ++k)
      if (axis[k + 1] - axis[k] < axis[at + 1] - axis[at]) at = k;
    rep.min_axis_gap = axis[at + 1] - axis[at];
    if (*rep.min_axis_gap < Rat(1, static_cast<long>(axis.size())))
      rep.accumulation_near = BPoint(axis[at], Rat(0));
  }
  return rep;
}

inline DiscretenessReport is_discrete_prefix(const SeqFamily &f) {
  return is_discrete_prefix(generate_sequence(f));
}

}  // namespace dhlab::bing
