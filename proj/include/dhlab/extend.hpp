// SPDX-License-Identifier: Apache-2.0
//
// Extension of a bijection between finite discrete subsets of R^n to an
// explicit homeomorphism of R^n, built from the moves in moves.hpp.
//
// Plane (n = 2):
//   1. general position: small pushes give the marked points distinct,
//      well separated, nonzero norms;
//   2. normalize_to_axis: one annulus twist per point, supported in the
//      eps_k/3 neighbourhood of its circle, rotates it onto the positive
//      x-axis (eps_k = distance to the neighbouring circles, origin below);
//   3. axis_to_naturals: a radial stretch sends the k-th radius to k.
//   With h = 3 o 2 o 1, each pair (h(a), h(sigma a)) is twisted onto its own
//   ray from the origin, slid along the ray inside a thin tube, twisted back,
//   and the result is h^-1 o g o h (PlaneStrategy::rays).
//
//   The conjugate is badly conditioned in floating point: h squeezes the
//   plane into thin annuli and g shears them, so round trips lose about
//   1e-7 at |A| = 100. The default (PlaneStrategy::sweep) skips h and moves
//   the points directly in two phases of parallel tube slides.
//
// Dimension n >= 3: each pair is joined by a piecewise linear path avoiding
// the ball of radius min(|a|, |b|)/2, the other marked points and earlier
// paths (a single midpoint detour suffices generically), and the point is
// slid along its path.
//
// All inputs are finite, so the composites are finite move lists.

#pragma once

#include "dhlab/config.hpp"
#include "dhlab/moves.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace dhlab {

/// Construction failed (routing or clearance exhausted its retries).
class ConstructionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct MarkedSet {
  std::vector<VecN> points;
  double delta = 0;  // <= min pairwise distance

  /// delta is the exact minimum pairwise distance (infinity for < 2 points).
  static MarkedSet from_points(std::vector<VecN> pts) {
    MarkedSet s{std::move(pts), std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < s.points.size(); ++i)
      for (std::size_t j = i + 1; j < s.points.size(); ++j) s.delta = std::min(s.delta, dist(s.points[i], s.points[j]));
    if (s.delta == 0) throw std::invalid_argument("marked set has repeated points");
    return s;
  }
};

struct ExtensionProblem {
  MarkedSet A, B;
  std::vector<int> sigma;  // A[i] -> B[sigma[i]]
  int dim = 2;

  void validate() const {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("problem: dim must be in [2, 8]");
    if (A.points.size() != B.points.size())
      throw std::invalid_argument("problem: |A| = " + std::to_string(A.points.size()) +
                                  " differs from |B| = " + std::to_string(B.points.size()));
    if (sigma.size() != A.points.size()) throw std::invalid_argument("problem: sigma must have |A| entries");
    std::vector<bool> hit(sigma.size(), false);
    for (int j : sigma) {
      if (j < 0 || static_cast<std::size_t>(j) >= sigma.size() || hit[static_cast<std::size_t>(j)])
        throw std::invalid_argument("problem: sigma is not a bijection onto B");
      hit[static_cast<std::size_t>(j)] = true;
    }
    for (const auto *set : {&A, &B})
      for (const VecN &p : set->points)
        if (p.dim() != dim || !p.finite()) throw std::invalid_argument("problem: point of wrong dimension or non-finite");
  }

  const VecN &target(std::size_t i) const { return B.points[static_cast<std::size_t>(sigma[i])]; }
};

struct ExtensionResult {
  Homeo homeo;
  double min_path_clearance = std::numeric_limits<double>::infinity();
  double min_origin_clearance = std::numeric_limits<double>::infinity();  // n >= 3 only
  int attempts = 0;          // ray schedules tried (plane) / max detours used (n >= 3)
  std::size_t slides = 0;    // tube slides in the transport stage
};

namespace geom {

/// Distance between segments [p0, p1] and [q0, q1] in any dimension.
inline double segment_distance(const VecN &p0, const VecN &p1, const VecN &q0, const VecN &q1) {
  VecN d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
  double s = 0, t = 0;
  if (a == 0 && e == 0) return dist(p0, q0);
  if (a == 0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    double c = dot(d1, r);
    if (e == 0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      double b = dot(d1, d2), denom = a * e - b * b;
      s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return dist(p0 + s * d1, q0 + t * d2);
}

inline double point_segment_distance(const VecN &x, const VecN &q0, const VecN &q1) {
  return segment_distance(x, x, q0, q1);
}

using Polyline = std::vector<VecN>;

inline double polyline_distance(const Polyline &a, const Polyline &b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
      best = std::min(best, segment_distance(a[i], a[i + 1], b[j], b[j + 1]));
  return best;
}

inline double point_polyline_distance(const VecN &x, const Polyline &b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < b.size(); ++j) best = std::min(best, point_segment_distance(x, b[j], b[j + 1]));
  return best;
}

inline double polyline_length(const Polyline &p) {
  double len = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) len += dist(p[i], p[i + 1]);
  return len;
}

}  // namespace geom

namespace detail {

/// Largest amplification of a slide: the transverse shear L / (radius - core)
/// or the squeeze (L + cap) / cap of the material ahead of (or behind) the
/// moving point.
inline double slide_condition(const TubeSlide &t) {
  double L = dist(t.a, t.b);
  // Shear across the shell times the axial squeeze of the shorter cap.
  return (1 + L / (t.radius - t.core)) * std::max((L + t.cap_front) / t.cap_front, (L + t.cap_back) / t.cap_back);
}

/// Tube slide from a to b missing `obstacles`. Caps run up to back_max and
/// front_max (default L) and stop short of obstacles near the extended axis. The radius is tried at
/// clear / 1.1 (clear = distance from the segment to the obstacles, capped
/// at `max_radius`) and at halvings of that, keeping the best-conditioned.
inline TubeSlide fit_tube(const VecN &a, const VecN &b, const std::vector<VecN> &obstacles, double max_radius,
                          double back_max = -1, double front_max = -1) {
  const double L = dist(a, b);
  if (back_max < 0) back_max = L;
  if (front_max < 0) front_max = L;
  const VecN e = (1.0 / L) * (b - a);
  double clear = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> beyond;  // (axial, lateral) of obstacles past either end
  for (const VecN &q : obstacles) {
    VecN d = q - a;
    double s = dot(d, e), lat = norm(d - s * e);
    clear = std::min(clear, s < 0 ? norm(d) : s > L ? dist(q, b) : lat);
    if (s < 0 || s > L) beyond.emplace_back(s, lat);
  }
  double rho = std::min(clear / 1.1, max_radius);
  if (!(rho > 0) || !std::isfinite(rho)) throw ConstructionError("tube radius is not positive");
  TubeSlide best;
  double best_cond = std::numeric_limits<double>::infinity();
  for (int halving = 0; halving < 8; ++halving, rho /= 2) {
    double back = back_max, front = front_max;
    for (auto [s, lat] : beyond) {
      if (!(lat < 1.1 * rho)) continue;
      if (s > L) front = std::min(front, (s - L) / 1.1);
      if (s < 0) back = std::min(back, -s / 1.1);
    }
    TubeSlide t{a, b, rho, rho / 32, back, front};
    double c = slide_condition(t);
    if (c < best_cond) {
      best_cond = c;
      best = t;
    }
  }
  return best;
}

/// One tube slide per segment of `path`. Slides run one path at a time, so a
/// tube only has to avoid the marked points other than the moving one
/// (`obstacles`); it may overlap tubes of other paths.
inline std::vector<Move> slide_chain(const geom::Polyline &path, const std::vector<VecN> &obstacles,
                                     double max_radius) {
  std::vector<Move> out;
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    if (!(path[k] == path[k + 1])) out.push_back(fit_tube(path[k], path[k + 1], obstacles, max_radius));
  return out;
}

inline std::vector<VecN> apply_all(const Homeo &h, const std::vector<VecN> &pts) {
  std::vector<VecN> out;
  out.reserve(pts.size());
  for (const VecN &p : pts) out.push_back(h.apply(p));
  return out;
}

inline VecN random_unit(int dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  for (;;) {
    VecN u(dim);
    for (int i = 0; i < dim; ++i) u[i] = g(rng);
    double n = norm(u);
    if (n > 1e-6) return u * (1.0 / n);
  }
}

}  // namespace detail

/// Pushes (each displacing one point radially by at most delta/12 inside a
/// ball of radius delta/3 about it) after which all points are off the origin
/// and their norms are pairwise separated by a common gap G > 0. Returns the
/// empty Homeo when the input already has such a gap with G = delta/4 or the
/// largest feasible smaller value.
inline Homeo general_position(const MarkedSet &S, std::uint64_t seed = 1) {
  const std::size_t n = S.points.size();
  if (n == 0) return Homeo(2);
  const int dim = S.points.front().dim();
  if (n == 1 && norm(S.points[0]) > 0) return Homeo(dim);
  const double delta = std::isfinite(S.delta) ? S.delta : std::max(1.0, norm(S.points[0]));
  const double reach = delta / 6;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = norm(S.points[i]);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rho[a] < rho[b]; });

  auto targets = [&](double gap) {
    std::vector<double> t(n);
    double prev = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double r = rho[order[k]];
      prev = std::max(r, prev + gap);
      t[k] = prev;
    }
    return t;
  };
  auto feasible = [&](double gap) {
    auto t = targets(gap);
    for (std::size_t k = 0; k < n; ++k)
      if (t[k] - rho[order[k]] > reach) return false;
    return true;
  };
  double gap = delta / 4;
  if (!feasible(gap)) {
    double lo = 0, hi = gap;
    for (int it = 0; it < 80; ++it) {
      double mid = (lo + hi) / 2;
      (feasible(mid) ? lo : hi) = mid;
    }
    gap = lo;
  }
  if (!(gap > 0)) throw ConstructionError("general_position: no positive norm gap found");

  std::mt19937_64 rng(seed);
  auto t = targets(gap);
  std::vector<Move> pushes;
  for (std::size_t k = 0; k < n; ++k) {
    const VecN &p = S.points[order[k]];
    double shift = t[k] - rho[order[k]];
    if (shift <= 0) continue;
    VecN dir = rho[order[k]] > 0 ? p * (1.0 / rho[order[k]]) : detail::random_unit(dim, rng);
    pushes.push_back(BallPush{p, delta / 3, shift * dir, 0.0, false});
  }
  Homeo h(dim, std::move(pushes));

  std::vector<double> after;
  for (const VecN &p : S.points) {
    VecN q = h.apply(p);
    if (!(dist(p, q) < delta / 4)) throw ConstructionError("general_position: displacement bound violated");
    after.push_back(norm(q));
  }
  std::sort(after.begin(), after.end());
  if (!(after.front() > 0)) throw ConstructionError("general_position: origin not vacated");
  for (std::size_t k = 1; k < n; ++k)
    if (!(after[k] > after[k - 1])) throw ConstructionError("general_position: norms not distinct");
  return h;
}

struct AxisNormalization {
  Homeo homeo;
  std::vector<std::size_t> order;  // points sorted by norm
  std::vector<double> radii;       // sorted norms
  std::vector<AnnulusTwist> twists;
};

/// Exact check, on the stored binary64 values, that the closed supports
/// [r - w, r + w] of consecutive twists (sorted by r) are disjoint.
inline bool annulus_supports_disjoint(const std::vector<AnnulusTwist> &twists) {
  for (std::size_t k = 0; k + 1 < twists.size(); ++k) {
    mpq_class upper = mpq_class(twists[k].r) + mpq_class(twists[k].w);
    mpq_class lower = mpq_class(twists[k + 1].r) - mpq_class(twists[k + 1].w);
    if (!(upper < lower)) return false;
  }
  return true;
}

/// Plane only. Twists point a_k (k-th smallest norm r_k) onto (r_k, 0) with
/// support the eps_k/3 neighbourhood of its circle, where
/// eps_k = min(r_{k+1} - r_k, r_k - r_{k-1}), r_0 = 0 (the last point uses
/// its lower gap only).
inline AxisNormalization normalize_to_axis(const std::vector<VecN> &pts) {
  AxisNormalization out{Homeo(2), {}, {}, {}};
  const std::size_t n = pts.size();
  for (const VecN &p : pts)
    if (p.dim() != 2) throw std::invalid_argument("normalize_to_axis: dimension must be 2");
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) { return norm(pts[a]) < norm(pts[b]); });
  for (std::size_t k = 0; k < n; ++k) out.radii.push_back(norm(pts[out.order[k]]));
  for (std::size_t k = 0; k < n; ++k) {
    double below = out.radii[k] - (k == 0 ? 0.0 : out.radii[k - 1]);
    if (!(below > 0)) throw std::invalid_argument("normalize_to_axis: norms must be distinct and positive");
  }
  std::vector<Move> moves;
  for (std::size_t k = 0; k < n; ++k) {
    double r = out.radii[k];
    double eps = r - (k == 0 ? 0.0 : out.radii[k - 1]);
    if (k + 1 < n) eps = std::min(eps, out.radii[k + 1] - r);
    const VecN &p = pts[out.order[k]];
    double w = eps / 3;
    AnnulusTwist t{r, w, -std::atan2(p[1], p[0]), w / 16};
    out.twists.push_back(t);
    if (t.theta != 0) moves.push_back(t);
  }
  if (!annulus_supports_disjoint(out.twists)) throw ConstructionError("normalize_to_axis: twist supports overlap");
  out.homeo = Homeo(2, std::move(moves));
  return out;
}

/// Radial stretch with knots (r_k, k) and slope 1 beyond the last knot.
inline Homeo axis_to_naturals(const std::vector<double> &radii, int dim = 2) {
  RadialStretch s;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > (k == 0 ? 0.0 : radii[k - 1])))
      throw std::invalid_argument("axis_to_naturals: radii must be positive and strictly increasing");
    s.knots.emplace_back(radii[k], static_cast<double>(k + 1));
  }
  bool identity = std::all_of(s.knots.begin(), s.knots.end(), [](auto &k) { return k.first == k.second; });
  if (identity) return Homeo(dim);
  s.shift_tail = s.knots.back().first != s.knots.back().second;
  return Homeo(dim, {s});
}

namespace detail {

inline bool is_identity_problem(const ExtensionProblem &P) {
  for (std::size_t i = 0; i < P.A.points.size(); ++i)
    if (!(P.A.points[i] == P.target(i))) return false;
  return true;
}

// Moves every point of A that also lies in B by delta/16 in a random
// direction (balls of radius delta/3, pairwise disjoint).
inline std::optional<Homeo> separate_a_from_b(const ExtensionProblem &P, double delta, std::mt19937_64 &rng) {
  std::vector<Move> pushes;
  for (const VecN &a : P.A.points) {
    bool shared = std::any_of(P.B.points.begin(), P.B.points.end(), [&](const VecN &b) { return b == a; });
    if (shared) pushes.push_back(BallPush{a, delta / 3, (delta / 16) * random_unit(P.dim, rng), delta / 6, false});
  }
  if (pushes.empty()) return std::nullopt;
  return Homeo(P.dim, std::move(pushes));
}

inline double union_delta(const ExtensionProblem &P) {
  std::vector<VecN> all = P.A.points;
  all.insert(all.end(), P.B.points.begin(), P.B.points.end());
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!(all[i] == all[j])) d = std::min(d, dist(all[i], all[j]));
  return d;
}

}  // namespace detail

ExtensionResult extend_bijection(const ExtensionProblem &P, const Config &cfg = {});

namespace detail {

inline ExtensionResult extend_plane_disjoint(const ExtensionProblem &P, const Config &cfg) {
  const std::size_t m = P.A.points.size();
  std::vector<VecN> marked = P.A.points;
  marked.insert(marked.end(), P.B.points.begin(), P.B.points.end());
  MarkedSet M = MarkedSet::from_points(marked);

  Homeo h1 = general_position(M, cfg.seed);
  AxisNormalization norm_stage = normalize_to_axis(apply_all(h1, marked));
  Homeo h3 = axis_to_naturals(norm_stage.radii);
  Homeo h = then(then(h1, norm_stage.homeo), h3);

  // natural[i] = image radius of marked point i.
  std::vector<int> natural(marked.size());
  for (std::size_t k = 0; k < norm_stage.order.size(); ++k) natural[norm_stage.order[k]] = static_cast<int>(k + 1);

  std::vector<int> c(m), d(m);
  for (std::size_t i = 0; i < m; ++i) {
    c[i] = natural[i];
    d[i] = natural[m + static_cast<std::size_t>(P.sigma[i])];
  }

  // Ray schedules: pair k gets angle slot (stride * k + attempt) mod m, slots
  // evenly spaced around the circle.
  auto strides = [&] {
    std::vector<std::size_t> out;
    for (std::size_t s = 1; out.size() < static_cast<std::size_t>(cfg.max_retries) + 1 && s <= std::max<std::size_t>(m, 1) * 4; ++s)
      if (std::gcd(s, std::max<std::size_t>(m, 1)) == 1) out.push_back(s);
    return out;
  }();

  std::string last_failure;
  for (std::size_t attempt = 0; attempt < strides.size(); ++attempt) {
    std::vector<double> angle(m);
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t slot = (strides[attempt] * k + attempt) % m;
      angle[k] = -std::numbers::pi + 2 * std::numbers::pi * (static_cast<double>(slot) + 0.5) / static_cast<double>(m);
    }
    std::vector<geom::Polyline> segs(m);
    auto on_ray = [](int radius, double theta) { return VecN{radius * std::cos(theta), radius * std::sin(theta)}; };
    for (std::size_t k = 0; k < m; ++k) segs[k] = {on_ray(c[k], angle[k]), on_ray(d[k], angle[k])};
    double clearance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) clearance = std::min(clearance, geom::polyline_distance(segs[i], segs[j]));
    if (!(clearance > cfg.min_clearance)) {
      last_failure = "ray schedule " + std::to_string(attempt) + " clearance " + std::to_string(clearance);
      continue;
    }

    std::vector<Move> g;
    std::vector<std::pair<int, double>> twist_at;
    for (std::size_t k = 0; k < m; ++k) {
      twist_at.emplace_back(c[k], angle[k]);
      twist_at.emplace_back(d[k], angle[k]);
    }
    std::sort(twist_at.begin(), twist_at.end());
    for (auto [radius, theta] : twist_at)
      if (theta != 0) g.push_back(AnnulusTwist{static_cast<double>(radius), 1.0 / 3, theta, 1.0 / 48});
    const std::size_t twist_count = g.size();
    std::size_t slides = 0;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<VecN> others;
      for (std::size_t j = 0; j < m; ++j)
        if (j != k) others.insert(others.end(), segs[j].begin(), segs[j].end());
      auto chain = slide_chain(segs[k], others, 1.0 / 3);
      slides += chain.size();
      g.insert(g.end(), chain.begin(), chain.end());
    }
    // Undo the twists: d'_k returns to d_k, and c'_k (now vacated) is free.
    for (std::size_t i = twist_count; i-- > 0;) g.push_back(moves::inverse(g[i]));
    ExtensionResult res{then(then(h, Homeo(2, std::move(g))), inverse(h))};
    res.min_path_clearance = clearance;
    res.attempts = static_cast<int>(attempt) + 1;
    res.slides = slides;
    return res;
  }
  throw ConstructionError("extend (plane): no ray schedule reached the clearance threshold " +
                          std::to_string(cfg.min_clearance) + " after " + std::to_string(strides.size()) +
                          " attempts; last: " + last_failure);
}

inline ExtensionResult extend_space_disjoint(const ExtensionProblem &P, const Config &cfg) {
  const std::size_t m = P.A.points.size();
  const int n = P.dim;
  std::vector<VecN> marked = P.A.points;
  marked.insert(marked.end(), P.B.points.begin(), P.B.points.end());
  const double delta = MarkedSet::from_points(marked).delta;
  const double path_gap = delta / 16;
  std::mt19937_64 rng(cfg.seed);

  std::vector<geom::Polyline> paths;
  ExtensionResult res{Homeo(n)};
  for (std::size_t k = 0; k < m; ++k) {
    const VecN &a = P.A.points[k];
    const VecN &b = P.target(k);
    const double ball = 0.5 * std::min(norm(a), norm(b));
    std::size_t self_b = m + static_cast<std::size_t>(P.sigma[k]);

    struct Verdict {
      bool ok;
      std::string binding;
      double origin, path;
    };
    auto judge = [&](const geom::Polyline &cand) -> Verdict {
      double origin = std::numeric_limits<double>::infinity();
      if (ball > 0) {
        origin = geom::point_polyline_distance(VecN(n), cand) - ball;
        if (!(origin > 0)) return {false, "origin ball of radius " + std::to_string(ball), origin, 0};
      }
      for (std::size_t i = 0; i < marked.size(); ++i) {
        if (i == k || i == self_b) continue;
        if (!(geom::point_polyline_distance(marked[i], cand) >= delta / 4))
          return {false, "clearance delta/4 to marked point " + std::to_string(i), origin, 0};
      }
      double pc = std::numeric_limits<double>::infinity();
      for (const auto &q : paths) pc = std::min(pc, geom::polyline_distance(cand, q));
      if (!(pc >= path_gap) || !(pc > cfg.min_clearance))
        return {false, "clearance to earlier paths (" + std::to_string(pc) + ")", origin, pc};
      return {true, "", origin, pc};
    };

    geom::Polyline chosen{a, b};
    Verdict v = judge(chosen);
    int used = 0;
    const double span = std::max(dist(a, b), delta);
    const int lift_axis = static_cast<int>(k % static_cast<std::size_t>(n - 2)) + 2;
    for (int t = 0; !v.ok && t < cfg.max_retries; ++t) {
      VecN dir(n);
      if (t < 4) {
        dir[lift_axis] = (t % 2 == 0) ? 1.0 : -1.0;
      } else {
        dir = detail::random_unit(n, rng);
      }
      double height = span * (0.6 + 0.35 * (t / 2)) + static_cast<double>(k) * delta / 64;
      VecN mid = 0.5 * (a + b) + height * dir;
      geom::Polyline cand{a, mid, b};
      Verdict cv = judge(cand);
      used = t + 1;
      if (cv.ok) {
        chosen = std::move(cand);
        v = cv;
      } else {
        v.binding = cv.binding;
      }
    }
    if (!v.ok)
      throw ConstructionError("extend (dim " + std::to_string(n) + "): could not route pair " + std::to_string(k) +
                              " after " + std::to_string(cfg.max_retries) + " detours; binding constraint: " +
                              v.binding);
    res.min_origin_clearance = std::min(res.min_origin_clearance, v.origin);
    res.min_path_clearance = std::min(res.min_path_clearance, v.path);
    res.attempts = std::max(res.attempts, used + 1);
    paths.push_back(std::move(chosen));
  }

  std::vector<Move> all;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<VecN> others;
    for (std::size_t i = 0; i < marked.size(); ++i)
      if (i != k && i != m + static_cast<std::size_t>(P.sigma[k])) others.push_back(marked[i]);
    auto chain = slide_chain(paths[k], others, std::max(1.0, geom::polyline_length(paths[k])));
    res.slides += chain.size();
    all.insert(all.end(), chain.begin(), chain.end());
  }
  res.homeo = Homeo(n, std::move(all));
  return res;
}

// Plane: every point first slides along u to the corner
// a + ((b - a).u) u, then all points slide along u-perp to their targets.
// Shears of parallel tubes add, so a point picks up at most one product of
// two large shears.
struct TwoPhaseLeg {
  std::vector<TubeSlide> pieces;  // collinear, run in order
  VecN from, to;
  double clearance = 0, condition = 0;
  // Only obstacles within `reach` of [from, to], extended by 2.2 |to - from|
  // at both ends, can change the fit.
  double reach = 0;
};

/// Pieces for a leg from a to b. A single tube is kept unless its condition
/// exceeds `target`; then the leg is cut around the obstacle nearest to the
/// segment into a short narrow piece passing it and wider pieces before and
/// after, and the cut is kept when its worst piece is better conditioned.
/// Every piece's caps reach across the rest of the leg, so the squeeze of
/// the material ahead of the point telescopes as for a single tube.
inline TwoPhaseLeg fit_leg(const VecN &a, const VecN &b, const std::vector<VecN> &obstacles, double max_radius,
                           double target) {
  TwoPhaseLeg leg;
  leg.from = a;
  leg.to = b;
  const double L = dist(a, b);
  std::size_t nearest = obstacles.size();
  leg.clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    double d = geom::point_segment_distance(obstacles[i], a, b);
    if (d < leg.clearance) {
      leg.clearance = d;
      nearest = i;
    }
  }
  // Caps reach at most L beyond either end of the leg, so a fit only sees
  // obstacles within its reach of the leg's line near the leg.
  leg.reach = std::min(leg.clearance, 1.1 * max_radius);
  if (!(leg.clearance > 0)) {
    leg.pieces = {TubeSlide{a, b, 1, 0, 1, 1}};
    leg.condition = std::numeric_limits<double>::infinity();
    return leg;
  }
  leg.pieces = {fit_tube(a, b, obstacles, max_radius)};
  leg.condition = slide_condition(leg.pieces[0]);
  if (leg.condition <= target || nearest == obstacles.size()) return leg;

  const VecN e = (1.0 / L) * (b - a);
  auto try_cuts = [&](std::vector<double> cuts) {
    std::erase_if(cuts, [&](double c) { return !(c > 1e-3 * L && c < (1 - 1e-3) * L); });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.empty()) return;
    cuts.insert(cuts.begin(), 0.0);
    cuts.push_back(L);
    std::vector<TubeSlide> pieces;
    double cond = 0, reach = leg.reach;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      VecN p = i == 0 ? a : a + cuts[i] * e;
      VecN q = i + 2 == cuts.size() ? b : a + cuts[i + 1] * e;
      double len = cuts[i + 1] - cuts[i];
      double piece_clear = std::numeric_limits<double>::infinity();
      for (const VecN &o : obstacles) piece_clear = std::min(piece_clear, geom::point_segment_distance(o, p, q));
      reach = std::max(reach, std::min(piece_clear, 1.1 * std::max(1.0, len)));
      pieces.push_back(fit_tube(p, q, obstacles, std::max(1.0, len), cuts[i] + len, L - cuts[i + 1] + len));
      cond = std::max(cond, slide_condition(pieces.back()));
    }
    if (cond < leg.condition) {
      leg.condition = cond;
      leg.pieces = std::move(pieces);
      leg.reach = reach;
    }
  };
  const TubeSlide single = leg.pieces[0];
  const double s_o = std::clamp(dot(obstacles[nearest] - a, e), 0.0, L);
  const double lb = std::sqrt(L * single.cap_back), lf = std::sqrt(L * single.cap_front);
  for (double scale : {0.5, 1.0, 2.0}) {
    double half = scale * std::sqrt(L * leg.clearance) / 2;
    try_cuts({s_o - half, s_o + half});
    try_cuts({scale * lb, L - scale * lf});
    try_cuts({scale * lb, s_o - half, s_o + half, L - scale * lf});
  }
  return leg;
}

// Legs whose single tube is worse conditioned than this are split.
constexpr double kSplitTarget = 256;

inline bool leg_affected_by(const TwoPhaseLeg &leg, const VecN &p) {
  VecN ext = 2.2 * (leg.to - leg.from);
  return geom::point_segment_distance(p, leg.from - ext, leg.to + ext) <= 1.001 * leg.reach;
}

struct TwoPhasePlan {
  std::vector<TwoPhaseLeg> legs;
  std::size_t first_phase_legs = 0;
  double score = std::numeric_limits<double>::infinity();  // largest leg condition
  double min_clearance = std::numeric_limits<double>::infinity();
};

/// Legs of the two-phase plan for direction phi. With `greedy` each phase
/// repeatedly runs the best-conditioned remaining leg given the current
/// positions; otherwise legs run in index order.
inline TwoPhasePlan plan_two_phase(const ExtensionProblem &P, double phi, bool greedy) {
  const std::size_t m = P.A.points.size();
  const VecN u{std::cos(phi), std::sin(phi)};
  std::vector<VecN> cur = P.A.points, corner(m);
  for (std::size_t k = 0; k < m; ++k) corner[k] = cur[k] + dot(P.target(k) - cur[k], u) * u;
  TwoPhasePlan plan;
  auto others_of = [&](std::size_t k) {
    std::vector<VecN> out;
    for (std::size_t j = 0; j < m; ++j)
      if (j != k) out.push_back(cur[j]);
    return out;
  };
  auto fit = [&](std::size_t k, const VecN &to) {
    return fit_leg(cur[k], to, others_of(k), std::max(1.0, dist(cur[k], to)), kSplitTarget);
  };
  for (int phase = 0; phase < 2; ++phase) {
    auto dest = [&](std::size_t k) { return phase == 0 ? corner[k] : P.target(k); };
    auto commit = [&](std::size_t k, TwoPhaseLeg leg) {
      cur[k] = dest(k);
      plan.min_clearance = std::min(plan.min_clearance, leg.clearance);
      plan.legs.push_back(std::move(leg));
    };
    if (!greedy) {
      for (std::size_t k = 0; k < m; ++k)
        if (dist(cur[k], dest(k)) > 0) commit(k, fit(k, dest(k)));
      if (phase == 0) plan.first_phase_legs = plan.legs.size();
      continue;
    }
    std::vector<std::size_t> pending;
    std::vector<TwoPhaseLeg> cache;
    for (std::size_t k = 0; k < m; ++k)
      if (dist(cur[k], dest(k)) > 0) {
        pending.push_back(k);
        cache.push_back(fit(k, dest(k)));
      }
    while (!pending.empty()) {
      std::size_t pick = 0;
      for (std::size_t i = 1; i < pending.size(); ++i)
        if (cache[i].condition < cache[pick].condition) pick = i;
      std::size_t k = pending[pick];
      TwoPhaseLeg leg = std::move(cache[pick]);
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
      cache.erase(cache.begin() + static_cast<std::ptrdiff_t>(pick));
      const VecN from = cur[k];
      commit(k, std::move(leg));
      for (std::size_t i = 0; i < pending.size(); ++i)
        if (leg_affected_by(cache[i], from) || leg_affected_by(cache[i], cur[k]))
          cache[i] = fit(pending[i], dest(pending[i]));
    }
    if (phase == 0) plan.first_phase_legs = plan.legs.size();
  }
  plan.score = 0;
  for (const auto &l : plan.legs) plan.score = std::max(plan.score, l.condition);
  return plan;
}

inline Homeo plan_homeo(const TwoPhasePlan &plan) {
  std::vector<Move> all;
  for (const TwoPhaseLeg &leg : plan.legs) all.insert(all.end(), leg.pieces.begin(), leg.pieces.end());
  return Homeo(2, std::move(all));
}

/// Sweep directions phi = (i + 1/2) pi / 64, i < 32, are ranked by their
/// worst leg condition with legs in index order; the best one is then
/// replanned with greedy leg order.
inline ExtensionResult extend_plane_two_phase(const ExtensionProblem &P, const Config &cfg) {
  constexpr int kDirections = 32;
  double best_score = std::numeric_limits<double>::infinity(), best_phi = 0;
  for (int i = 0; i < kDirections; ++i) {
    double phi = std::numbers::pi / 2 * (i + 0.5) / kDirections;
    double score = plan_two_phase(P, phi, false).score;
    if (score < best_score) {
      best_score = score;
      best_phi = phi;
    }
  }
  TwoPhasePlan best = plan_two_phase(P, best_phi, true);
  if (!(best.min_clearance > cfg.min_clearance))
    throw ConstructionError("extend (plane): smallest leg clearance " + std::to_string(best.min_clearance) +
                            " is not above min_clearance " + std::to_string(cfg.min_clearance));
  ExtensionResult res{plan_homeo(best)};
  res.slides = res.homeo.size();
  res.min_path_clearance = best.min_clearance;
  res.attempts = 1;
  return res;
}

}  // namespace detail

/// Homeomorphism h of R^dim with h(A[i]) = B[sigma[i]]. Throws
/// std::invalid_argument for malformed problems and ConstructionError when
/// routing runs out of retries.
inline ExtensionResult extend_bijection(const ExtensionProblem &P, const Config &cfg) {
  P.validate();
  if (detail::is_identity_problem(P)) return ExtensionResult{Homeo(P.dim)};
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  double delta = detail::union_delta(P);
  if (auto pre = detail::separate_a_from_b(P, delta, rng)) {
    ExtensionProblem moved = P;
    for (VecN &a : moved.A.points) a = pre->apply(a);
    moved.A = MarkedSet::from_points(moved.A.points);
    ExtensionResult rest = extend_bijection(moved, cfg);
    rest.homeo = then(*pre, rest.homeo);
    return rest;
  }
  if (P.dim > 2) return detail::extend_space_disjoint(P, cfg);
  return cfg.plane_strategy == PlaneStrategy::rays ? detail::extend_plane_disjoint(P, cfg)
                                                   : detail::extend_plane_two_phase(P, cfg);
}

inline ExtensionResult extend_bijection_r2(const ExtensionProblem &P, const Config &cfg = {}) {
  if (P.dim != 2) throw std::invalid_argument("extend_bijection_r2: dim must be 2");
  return extend_bijection(P, cfg);
}

inline ExtensionResult extend_bijection_rn(const ExtensionProblem &P, const Config &cfg = {}) {
  if (P.dim < 3) throw std::invalid_argument("extend_bijection_rn: dim must be >= 3");
  return extend_bijection(P, cfg);
}

/// Random instance: 2m points uniform in the ball of radius `radius`, at least
/// delta apart and at least delta from the origin, with a random sigma.
inline ExtensionProblem random_instance(int dim, std::size_t m, double delta, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<VecN> pts;
  std::size_t tries = 0;
  while (pts.size() < 2 * m) {
    if (++tries > 10000000) throw std::invalid_argument("random_instance: packing too dense");
    VecN p(dim);
    for (int i = 0; i < dim; ++i) p[i] = u(rng);
    if (norm(p) > radius || norm(p) < delta) continue;
    if (std::all_of(pts.begin(), pts.end(), [&](const VecN &q) { return dist(p, q) >= delta; })) pts.push_back(p);
  }
  ExtensionProblem P;
  P.dim = dim;
  P.A = MarkedSet::from_points({pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(m)});
  P.B = MarkedSet::from_points({pts.begin() + static_cast<std::ptrdiff_t>(m), pts.end()});
  P.sigma.resize(m);
  std::iota(P.sigma.begin(), P.sigma.end(), 0);
  std::shuffle(P.sigma.begin(), P.sigma.end(), rng);
  return P;
}

}  // namespace dhlab
