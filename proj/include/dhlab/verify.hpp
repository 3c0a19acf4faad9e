// SPDX-License-Identifier: Apache-2.0
//
// Tolerance-based evidence that a Homeo solves an ExtensionProblem.

#pragma once

#include "dhlab/config.hpp"
#include "dhlab/extend.hpp"
#include "dhlab/moves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace dhlab {

/// Deterministic low-discrepancy points in [0, 1)^dim (radical inverses in
/// the first dim prime bases). index starts at 1.
class Halton {
public:
  explicit Halton(int dim) : dim_(dim) {}

  VecN at(std::uint64_t index) const {
    static constexpr std::array<unsigned, kMaxDim> primes{2, 3, 5, 7, 11, 13, 17, 19};
    VecN u(dim_);
    for (int d = 0; d < dim_; ++d) {
      unsigned b = primes[static_cast<std::size_t>(d)];
      double f = 1, r = 0;
      for (std::uint64_t i = index; i > 0; i /= b) {
        f /= b;
        r += f * static_cast<double>(i % b);
      }
      u[d] = r;
    }
    return u;
  }

private:
  int dim_;
};

/// The first `count` Halton points that land in the closed ball of radius
/// `radius` about the origin. Prefixes of a larger request are the smaller
/// request, so error maxima are monotone in the budget.
inline std::vector<VecN> ball_samples(int dim, double radius, std::size_t count) {
  Halton h(dim);
  std::vector<VecN> out;
  out.reserve(count);
  for (std::uint64_t i = 1; out.size() < count; ++i) {
    VecN u = h.at(i);
    VecN p(dim);
    for (int d = 0; d < dim; ++d) p[d] = radius * (2 * u[d] - 1);
    if (norm(p) <= radius) out.push_back(p);
  }
  return out;
}

/// `count` points with radii spread over (lo, hi] and Halton directions.
inline std::vector<VecN> shell_samples(int dim, double lo, double hi, std::size_t count) {
  Halton h(dim + 1);
  std::vector<VecN> out;
  out.reserve(count);
  for (std::uint64_t i = 1; out.size() < count; ++i) {
    VecN u = h.at(i);
    VecN dir(dim);
    for (int d = 0; d < dim; ++d) dir[d] = 2 * u[d + 1] - 1;
    double n = norm(dir);
    if (n > 1 || n < 1e-3) continue;
    double r = hi - (hi - lo) * u[0];  // u in [0, 1) keeps r in (lo, hi]
    out.push_back(dir * (r / n));
  }
  return out;
}

/// Up to `count` Halton points inside the support of m (plus a thin margin
/// around it). They supplement the uniform samples, which rarely land in the
/// thin tubes of a large composite.
inline std::vector<VecN> support_samples(const Move &m, int dim, std::size_t count) {
  std::vector<VecN> out;
  Halton h(dim + 1);
  for (std::uint64_t i = 1; out.size() < count && i < 16 * count + 64; ++i) {
    VecN u = h.at(i);
    if (const auto *t = std::get_if<AnnulusTwist>(&m)) {
      double r = t->r + 1.05 * t->w * (2 * u[0] - 1), phi = 2 * std::numbers::pi * u[1];
      out.push_back(VecN{r * std::cos(phi), r * std::sin(phi)});
      continue;
    }
    VecN c(dim);
    double rad = 0;
    if (const auto *s = std::get_if<RadialStretch>(&m)) {
      rad = 1.05 * std::max(s->knots.back().first, s->knots.back().second);
    } else if (const auto *b = std::get_if<BallPush>(&m)) {
      c = b->center;
      rad = 1.05 * b->R;
    } else {
      const auto &sl = std::get<TubeSlide>(m);
      double L = dist(sl.a, sl.b);
      VecN e = (1.0 / L) * (sl.b - sl.a);
      VecN tr(dim);
      for (int d = 0; d < dim; ++d) tr[d] = 2 * u[d + 1] - 1;
      tr -= dot(tr, e) * e;
      double tn = norm(tr);
      if (tn < 1e-6 || tn > 1) continue;
      double along = -1.05 * sl.cap_back + (L + 1.05 * (sl.cap_back + sl.cap_front)) * u[0];
      out.push_back(sl.a + along * e + (1.05 * sl.radius) * tr);
      continue;
    }
    VecN p(dim);
    for (int d = 0; d < dim; ++d) p[d] = 2 * u[d] - 1;
    if (norm(p) > 1) continue;
    out.push_back(c + rad * p);
  }
  return out;
}

struct VerificationReport {
  double marked_point_max_error = 0;
  double inverse_roundtrip_max_error = 0;
  double support_violation_max = 0;
  bool collision_flag = false;
  std::size_t samples_used = 0;           // uniform ball samples + targeted samples
  std::size_t targeted_samples_used = 0;
  std::size_t exterior_samples_used = 0;
  Tolerances thresholds;
  double support_bound = 0;
  double tail_shift = 0;

  bool marked_ok() const { return marked_point_max_error <= thresholds.marked; }
  bool roundtrip_ok() const { return inverse_roundtrip_max_error <= thresholds.roundtrip; }
  bool support_ok() const { return support_violation_max <= thresholds.support; }
  bool passed() const { return marked_ok() && roundtrip_ok() && support_ok() && !collision_flag; }
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Images closer than `close` whose preimages are at least `apart` apart.
inline bool has_collision(const std::vector<VecN> &src, const std::vector<VecN> &img, double close = 1e-9,
                          double apart = 1e-8) {
  std::vector<std::size_t> idx(img.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return img[a][0] < img[b][0]; });
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size() && img[idx[j]][0] - img[idx[i]][0] < close; ++j)
      if (dist(img[idx[i]], img[idx[j]]) < close && !(dist(src[idx[i]], src[idx[j]]) < apart)) return true;
  return false;
}

}  // namespace detail

/// Checks (a) marked points, (b) h^-1(h(p)) = p on `budget` samples in the
/// ball of radius 2 max(support_bound, 1) plus targeted samples in every
/// move's support, (c) h(p) = p + tail p/|p| on the
/// shell (bound, 2 bound], (d) no two sample images collide. Exceptions from
/// inverse evaluation count as infinite error.
inline VerificationReport verify_homeo(const Homeo &h, const ExtensionProblem &P, const Config &cfg) {
  VerificationReport rep;
  rep.thresholds = cfg.tol;
  SupportInfo sup = h.support();
  rep.support_bound = sup.radius;
  rep.tail_shift = sup.tail_shift;
  const int dim = h.dim();

  for (std::size_t i = 0; i < P.A.points.size(); ++i) {
    try {
      rep.marked_point_max_error = std::max(rep.marked_point_max_error, dist(h.apply(P.A.points[i]), P.target(i)));
    } catch (const std::exception &) {
      rep.marked_point_max_error = detail::kInf;
    }
  }

  const double outer = 2 * std::max(sup.radius, 1.0);
  auto samples = ball_samples(dim, outer, static_cast<std::size_t>(cfg.sample_budget));
  if (!h.empty() && cfg.targeted_samples) {
    std::size_t per_move = std::clamp<std::size_t>(static_cast<std::size_t>(cfg.sample_budget) / h.size(), 4, 64);
    for (const Move &m : h.moves()) {
      auto extra = support_samples(m, dim, per_move);
      rep.targeted_samples_used += extra.size();
      samples.insert(samples.end(), extra.begin(), extra.end());
    }
  }
  std::vector<VecN> images;
  images.reserve(samples.size());
  for (const VecN &p : samples) {
    VecN q = h.apply(p);
    images.push_back(q);
    double err;
    try {
      err = dist(h.apply_inverse(q), p);
    } catch (const std::exception &) {
      err = detail::kInf;
    }
    if (!(err <= rep.inverse_roundtrip_max_error)) rep.inverse_roundtrip_max_error = std::isnan(err) ? detail::kInf : err;
  }
  rep.samples_used = samples.size();
  rep.collision_flag = detail::has_collision(samples, images);

  const double lo = std::max(sup.radius, 1e-3);
  for (const VecN &p : shell_samples(dim, lo, 2 * lo, static_cast<std::size_t>(cfg.exterior_samples))) {
    VecN expect = sup.tail_shift == 0 ? p : p + (sup.tail_shift / norm(p)) * p;
    double dev = dist(h.apply(p), expect);
    if (!(dev <= rep.support_violation_max)) rep.support_violation_max = std::isnan(dev) ? detail::kInf : dev;
    ++rep.exterior_samples_used;
  }
  return rep;
}

}  // namespace dhlab
