// SPDX-License-Identifier: Apache-2.0
//
// Primitive self-homeomorphisms of R^n ("moves") and their ordered
// composites. Every move is the identity outside a bounded support, except a
// RadialStretch with a shift tail, which is a pure radial shift far out.
//
// Tapers are piecewise linear. Twists, pushes and slides take a `core`:
// inside it the taper is exactly 1, so the move is a rigid rotation or a
// translation there, and marked points are always placed in cores.
//
// Move parameters and the public API are binary64. A Homeo evaluates its
// whole move list in extended precision (long double) and rounds once at the
// end: the constructions stack thin twists and long tube slides, whose
// shears would otherwise amplify per-move rounding past the tolerances.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dhlab {

constexpr int kMaxDim = 8;

/// Point of R^n, 1 <= n <= kMaxDim, stored inline.
template <class T>
class BasicVec {
public:
  using value_type = T;

  BasicVec() = default;
  explicit BasicVec(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("VecN: unsupported dimension " + std::to_string(dim));
  }
  BasicVec(std::initializer_list<T> xs) : BasicVec(static_cast<int>(xs.size())) {
    std::copy(xs.begin(), xs.end(), c_.begin());
  }
  static BasicVec from(const std::vector<T> &xs) {
    BasicVec v(static_cast<int>(xs.size()));
    std::copy(xs.begin(), xs.end(), v.c_.begin());
    return v;
  }
  template <class U>
  static BasicVec cast(const BasicVec<U> &o) {
    BasicVec v(o.dim());
    for (int i = 0; i < o.dim(); ++i) v[i] = static_cast<T>(o[i]);
    return v;
  }

  int dim() const { return dim_; }
  T &operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  T operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const T *begin() const { return c_.data(); }
  const T *end() const { return c_.data() + dim_; }
  std::vector<T> to_vector() const { return {begin(), end()}; }

  bool finite() const {
    return std::all_of(begin(), end(), [](T x) { return std::isfinite(x); });
  }

  BasicVec &operator+=(const BasicVec &o) { for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i]; return *this; }
  BasicVec &operator-=(const BasicVec &o) { for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i]; return *this; }
  BasicVec &operator*=(T s) { for (int i = 0; i < dim_; ++i) c_[i] *= s; return *this; }
  friend BasicVec operator+(BasicVec a, const BasicVec &b) { return a += b; }
  friend BasicVec operator-(BasicVec a, const BasicVec &b) { return a -= b; }
  friend BasicVec operator*(T s, BasicVec a) { return a *= s; }
  friend BasicVec operator*(BasicVec a, T s) { return a *= s; }
  friend bool operator==(const BasicVec &a, const BasicVec &b) {
    return a.dim_ == b.dim_ && std::equal(a.begin(), a.end(), b.begin());
  }

private:
  int dim_ = 0;
  std::array<T, kMaxDim> c_{};
};

using VecN = BasicVec<double>;
using XVec = BasicVec<long double>;

template <class T>
T dot(const BasicVec<T> &a, const BasicVec<T> &b) {
  T s = 0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}
template <class T>
T norm(const BasicVec<T> &a) {
  if (a.dim() == 2) return std::hypot(a[0], a[1]);
  return std::sqrt(dot(a, a));
}
template <class T>
T dist(const BasicVec<T> &a, const BasicVec<T> &b) {
  return norm(a - b);
}

/// Rotation about the origin in the plane, angle theta*taper(rho) with
/// taper = clamp((w - |rho - r|) / (w - core), 0, 1). Support: the annulus
/// r - w <= rho <= r + w. Exact inverse: negate theta.
struct AnnulusTwist {
  double r = 1, w = 0.5, theta = 0, core = 0;
};

/// p -> (psi(|p|) / |p|) p with psi piecewise linear through the knots.
/// Knots start at (0, 0) and increase strictly in both coordinates. With an
/// identity tail the last knot satisfies psi = rho and the move is the
/// identity beyond it; with a shift tail psi continues with slope 1.
struct RadialStretch {
  std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
  bool shift_tail = false;

  double tail_shift() const { return shift_tail ? knots.back().second - knots.back().first : 0.0; }
};

/// p -> p + taper(|p - center|) v with taper = clamp((R - d) / (R - core), 0, 1).
/// Injective because the perturbation is Lipschitz with constant
/// |v| / (R - core) < 1. With `inverse` set the move denotes the inverse map.
struct BallPush {
  VecN center;
  double R = 1;
  VecN v;
  double core = 0;
  bool inverse = false;
};

/// Slides material along the segment [a, b] inside a capped cylinder. With
/// e = (b - a)/L, s = (p - a).e and transverse distance t, the axial
/// coordinate is remapped by the piecewise linear homeomorphism through
/// (-cap_back, -cap_back), (0, lam L), (L + cap_front, L + cap_front) with
/// lam = clamp((radius - t) / (radius - core), 0, 1); t is unchanged. The
/// axis point a goes to b. Support: t < radius, -cap_back < s < L + cap_front.
struct TubeSlide {
  VecN a, b;
  double radius = 1, core = 0, cap_back = 1, cap_front = 1;
  bool inverse = false;
};

using Move = std::variant<AnnulusTwist, RadialStretch, BallPush, TubeSlide>;

struct MoveTolerances {
  double invert_step = 1e-13;  // relative to max(1, |q|)
  int invert_cap = 200;
};

namespace moves {

inline int move_dim(const Move &m) {
  if (const auto *b = std::get_if<BallPush>(&m)) return b->center.dim();
  if (const auto *t = std::get_if<TubeSlide>(&m)) return t->a.dim();
  if (std::holds_alternative<AnnulusTwist>(m)) return 2;
  return 0;  // radial stretches work in every dimension
}

inline void validate(const Move &m, int dim) {
  auto fail = [](const std::string &s) { throw std::invalid_argument(s); };
  if (const auto *t = std::get_if<AnnulusTwist>(&m)) {
    if (dim != 2) fail("annulus_twist needs dim 2");
    if (!(t->r > 0) || !(t->w > 0) || !(t->w < t->r)) fail("annulus_twist: need 0 < w < r");
    if (!(t->core >= 0) || !(t->core < t->w)) fail("annulus_twist: need 0 <= core < w");
    if (!std::isfinite(t->theta) || !std::isfinite(t->r)) fail("annulus_twist: parameters must be finite");
  } else if (const auto *s = std::get_if<RadialStretch>(&m)) {
    const auto &k = s->knots;
    if (k.empty() || k[0].first != 0.0 || k[0].second != 0.0) fail("radial_stretch: first knot must be (0, 0)");
    for (std::size_t i = 1; i < k.size(); ++i)
      if (!(k[i].first > k[i - 1].first) || !(k[i].second > k[i - 1].second) || !std::isfinite(k[i].first) ||
          !std::isfinite(k[i].second))
        fail("radial_stretch: knots must be strictly increasing");
    if (!s->shift_tail && k.back().first != k.back().second)
      fail("radial_stretch: identity tail needs psi = rho at the last knot");
  } else if (const auto *t = std::get_if<TubeSlide>(&m)) {
    if (t->a.dim() != dim || t->b.dim() != dim) fail("tube_slide: dimension mismatch");
    if (!t->a.finite() || !t->b.finite()) fail("tube_slide: non-finite coordinates");
    if (!(dist(t->a, t->b) > 0)) fail("tube_slide: need a != b");
    if (!(t->radius > 0) || !std::isfinite(t->radius) || !(t->core >= 0) || !(t->core < t->radius))
      fail("tube_slide: need 0 <= core < radius");
    if (!(t->cap_back > 0) || !std::isfinite(t->cap_back) || !(t->cap_front > 0) || !std::isfinite(t->cap_front))
      fail("tube_slide: need caps > 0");
  } else {
    const auto &b = std::get<BallPush>(m);
    if (b.center.dim() != dim || b.v.dim() != dim) fail("ball_push: dimension mismatch");
    if (!b.center.finite() || !b.v.finite()) fail("ball_push: non-finite coordinates");
    if (!(b.R > 0) || !std::isfinite(b.R) || !(b.core >= 0) || !(b.core < b.R)) fail("ball_push: need 0 <= core < R");
    if (!(norm(b.v) < b.R - b.core)) fail("ball_push: need |v| < R - core");
  }
}

template <class T>
T twist_taper(const AnnulusTwist &t, T rho) {
  T d = std::abs(rho - T(t.r));
  if (d >= T(t.w)) return 0;
  if (d <= T(t.core)) return 1;
  return (T(t.w) - d) / (T(t.w) - T(t.core));
}

template <class T>
BasicVec<T> twist(const AnnulusTwist &t, const BasicVec<T> &p, double sign) {
  T taper = twist_taper(t, std::hypot(p[0], p[1]));
  if (taper == 0) return p;
  T a = T(sign) * T(t.theta) * taper;
  T c = std::cos(a), s = std::sin(a);
  return BasicVec<T>{c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

template <class T>
T pl_eval(const std::vector<std::pair<double, double>> &k, T x, bool swap) {
  auto in = [&](std::size_t i) { return T(swap ? k[i].second : k[i].first); };
  auto out = [&](std::size_t i) { return T(swap ? k[i].first : k[i].second); };
  std::size_t lo = 0, hi = k.size() - 1;
  if (x >= in(hi)) return out(hi) + (x - in(hi));
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    (in(mid) <= x ? lo : hi) = mid;
  }
  if (x == in(lo)) return out(lo);
  T f = (x - in(lo)) / (in(hi) - in(lo));
  return out(lo) + f * (out(hi) - out(lo));
}

template <class T>
BasicVec<T> stretch(const RadialStretch &s, const BasicVec<T> &p, bool inverse) {
  T rho = norm(p);
  if (rho == 0) return p;
  T target = pl_eval(s.knots, rho, inverse);
  if (target == rho) return p;
  return p * (target / rho);
}

template <class T>
T push_taper(const BallPush &b, T d) {
  if (d >= T(b.R)) return 0;
  if (d <= T(b.core)) return 1;
  return (T(b.R) - d) / (T(b.R) - T(b.core));
}

template <class T>
BasicVec<T> push_forward(const BallPush &b, const BasicVec<T> &p) {
  auto c = BasicVec<T>::cast(b.center);
  T taper = push_taper(b, dist(p, c));
  if (taper == 0) return p;
  return p + taper * BasicVec<T>::cast(b.v);
}

/// Unique p with push_forward(b, p) = q, by the contraction p <- q - taper(p) v.
template <class T>
BasicVec<T> push_backward(const BallPush &b, const BasicVec<T> &q, const MoveTolerances &tol = {}) {
  auto c = BasicVec<T>::cast(b.center);
  auto v = BasicVec<T>::cast(b.v);
  if (dist(q, c) >= T(b.R)) return q;
  BasicVec<T> shifted = q - v;
  if (dist(shifted, c) <= T(b.core)) return shifted;
  // Once the step is below the tolerance, a few more contractions take the
  // iterate to rounding level.
  T stop = T(tol.invert_step) * std::max(T(1), norm(q));
  BasicVec<T> p = q;
  int polish = -1;
  for (int it = 0; it < tol.invert_cap; ++it) {
    BasicVec<T> next = q - push_taper(b, dist(p, c)) * v;
    T step = dist(next, p);
    p = next;
    if (step == 0) return p;
    if (polish < 0 && step < stop) polish = 0;
    if (polish >= 0 && ++polish > 3) return p;
  }
  throw std::runtime_error("ball_push inverse did not converge (|v|/(R - core) too close to 1)");
}

template <class T>
BasicVec<T> slide(const TubeSlide &t, const BasicVec<T> &p, bool backward) {
  auto a = BasicVec<T>::cast(t.a), b = BasicVec<T>::cast(t.b);
  T L = dist(a, b);
  BasicVec<T> e = (T(1) / L) * (b - a);
  BasicVec<T> d = p - a;
  T s = dot(d, e), cap = T(t.cap_back);
  T end = L + T(t.cap_front);
  if (!(s > -cap) || !(s < end)) return p;
  T tr = norm(d - s * e);
  if (tr >= T(t.radius)) return p;
  T lam = tr <= T(t.core) ? T(1) : (T(t.radius) - tr) / (T(t.radius) - T(t.core));
  T mid = lam * L;
  T out;
  if (!backward) {
    out = s <= 0 ? -cap + (s + cap) * ((mid + cap) / cap) : mid + s * ((end - mid) / end);
  } else {
    out = s <= mid ? -cap + (s + cap) * (cap / (mid + cap)) : (s - mid) * (end / (end - mid));
  }
  return p + (out - s) * e;
}

/// Applies m (or its inverse) to p.
template <class T>
BasicVec<T> apply(const Move &m, const BasicVec<T> &p, bool inverse = false, const MoveTolerances &tol = {}) {
  if (const auto *t = std::get_if<AnnulusTwist>(&m)) return twist(*t, p, inverse ? -1.0 : 1.0);
  if (const auto *s = std::get_if<RadialStretch>(&m)) return stretch(*s, p, inverse);
  if (const auto *t = std::get_if<TubeSlide>(&m)) return slide(*t, p, inverse != t->inverse);
  const auto &b = std::get<BallPush>(m);
  return (inverse != b.inverse) ? push_backward(b, p, tol) : push_forward(b, p);
}

inline Move inverse(const Move &m) {
  if (const auto *t = std::get_if<AnnulusTwist>(&m)) {
    AnnulusTwist out = *t;
    out.theta = -out.theta;
    return out;
  }
  if (const auto *s = std::get_if<RadialStretch>(&m)) {
    RadialStretch out = *s;
    for (auto &k : out.knots) std::swap(k.first, k.second);
    return out;
  }
  if (const auto *t = std::get_if<TubeSlide>(&m)) {
    TubeSlide out = *t;
    out.inverse = !out.inverse;
    return out;
  }
  BallPush out = std::get<BallPush>(m);
  out.inverse = !out.inverse;
  return out;
}

inline double slide_reach(const TubeSlide &t) { return std::hypot(t.radius, std::max(t.cap_back, t.cap_front)); }

/// Input radius beyond which m is the identity or (for a shift tail) a pure
/// radial shift.
inline double support_radius(const Move &m) {
  if (const auto *t = std::get_if<AnnulusTwist>(&m)) return t->r + t->w;
  if (const auto *s = std::get_if<RadialStretch>(&m)) return s->knots.back().first;  // pure shift beyond
  if (const auto *t = std::get_if<TubeSlide>(&m)) return std::max(norm(t->a), norm(t->b)) + slide_reach(*t);
  const auto &b = std::get<BallPush>(m);
  return norm(b.center) + b.R;
}

inline double tail_shift(const Move &m) {
  if (const auto *s = std::get_if<RadialStretch>(&m)) return s->tail_shift();
  return 0.0;
}

}  // namespace moves

struct SupportInfo {
  double radius = 0;      // beyond this, the map is p -> p + tail_shift * p/|p|
  double tail_shift = 0;
};

/// Ordered composite m_1, then m_2, ... Immutable; evaluation is indexed by a
/// tree of support bounds over consecutive move ranges, so a point only pays
/// for moves whose supports it can actually reach.
class Homeo {
public:
  explicit Homeo(int dim = 2) : dim_(dim) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("Homeo: dimension must be in [2, 8]");
    build_index();
  }
  Homeo(int dim, std::vector<Move> moves, MoveTolerances tol = {}) : dim_(dim), moves_(std::move(moves)), tol_(tol) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("Homeo: dimension must be in [2, 8]");
    for (const Move &m : moves_) moves::validate(m, dim_);
    build_index();
  }

  /// Skips move validation. Test fixtures only: lets a non-injective move
  /// into a composite so the verifier's negative controls have something to
  /// catch.
  static Homeo unchecked(int dim, std::vector<Move> moves, MoveTolerances tol = {}) {
    Homeo h(dim);
    h.moves_ = std::move(moves);
    h.tol_ = tol;
    h.build_index();
    return h;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return moves_.size(); }
  bool empty() const { return moves_.empty(); }
  const std::vector<Move> &moves() const { return moves_; }
  const MoveTolerances &tolerances() const { return tol_; }

  VecN apply(const VecN &p) const { return VecN::cast(apply_x(XVec::cast(p))); }
  VecN apply_inverse(const VecN &q) const { return VecN::cast(apply_inverse_x(XVec::cast(q))); }

  XVec apply_x(XVec p) const {
    check_dim(p.dim());
    if (!nodes_.empty()) visit(0, p, false);
    return p;
  }
  XVec apply_inverse_x(XVec q) const {
    check_dim(q.dim());
    if (!nodes_.empty()) visit(0, q, true);
    return q;
  }

  /// Reference evaluation in binary64, move by move, without the index.
  VecN apply_linear(VecN p) const {
    check_dim(p.dim());
    for (const Move &m : moves_) p = moves::apply(m, p, false, tol_);
    return p;
  }

  SupportInfo support() const {
    SupportInfo info;
    double tail = 0;
    for (const Move &m : moves_) {
      info.radius = std::max(info.radius, moves::support_radius(m) - tail);
      tail += moves::tail_shift(m);
    }
    info.tail_shift = tail;
    return info;
  }
  double support_bound() const { return support().radius; }

  friend Homeo compose(const Homeo &h, const Move &m) {
    auto ms = h.moves_;
    ms.push_back(m);
    return Homeo(h.dim_, std::move(ms), h.tol_);
  }
  /// a, then b.
  friend Homeo then(const Homeo &a, const Homeo &b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("then: dimension mismatch");
    auto ms = a.moves_;
    ms.insert(ms.end(), b.moves_.begin(), b.moves_.end());
    return Homeo(a.dim_, std::move(ms), a.tol_);
  }
  friend Homeo inverse(const Homeo &h) {
    std::vector<Move> ms;
    ms.reserve(h.moves_.size());
    for (auto it = h.moves_.rbegin(); it != h.moves_.rend(); ++it) ms.push_back(moves::inverse(*it));
    return Homeo(h.dim_, std::move(ms), h.tol_);
  }

private:
  struct Node {
    std::array<double, kMaxDim> lo, hi;
    double rlo, rhi;
    bool always;
    std::size_t first, last;  // move range [first, last)
    int left = -1, right = -1;
  };

  void check_dim(int d) const {
    if (d != dim_)
      throw std::invalid_argument("Homeo: point has dim " + std::to_string(d) + ", expected " + std::to_string(dim_));
  }

  Node leaf_node(std::size_t i) const {
    Node n{};
    n.first = i;
    n.last = i + 1;
    n.always = false;
    const Move &m = moves_[i];
    const double inf = std::numeric_limits<double>::infinity();
    auto box = [&](const VecN *c, double rad) {
      double cn = c ? norm(*c) : 0.0;
      double margin = 1e-9 * (1.0 + rad + cn);
      for (int d = 0; d < dim_; ++d) {
        double mid = c ? (*c)[d] : 0.0;
        n.lo[static_cast<std::size_t>(d)] = mid - rad - margin;
        n.hi[static_cast<std::size_t>(d)] = mid + rad + margin;
      }
      n.rlo = std::max(0.0, cn - rad) - margin;
      n.rhi = cn + rad + margin;
    };
    if (const auto *t = std::get_if<AnnulusTwist>(&m)) {
      box(nullptr, t->r + t->w);
      n.rlo = t->r - t->w - 1e-9 * (1.0 + t->r);
    } else if (const auto *s = std::get_if<RadialStretch>(&m)) {
      if (s->shift_tail) {
        n.always = true;
        n.lo.fill(-inf);
        n.hi.fill(inf);
        n.rlo = -inf;
        n.rhi = inf;
      } else {
        box(nullptr, s->knots.back().first);
      }
    } else if (const auto *t = std::get_if<TubeSlide>(&m)) {
      double reach = moves::slide_reach(*t);
      double margin = 1e-9 * (1.0 + reach + norm(t->a) + norm(t->b));
      for (int d = 0; d < dim_; ++d) {
        auto ud = static_cast<std::size_t>(d);
        n.lo[ud] = std::min(t->a[d], t->b[d]) - reach - margin;
        n.hi[ud] = std::max(t->a[d], t->b[d]) + reach + margin;
      }
      // nearest point of the segment to the origin
      VecN ab = t->b - t->a;
      double u = std::clamp(-dot(t->a, ab) / dot(ab, ab), 0.0, 1.0);
      n.rlo = norm(t->a + u * ab) - reach - margin;
      n.rhi = std::max(norm(t->a), norm(t->b)) + reach + margin;
    } else {
      const auto &b = std::get<BallPush>(m);
      box(&b.center, b.R);
    }
    return n;
  }

  int build(std::size_t first, std::size_t last) {
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (last - first == 1) {
      nodes_[static_cast<std::size_t>(id)] = leaf_node(first);
      return id;
    }
    std::size_t mid = first + (last - first) / 2;
    int l = build(first, mid), r = build(mid, last);
    Node n{};
    const Node &a = nodes_[static_cast<std::size_t>(l)], &b = nodes_[static_cast<std::size_t>(r)];
    for (std::size_t d = 0; d < kMaxDim; ++d) {
      n.lo[d] = std::min(a.lo[d], b.lo[d]);
      n.hi[d] = std::max(a.hi[d], b.hi[d]);
    }
    n.rlo = std::min(a.rlo, b.rlo);
    n.rhi = std::max(a.rhi, b.rhi);
    n.always = a.always || b.always;
    n.first = first;
    n.last = last;
    n.left = l;
    n.right = r;
    nodes_[static_cast<std::size_t>(id)] = n;
    return id;
  }

  void build_index() {
    nodes_.clear();
    if (moves_.empty()) return;
    nodes_.reserve(2 * moves_.size());
    build(0, moves_.size());
  }

  bool reaches(const Node &n, const XVec &p) const {
    if (n.always) return true;
    for (int d = 0; d < dim_; ++d) {
      auto ud = static_cast<std::size_t>(d);
      if (p[d] < n.lo[ud] || p[d] > n.hi[ud]) return false;
    }
    long double rho = norm(p);
    return rho >= n.rlo && rho <= n.rhi;
  }

  void visit(int id, XVec &p, bool inverse) const {
    const Node &n = nodes_[static_cast<std::size_t>(id)];
    if (!reaches(n, p)) return;
    if (n.left < 0) {
      p = moves::apply(moves_[n.first], p, inverse, tol_);
      return;
    }
    if (inverse) {
      visit(n.right, p, true);
      visit(n.left, p, true);
    } else {
      visit(n.left, p, false);
      visit(n.right, p, false);
    }
  }

  int dim_;
  std::vector<Move> moves_;
  MoveTolerances tol_;
  std::vector<Node> nodes_;
};

}  // namespace dhlab
