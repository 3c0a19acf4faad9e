// SPDX-License-Identifier: Apache-2.0

#include "dhlab/moves.hpp"
#include "dhlab/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dhlab;

namespace {

constexpr double kPi = std::numbers::pi;

VecN apply1(const Move &m, const VecN &p) { return Homeo(p.dim(), {m}).apply(p); }
VecN invert1(const Move &m, const VecN &q) { return Homeo(q.dim(), {m}).apply_inverse(q); }

std::vector<Move> sample_moves() {
  RadialStretch s;
  s.knots = {{0, 0}, {0.7, 1}, {1.9, 2}, {3.2, 3}};
  s.shift_tail = true;
  return {
      AnnulusTwist{1.0, 0.5, kPi, 0.0},
      AnnulusTwist{3.0, 0.2, -2.0, 0.05},
      BallPush{VecN{0.5, -0.5}, 1.0, VecN{0.4, 0.1}, 0.0, false},
      BallPush{VecN{0.0, 0.0}, 2.0, VecN{0.5, 0.5}, 0.5, false},
      s,
      TubeSlide{VecN{-1.0, 0.0}, VecN{1.5, 0.5}, 0.3, 0.01, 0.5, 0.8, false},
  };
}

}  // namespace

TEST(Moves, AnnulusTwistExamples) {
  AnnulusTwist t{1.0, 0.5, kPi, 0.0};
  VecN q = apply1(t, VecN{1.0, 0.0});
  EXPECT_NEAR(q[0], -1.0, 1e-12);
  EXPECT_NEAR(q[1], 0.0, 1e-12);
  AnnulusTwist t2{2.0, 0.5, 0.7, 0.1};
  double phi = 0.3;
  VecN p{2 * std::cos(phi), 2 * std::sin(phi)};
  VecN r = apply1(t2, p);
  EXPECT_NEAR(std::atan2(r[1], r[0]), phi + 0.7, 1e-12);
  EXPECT_EQ(apply1(t2, VecN{2.6, 0.0}), (VecN{2.6, 0.0}));
  EXPECT_EQ(apply1(t2, VecN{0.0, 1.5}), (VecN{0.0, 1.5}));
}

TEST(Moves, BallPushExamples) {
  BallPush b{VecN{0.0, 0.0}, 1.0, VecN{0.5, 0.0}, 0.0, false};
  EXPECT_EQ(apply1(b, VecN{2.0, 0.0}), (VecN{2.0, 0.0}));
  EXPECT_EQ(apply1(b, VecN{0.0, 0.0}), (VecN{0.5, 0.0}));
  VecN q = apply1(b, VecN{0.5, 0.0});
  EXPECT_NEAR(q[0], 0.75, 1e-15);
  EXPECT_NEAR(q[1], 0.0, 1e-15);
  EXPECT_EQ(invert1(b, VecN{3.0, 1.0}), (VecN{3.0, 1.0}));
  VecN c = invert1(b, VecN{0.5, 0.0});
  EXPECT_NEAR(c[0], 0.0, 1e-13);
  EXPECT_NEAR(c[1], 0.0, 1e-13);
  EXPECT_THROW(Homeo(2, {BallPush{VecN{0.0, 0.0}, 1.0, VecN{1.0, 0.0}, 0.0, false}}), std::invalid_argument);
}

TEST(Moves, BallPushRoundTrip) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2);
  BallPush b{VecN{0.2, -0.1}, 1.3, VecN{0.45, -0.3}, 0.0, false};
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    VecN q{u(rng), u(rng)};
    worst = std::max(worst, dist(apply1(b, invert1(b, q)), q));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Moves, RadialStretchExamples) {
  RadialStretch id;
  id.knots = {{0, 0}, {1, 1}, {2, 2}};
  VecN p{0.3, -1.1};
  EXPECT_EQ(apply1(id, p), p);

  RadialStretch s;
  s.knots = {{0, 0}, {0.7, 1}, {1.9, 2}, {3.2, 3}};
  s.shift_tail = true;
  VecN q = apply1(s, VecN{0.0, 1.9});
  EXPECT_EQ(q, (VecN{0.0, 2.0}));
  VecN d{1.9 * 0.6, 1.9 * 0.8};
  VecN e = apply1(s, d);
  EXPECT_NEAR(norm(e), 2.0, 1e-15);
  EXPECT_NEAR(e[0] / e[1], 0.75, 1e-15);
  EXPECT_EQ(apply1(s, VecN{0.0, 0.0}), (VecN{0.0, 0.0}));
  EXPECT_NEAR(norm(invert1(s, VecN{3.0, 0.0})), 3.2, 1e-15);
  EXPECT_NEAR(norm(apply1(s, VecN{5.0, 0.0})), 4.8, 1e-15);  // slope 1 beyond the last knot
  RadialStretch bad;
  bad.knots = {{0, 0}, {2, 1}, {1, 2}};
  bad.shift_tail = true;
  EXPECT_THROW(Homeo(2, {bad}), std::invalid_argument);
}

TEST(Moves, TubeSlideMovesAxisPoint) {
  TubeSlide t{VecN{0.0, 0.0, 0.0}, VecN{2.0, 0.0, 0.0}, 0.5, 0.1, 1.0, 1.0, false};
  EXPECT_EQ(apply1(t, VecN{0.0, 0.0, 0.0}), (VecN{2.0, 0.0, 0.0}));
  EXPECT_EQ(apply1(t, VecN{0.0, 0.6, 0.0}), (VecN{0.0, 0.6, 0.0}));
  EXPECT_EQ(apply1(t, VecN{3.5, 0.0, 0.0}), (VecN{3.5, 0.0, 0.0}));
  EXPECT_EQ(invert1(t, VecN{2.0, 0.0, 0.0}), (VecN{0.0, 0.0, 0.0}));
}

TEST(Moves, HomeoCompositionBasics) {
  Homeo empty(2);
  VecN p{0.3, 0.4};
  EXPECT_EQ(empty.apply(p), p);
  EXPECT_EQ(empty.support_bound(), 0.0);
  Homeo twist(2, {AnnulusTwist{2.0, 0.5, 1.0, 0.0}});
  EXPECT_EQ(twist.support_bound(), 2.5);
  Homeo h(2, sample_moves());
  Homeo hinv = inverse(h);
  Homeo both = then(h, hinv);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-4, 4);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    VecN q{u(rng), u(rng)};
    worst = std::max({worst, dist(both.apply(q), q), dist(h.apply_inverse(h.apply(q)), q)});
  }
  EXPECT_LE(worst, 1e-10);
  EXPECT_THROW(then(h, Homeo(3)), std::invalid_argument);
  EXPECT_THROW(h.apply(VecN{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(Moves, IndexedEvaluationMatchesLinear) {
  std::vector<Move> ms;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 200; ++i) {
    VecN c{u(rng), u(rng)};
    ms.push_back(BallPush{c, 0.6, VecN{0.1, -0.15}, 0.05, false});
  }
  Homeo h(2, ms);
  for (int i = 0; i < 2000; ++i) {
    VecN p{u(rng), u(rng)};
    EXPECT_LE(dist(h.apply(p), h.apply_linear(p)), 1e-13);
  }
}

TEST(MovesProperty, IdentityOutsideSupport) {
  for (const Move &m : sample_moves()) {
    Homeo h(2, {m});
    SupportInfo sup = h.support();
    bool exact = !std::holds_alternative<RadialStretch>(m);
    auto shell = shell_samples(2, sup.radius, 2 * sup.radius + 1, 10000);
    for (const VecN &p : shell) {
      VecN expect = sup.tail_shift == 0 ? p : p + (sup.tail_shift / norm(p)) * p;
      double dev = dist(h.apply(p), expect);
      if (exact)
        ASSERT_EQ(dev, 0.0);
      else
        ASSERT_LE(dev, 1e-12);
    }
  }
}

TEST(MovesProperty, TwistPreservesNorm) {
  AnnulusTwist t{2.0, 0.7, 2.5, 0.1};
  for (const VecN &p : ball_samples(2, 3.0, 10000)) ASSERT_NEAR(norm(apply1(t, p)), norm(p), 1e-12);
}

TEST(MovesProperty, NoCollisions) {
  auto src = ball_samples(2, 4.0, 100000);
  for (const Move &m : sample_moves()) {
    Homeo h(2, {m});
    std::vector<VecN> img;
    img.reserve(src.size());
    for (const VecN &p : src) img.push_back(h.apply(p));
    EXPECT_FALSE(detail::has_collision(src, img));
  }
}

TEST(MovesProperty, ContinuityModulus) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-3, 3), ang(0, 2 * kPi);
  AnnulusTwist t{1.5, 0.5, 1.2, 0.0};
  BallPush b{VecN{0.0, 0.5}, 1.0, VecN{0.3, 0.2}, 0.0, false};
  const double lt = 1.1 * (1 + std::abs(t.theta) * (1 + t.r / t.w));
  const double k = norm(b.v) / b.R;
  const double lb = 1.1 * (1 + k) / (1 - k);
  for (int i = 0; i < 20000; ++i) {
    VecN p{u(rng), u(rng)};
    double a = ang(rng), delta = 1e-4 * (0.1 + 0.9 * (i % 10) / 9.0);
    VecN q = p + VecN{delta * std::cos(a), delta * std::sin(a)};
    ASSERT_LE(dist(apply1(t, p), apply1(t, q)), lt * delta);
    ASSERT_LE(dist(apply1(b, p), apply1(b, q)), lb * delta);
    ASSERT_LE(dist(invert1(b, p), invert1(b, q)), lb * delta);
  }
}
