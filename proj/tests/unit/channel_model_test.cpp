// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "xrnoma/channel_model.hpp"

namespace xrnoma::channel {
namespace {

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance({2, 2}, {2, 2}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(distance({3, 4}, {0, 0}, 0.0), 5.0);
  EXPECT_NEAR(distance({100, 0}, {0, 0}, 3.0), std::sqrt(10009.0), 1e-12);
  EXPECT_NEAR(distance({100, 0}, {0, 0}, 3.0), 100.0449, 1e-4);
}

TEST(Distance, NeverBelowHeight) {
  RngStream rng = RngStream::derive(1, "d");
  for (int i = 0; i < 1000; ++i) {
    const double h = rng.uniform(0, 10);
    EXPECT_GE(distance({rng.uniform(-50, 50), rng.uniform(-50, 50)},
                       {rng.uniform(-50, 50), rng.uniform(-50, 50)}, h),
              h);
  }
}

TEST(PathGain, Examples) {
  FadingParams p;
  p.beta0 = 1.0;
  p.alpha = 2.0;
  EXPECT_DOUBLE_EQ(path_gain(1.0, p), 1.0);
  p.alpha = 0.0;
  EXPECT_DOUBLE_EQ(path_gain(57.0, p), 1.0);
  p.beta0 = 1e-3;
  p.alpha = 2.0;
  EXPECT_NEAR(path_gain(100.0449, p) / 9.991e-8, 1.0, 1e-4);
}

TEST(PathGain, ZeroDistanceIsDomainError) {
  EXPECT_THROW(path_gain(0.0, FadingParams{}), std::domain_error);
}

TEST(PathGain, StrictlyDecreasingForPositiveExponent) {
  FadingParams p;
  p.alpha = 2.7;
  double prev = path_gain(0.5, p);
  for (double d = 0.6; d < 200.0; d *= 1.1) {
    const double g = path_gain(d, p);
    ASSERT_LT(g, prev);
    prev = g;
  }
}

TEST(SmallScale, PureNlosEqualsComplexNormalDraw) {
  RngStream a = RngStream::derive(4, "g");
  RngStream b = RngStream::derive(4, "g");
  EXPECT_EQ(sample_small_scale(a, 0.0, {1, 0}), b.complex_normal());
}

TEST(SmallScale, LosLimit) {
  RngStream rng = RngStream::derive(4, "los");
  const auto g = sample_small_scale(rng, 1e12, {1, 0});
  EXPECT_NEAR(g.real(), 1.0, 1e-5);
  EXPECT_NEAR(g.imag(), 0.0, 1e-5);
}

TEST(SmallScale, UnitSecondMomentAtK3) {
  RngStream rng = RngStream::derive(4, "moment");
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += std::norm(sample_small_scale(rng, 3.0, {1, 0}));
  const double mean = sum / n;
  EXPECT_GE(mean, 0.99);
  EXPECT_LE(mean, 1.01);
}

TEST(SmallScale, Reproducible) {
  RngStream a = RngStream::derive(8, "r");
  RngStream b = RngStream::derive(8, "r");
  for (int i = 0; i < 100; ++i) ASSERT_EQ(sample_small_scale(a, 3, {1, 0}), sample_small_scale(b, 3, {1, 0}));
}

TEST(ChannelGain, Examples) {
  auto c = channel_gain(4.0, {1, 0});
  EXPECT_DOUBLE_EQ(c.h.real(), 2.0);
  EXPECT_DOUBLE_EQ(c.power, 4.0);
  EXPECT_DOUBLE_EQ(channel_gain(1.0, {0, 0}).power, 0.0);
  const std::complex<double> g = std::sqrt(1.3);
  EXPECT_NEAR(channel_gain(9.991e-8, g).power, 1.2988e-7, 1e-11);
}

TEST(Topology, ZeroWalkIsIdentity) {
  RngStream rng = RngStream::derive(2, "t");
  const Topology t = sample_topology(rng, 5, 100, 100);
  const Topology u = step_topology(rng, t, 0.0);
  EXPECT_EQ(t.xu_positions, u.xu_positions);
  EXPECT_EQ(t.mc_position, u.mc_position);
}

TEST(Topology, CornerStaysInside) {
  Topology t;
  t.xu_positions = {{50, 50}, {-50, -50}};
  RngStream rng = RngStream::derive(2, "corner");
  for (int i = 0; i < 100; ++i) {
    t = step_topology(rng, t, 1.0);
    for (const auto& p : t.xu_positions) ASSERT_TRUE(t.contains(p));
  }
}

TEST(Topology, LongWalkStaysInBoundsAndMcFixed) {
  RngStream rng = RngStream::derive(2, "walk");
  Topology t = sample_topology(rng, 8, 100, 100);
  const Point mc = t.mc_position;
  for (int i = 0; i < 100000; ++i) {
    t = step_topology(rng, t, 1.0);
    for (const auto& p : t.xu_positions) ASSERT_TRUE(t.contains(p));
  }
  EXPECT_EQ(t.mc_position, mc);
  EXPECT_THROW(step_topology(rng, t, -1.0), std::invalid_argument);
}

TEST(SampleGains, FinitePositiveAndShaped) {
  RngStream rng = RngStream::derive(2, "gains");
  const Topology t = sample_topology(rng, 4, 100, 100);
  const auto g = sample_gains(rng, t, 3, FadingParams{});
  ASSERT_EQ(g.size(), 12u);
  for (const auto& h : g) {
    EXPECT_TRUE(std::isfinite(std::norm(h)));
    EXPECT_GT(std::norm(h), 0.0);
  }
}

TEST(FadingParams, Validation) {
  FadingParams p;
  EXPECT_NO_THROW(p.validate());
  p.los = {2, 0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = FadingParams{};
  p.beta0 = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace xrnoma::channel
