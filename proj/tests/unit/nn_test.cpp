// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "xrnoma/adam.hpp"
#include "xrnoma/distributions.hpp"
#include "xrnoma/mlp.hpp"
#include "xrnoma/random.hpp"

namespace xrnoma::nn {
namespace {

std::vector<double> dense_of(const Mlp& net, const std::vector<double>& x) {
  std::vector<std::vector<double>> w, b;
  for (const auto& layer : net.layers()) {
    std::vector<double> rows;
    for (int o = 0; o < layer.weight.rows(); ++o)
      for (int i = 0; i < layer.weight.cols(); ++i) rows.push_back(layer.weight(o, i));
    w.push_back(rows);
    b.emplace_back(layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return oracle::dense_forward(w, b, net.sizes(), x);
}

TEST(Mlp, ForwardMatchesDenseOracle) {
  RngStream rng = RngStream::derive(1, "mlp");
  const Mlp net = Mlp::uniform_init({5, 7, 6, 3}, rng);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = rng.uniform(-2, 2);
    const Vector got = net.forward(std::span<const double>(x));
    const auto want = dense_of(net, x);
    for (int k = 0; k < 3; ++k) ASSERT_LE(oracle::rel_err(got[k], want[k]), 1e-13);
  }
}

TEST(Mlp, BatchColumnsMatchSingleForward) {
  RngStream rng = RngStream::derive(2, "mlp");
  const Mlp net = Mlp::uniform_init({4, 8, 2}, rng);
  Matrix batch(4, 6);
  for (int i = 0; i < batch.size(); ++i) batch.data()[i] = rng.uniform(-1, 1);
  const Matrix out = net.forward(batch);
  for (int c = 0; c < 6; ++c) {
    const Vector single = net.forward(Vector(batch.col(c)));
    ASSERT_EQ(out.col(c), single);
  }
}

TEST(Mlp, ZeroNetworkOutputsZero) {
  const Mlp net({3, 4, 2});
  const Vector y = net.forward(Vector(Vector::Ones(3)));
  EXPECT_EQ(y, Vector::Zero(2));
}

TEST(Mlp, SingleLayerIdentity) {
  Mlp net({3, 3});
  net.layers()[0].weight = Matrix::Identity(3, 3);
  const Vector x = Vector::LinSpaced(3, -1, 1);
  EXPECT_EQ(net.forward(x), x);
}

TEST(Mlp, OutputScaleShrinksLastLayer) {
  RngStream a = RngStream::derive(3, "init");
  RngStream b = RngStream::derive(3, "init");
  const Mlp full = Mlp::uniform_init({4, 8, 2}, a, 1.0);
  const Mlp small = Mlp::uniform_init({4, 8, 2}, b, 0.01);
  EXPECT_EQ(full.layers()[0].weight, small.layers()[0].weight);
  EXPECT_TRUE(small.layers()[1].weight.isApprox(full.layers()[1].weight * 0.01));
  const double bound = 1.0 / std::sqrt(4.0);
  EXPECT_LE(full.layers()[0].weight.cwiseAbs().maxCoeff(), bound);
}

TEST(Mlp, BackwardMatchesCentralDifference) {
  RngStream rng = RngStream::derive(4, "fd");
  Mlp net = Mlp::uniform_init({2, 8, 8, 2}, rng);
  Matrix x(2, 3);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
  Matrix probe(2, 3);
  for (int i = 0; i < probe.size(); ++i) probe.data()[i] = rng.uniform(-1, 1);
  auto loss = [&] { return (net.forward(x).array() * probe.array()).sum(); };

  MlpCache cache;
  net.forward(x, &cache);
  Mlp grads = net.zeros_like();
  const Matrix dx = net.backward(cache, probe, grads);

  std::vector<double*> coords;
  for (auto t : net.tensors())
    for (double& v : t) coords.push_back(&v);
  const auto fd = oracle::central_difference(loss, coords, 1e-6);
  std::vector<double> analytic;
  for (auto t : grads.tensors()) analytic.insert(analytic.end(), t.begin(), t.end());
  ASSERT_EQ(fd.size(), analytic.size());
  for (std::size_t i = 0; i < fd.size(); ++i) {
    ASSERT_LE(std::abs(fd[i] - analytic[i]), 1e-6 * std::max(1.0, std::abs(fd[i]))) << i;
  }

  std::vector<double*> inputs;
  for (int i = 0; i < x.size(); ++i) inputs.push_back(x.data() + i);
  const auto fdx = oracle::central_difference(loss, inputs, 1e-6);
  for (int i = 0; i < x.size(); ++i) ASSERT_NEAR(fdx[i], dx.data()[i], 1e-8);
}

TEST(Mlp, BackwardIsLinearInOutputGradient) {
  RngStream rng = RngStream::derive(5, "lin");
  const Mlp net = Mlp::uniform_init({3, 5, 2}, rng);
  Matrix x = Matrix::Random(3, 4);
  MlpCache cache;
  net.forward(x, &cache);
  const Matrix g1 = Matrix::Random(2, 4);
  const Matrix g2 = Matrix::Random(2, 4);
  Mlp a = net.zeros_like(), b = net.zeros_like(), c = net.zeros_like();
  net.backward(cache, g1, a);
  net.backward(cache, g2, b);
  net.backward(cache, 2.0 * g1 + g2, c);
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    EXPECT_TRUE(c.layers()[l].weight.isApprox(2.0 * a.layers()[l].weight + b.layers()[l].weight,
                                              1e-12));
  }
}

TEST(Mlp, Errors) {
  const Mlp net({3, 2});
  EXPECT_THROW(net.forward(Vector(Vector::Zero(2))), std::invalid_argument);
  Mlp grads = net.zeros_like();
  EXPECT_THROW(net.backward(MlpCache{}, Matrix::Zero(2, 1), grads), std::logic_error);
}

TEST(ParamSet, IdenticalAndZero) {
  RngStream rng = RngStream::derive(6, "ps");
  ParamSet p{{Mlp::uniform_init({2, 3}, rng)}, {Vector::Ones(2)}};
  ParamSet q = p;
  EXPECT_TRUE(p.identical(q));
  q.vectors[0][1] = 0.5;
  EXPECT_FALSE(p.identical(q));
  q.set_zero();
  for (auto t : q.tensors())
    for (double v : t) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(p.num_parameters(), 2u * 3u + 3u + 2u);
}

TEST(Categorical, UniformLogProb) {
  const std::vector<double> logits(4, 0.3);
  for (std::uint64_t a = 0; a < 4; ++a)
    EXPECT_NEAR(categorical_log_prob(logits, a), -std::log(4.0), 1e-15);
  EXPECT_NEAR(categorical_entropy(logits), std::log(4.0), 1e-15);
  EXPECT_THROW(categorical_log_prob(logits, 4), std::out_of_range);
}

TEST(Categorical, ShiftInvariance) {
  const std::vector<double> a{0.1, -2.0, 3.0, 0.5};
  std::vector<double> b = a;
  for (double& x : b) x += 123.0;
  for (std::uint64_t k = 0; k < 4; ++k)
    EXPECT_NEAR(categorical_log_prob(a, k), categorical_log_prob(b, k), 1e-12);
  EXPECT_NEAR(categorical_entropy(a), categorical_entropy(b), 1e-12);
}

TEST(Categorical, DominantLogitAlmostAlwaysSampled) {
  std::vector<double> logits(5, 0.0);
  logits[2] = 50.0;
  RngStream rng = RngStream::derive(7, "cat");
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(categorical_sample(logits, rng).action, 2u);
  EXPECT_EQ(categorical_argmax(logits), 2u);
  EXPECT_EQ(categorical_argmax(std::vector<double>{1, 3, 3}), 1u);
}

TEST(Categorical, SampleFrequencies) {
  const std::vector<double> logits{0.0, std::log(2.0), std::log(3.0)};
  RngStream rng = RngStream::derive(8, "cat");
  std::vector<int> count(3, 0);
  const int n = 600000;
  for (int i = 0; i < n; ++i) {
    const auto d = categorical_sample(logits, rng);
    ASSERT_NEAR(d.log_prob, categorical_log_prob(logits, d.action), 1e-15);
    ++count[d.action];
  }
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(count[k] / double(n), (k + 1) / 6.0, 0.003);
}

TEST(Categorical, GradientsMatchFiniteDifference) {
  std::vector<double> logits{0.3, -1.2, 2.0, 0.0, 0.7};
  std::vector<double*> coords;
  for (double& v : logits) coords.push_back(&v);
  std::vector<double> g(5);
  categorical_log_prob_grad(logits, 3, g);
  const auto fd = oracle::central_difference([&] { return categorical_log_prob(logits, 3); },
                                             coords, 1e-6);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(g[k], fd[k], 1e-9);
  categorical_entropy_grad(logits, g);
  const auto fdh = oracle::central_difference([&] { return categorical_entropy(logits); },
                                              coords, 1e-6);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(g[k], fdh[k], 1e-9);
}

TEST(Gaussian, LogProbAtModeAndEntropy) {
  const std::vector<double> mean{1.0, -2.0};
  const std::vector<double> log_std{0.0, std::log(2.0)};
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(gaussian_log_prob(mean, mean, log_std), -2 * half_log_2pi - std::log(2.0), 1e-14);
  EXPECT_NEAR(gaussian_entropy(log_std), 2 * (half_log_2pi + 0.5) + std::log(2.0), 1e-14);
  EXPECT_NEAR(gaussian_log_prob(std::vector<double>{2.0}, std::vector<double>{0.0},
                                std::vector<double>{0.0}),
              -half_log_2pi - 2.0, 1e-14);
}

TEST(Gaussian, LogStdIsClamped) {
  EXPECT_EQ(clamp_log_std(-9.0), kLogStdMin);
  EXPECT_EQ(clamp_log_std(4.0), kLogStdMax);
  const std::vector<double> x{0.5}, mu{0.0};
  EXPECT_EQ(gaussian_log_prob(x, mu, std::vector<double>{7.0}),
            gaussian_log_prob(x, mu, std::vector<double>{kLogStdMax}));
}

TEST(Gaussian, SampleMomentsAndClipping) {
  const std::vector<double> mean{3.0, 19.5};
  const std::vector<double> log_std{std::log(0.5), 0.0};
  RngStream rng = RngStream::derive(9, "gauss");
  double s0 = 0, s1 = 0, sq0 = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const auto d = gaussian_sample(mean, log_std, rng, 0.0, 20.0);
    s0 += d.sample[0];
    sq0 += (d.sample[0] - 3.0) * (d.sample[0] - 3.0);
    s1 += d.sample[1];
    ASSERT_GE(d.clipped[1], 0.0);
    ASSERT_LE(d.clipped[1], 20.0);
    ASSERT_EQ(d.clipped[1], std::clamp(d.sample[1], 0.0, 20.0));
    if (i < 100) ASSERT_NEAR(d.log_prob, gaussian_log_prob(d.sample, mean, log_std), 1e-12);
  }
  EXPECT_NEAR(s0 / n, 3.0, 0.002);
  EXPECT_NEAR(sq0 / n, 0.25, 0.002);
  EXPECT_NEAR(s1 / n, 19.5, 0.004);
}

TEST(Gaussian, SquashedMeanRangeAndDerivative) {
  EXPECT_DOUBLE_EQ(squash_mean(0.0, 0.0, 20.0), 10.0);
  EXPECT_NEAR(squash_mean(40.0, 0.0, 20.0), 20.0, 1e-12);
  EXPECT_NEAR(squash_mean(-40.0, 0.0, 20.0), 0.0, 1e-12);
  for (double r : {-2.0, -0.3, 0.0, 1.1}) {
    const double h = 1e-6;
    const double fd = (squash_mean(r + h, 0, 20) - squash_mean(r - h, 0, 20)) / (2 * h);
    EXPECT_NEAR(squash_mean_derivative(r, 0, 20), fd, 1e-7);
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  RngStream rng = RngStream::derive(10, "adam");
  ParamSet p{{Mlp::uniform_init({3, 4, 2}, rng)}, {Vector::Ones(2)}};
  const ParamSet before = p;
  Adam opt(p, 1e-3);
  opt.step(p, p.zeros_like());
  EXPECT_TRUE(p.identical(before));
  EXPECT_EQ(opt.steps(), 1);
}

TEST(Adam, FirstStepMovesByLearningRateAgainstSign) {
  ParamSet p{{}, {Vector::Zero(3)}};
  ParamSet g{{}, {Vector(3)}};
  g.vectors[0] << 5.0, -0.01, 2e3;
  Adam opt(p, 1e-3);
  opt.step(p, g);
  EXPECT_NEAR(p.vectors[0][0], -1e-3, 1e-9);
  EXPECT_NEAR(p.vectors[0][1], 1e-3, 1e-8);
  EXPECT_NEAR(p.vectors[0][2], -1e-3, 1e-9);
}

TEST(Adam, DescendsQuadratic) {
  ParamSet p{{}, {Vector::Constant(2, 3.0)}};
  Adam opt(p, 0.05);
  for (int i = 0; i < 2000; ++i) {
    ParamSet g{{}, {2.0 * p.vectors[0]}};
    opt.step(p, g);
  }
  EXPECT_LT(p.vectors[0].norm(), 1e-2);
}

TEST(Adam, ShapeMismatchThrows) {
  ParamSet p{{}, {Vector::Zero(3)}};
  Adam opt(p, 1e-3);
  ParamSet wrong{{}, {Vector::Zero(2)}};
  EXPECT_THROW(opt.step(p, wrong), std::invalid_argument);
}

}  // namespace
}  // namespace xrnoma::nn
