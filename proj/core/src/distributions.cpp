// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xrnoma::nn {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void check_action(std::span<const double> logits, std::uint64_t action) {
  if (action >= logits.size()) throw std::out_of_range("categorical: action index out of range");
}

}  // namespace

double log_sum_exp(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("log_sum_exp of an empty span");
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - peak);
  return peak + std::log(sum);
}

CategoricalDraw categorical_sample(std::span<const double> logits, RngStream& rng) {
  const double lse = log_sum_exp(logits);
  const double u = rng.uniform();
  CategoricalDraw draw;
  draw.action = logits.size() - 1;
  double cdf = 0.0;
  bool chosen = false;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double logp = logits[i] - lse;
    const double p = std::exp(logp);
    draw.entropy -= p * logp;
    cdf += p;
    if (!chosen && u < cdf) {
      draw.action = i;
      chosen = true;
    }
  }
  draw.log_prob = logits[draw.action] - lse;
  return draw;
}

double categorical_log_prob(std::span<const double> logits, std::uint64_t action) {
  check_action(logits, action);
  return logits[action] - log_sum_exp(logits);
}

double categorical_entropy(std::span<const double> logits) {
  const double lse = log_sum_exp(logits);
  double h = 0.0;
  for (double z : logits) h -= std::exp(z - lse) * (z - lse);
  return h;
}

std::uint64_t categorical_argmax(std::span<const double> logits) {
  return static_cast<std::uint64_t>(std::max_element(logits.begin(), logits.end()) -
                                    logits.begin());
}

void categorical_log_prob_grad(std::span<const double> logits, std::uint64_t action,
                               std::span<double> grad) {
  check_action(logits, action);
  const double lse = log_sum_exp(logits);
  for (std::size_t i = 0; i < logits.size(); ++i) grad[i] = -std::exp(logits[i] - lse);
  grad[action] += 1.0;
}

void categorical_entropy_grad(std::span<const double> logits, std::span<double> grad) {
  const double lse = log_sum_exp(logits);
  double h = 0.0;
  for (double z : logits) h -= std::exp(z - lse) * (z - lse);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double logp = logits[i] - lse;
    grad[i] = -std::exp(logp) * (logp + h);
  }
}

double squash_mean(double raw, double lo, double hi) {
  return lo + 0.5 * (std::tanh(raw) + 1.0) * (hi - lo);
}

double squash_mean_derivative(double raw, double lo, double hi) {
  const double t = std::tanh(raw);
  return 0.5 * (1.0 - t * t) * (hi - lo);
}

double clamp_log_std(double log_std) { return std::clamp(log_std, kLogStdMin, kLogStdMax); }

GaussianDraw gaussian_sample(std::span<const double> mean, std::span<const double> log_std,
                             RngStream& rng, double lo, double hi) {
  if (mean.size() != log_std.size()) throw std::invalid_argument("gaussian: size mismatch");
  GaussianDraw draw;
  draw.sample.resize(mean.size());
  draw.clipped.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double sigma = std::exp(clamp_log_std(log_std[i]));
    draw.sample[i] = mean[i] + sigma * rng.normal();
    draw.clipped[i] = std::clamp(draw.sample[i], lo, hi);
  }
  draw.log_prob = gaussian_log_prob(draw.sample, mean, log_std);
  draw.entropy = gaussian_entropy(log_std);
  return draw;
}

double gaussian_log_prob(std::span<const double> x, std::span<const double> mean,
                         std::span<const double> log_std) {
  double lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ls = clamp_log_std(log_std[i]);
    const double z = (x[i] - mean[i]) * std::exp(-ls);
    lp += -0.5 * z * z - ls - kHalfLog2Pi;
  }
  return lp;
}

double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double ls : log_std) h += clamp_log_std(ls) + kHalfLog2Pi + 0.5;
  return h;
}

}  // namespace xrnoma::nn
