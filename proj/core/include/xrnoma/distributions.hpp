// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_DISTRIBUTIONS_HPP_
#define XRNOMA_DISTRIBUTIONS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "xrnoma/random.hpp"

namespace xrnoma::nn {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// ---- categorical head over (M+1)^N uplink actions ----

double log_sum_exp(std::span<const double> logits);

struct CategoricalDraw {
  std::uint64_t action = 0;
  double log_prob = 0.0;
  double entropy = 0.0;
};

// Inverse-CDF sampling on softmax(logits) with one uniform from rng.
CategoricalDraw categorical_sample(std::span<const double> logits, RngStream& rng);
double categorical_log_prob(std::span<const double> logits, std::uint64_t action);
double categorical_entropy(std::span<const double> logits);
// Lowest index among the maximal logits.
std::uint64_t categorical_argmax(std::span<const double> logits);

// d log p(action) / d logits = onehot(action) - softmax(logits).
void categorical_log_prob_grad(std::span<const double> logits, std::uint64_t action,
                               std::span<double> grad);
// d H / d logits_j = -p_j (log p_j + H).
void categorical_entropy_grad(std::span<const double> logits, std::span<double> grad);

// ---- diagonal Gaussian head for downlink powers ----

// p_min + (tanh(raw) + 1) / 2 * (p_max - p_min) and its derivative in raw.
double squash_mean(double raw, double lo, double hi);
double squash_mean_derivative(double raw, double lo, double hi);

double clamp_log_std(double log_std);

struct GaussianDraw {
  std::vector<double> sample;   // pre-clip, the point log_prob refers to
  std::vector<double> clipped;  // executed action in [lo, hi]
  double log_prob = 0.0;
  double entropy = 0.0;
};

// log_std values are clamped to [kLogStdMin, kLogStdMax] before use.
GaussianDraw gaussian_sample(std::span<const double> mean, std::span<const double> log_std,
                             RngStream& rng, double lo, double hi);
double gaussian_log_prob(std::span<const double> x, std::span<const double> mean,
                         std::span<const double> log_std);
double gaussian_entropy(std::span<const double> log_std);

}  // namespace xrnoma::nn

#endif  // XRNOMA_DISTRIBUTIONS_HPP_
