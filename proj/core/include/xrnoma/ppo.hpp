// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_PPO_HPP_
#define XRNOMA_PPO_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "xrnoma/env.hpp"
#include "xrnoma/hyperparams.hpp"
#include "xrnoma/mlp.hpp"

namespace xrnoma::aahc {

// Raised when a loss or gradient turns NaN/Inf during an update.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SurrogateTerm {
  double value = 0.0;          // min(r A, clip(r, 1-eps, 1+eps) A)
  double ratio = 1.0;          // r = exp(lp_new - lp_old)
  double grad_log_prob = 0.0;  // d value / d lp_new
  bool clipped = false;        // the clipped arm is active
};

SurrogateTerm clip_surrogate(double log_prob_new, double log_prob_old, double advantage,
                             double clip_epsilon);

// Zero mean, unit (population) std; returns zeros when the spread vanishes.
std::vector<double> normalize_advantages(std::span<const double> advantages);

// Uplink actor: one MLP from s_u to (M+1)^N logits.
nn::ParamSet make_uplink_actor(const env::ScenarioConfig& config, const Hyperparams& hp,
                               RngStream& rng);
// Downlink actor: one MLP from s_d to N raw means plus a log-std vector.
nn::ParamSet make_downlink_actor(const env::ScenarioConfig& config, const Hyperparams& hp,
                                 RngStream& rng);

// Squashed downlink means for a batch of states (N x B).
nn::Matrix downlink_means(const nn::ParamSet& actor, const nn::Matrix& states, double lo,
                          double hi);

struct ActorDiagnostics {
  double loss = 0.0;       // -mean(f) - entropy_coef * mean(H)
  double surrogate = 0.0;  // mean(f)
  double entropy = 0.0;    // mean(H)
  double clip_fraction = 0.0;
};

// Accumulates d loss / d params into grads. States are column-major batches.
ActorDiagnostics uplink_actor_gradient(const nn::ParamSet& actor, const nn::Matrix& states,
                                       std::span<const std::uint64_t> actions,
                                       std::span<const double> old_log_probs,
                                       std::span<const double> advantages, double clip_epsilon,
                                       double entropy_coef, nn::ParamSet& grads);

// actions holds the pre-clip Gaussian samples (N x B).
ActorDiagnostics downlink_actor_gradient(const nn::ParamSet& actor, const nn::Matrix& states,
                                         const nn::Matrix& actions,
                                         std::span<const double> old_log_probs,
                                         std::span<const double> advantages, double clip_epsilon,
                                         double entropy_coef, double lo, double hi,
                                         nn::ParamSet& grads);

}  // namespace xrnoma::aahc

#endif  // XRNOMA_PPO_HPP_
