// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_CRITIC_HPP_
#define XRNOMA_CRITIC_HPP_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "xrnoma/env.hpp"
#include "xrnoma/hyperparams.hpp"
#include "xrnoma/mlp.hpp"

namespace xrnoma::aahc {

enum class CriticInput { kUplink, kDownlink, kJoint };

// One value branch: what it reads, which rewards it predicts, and its loss
// weight. Rewards are mixed as mix[0] R_u + mix[1] R_d + mix[2] R_g.
struct CriticHead {
  std::string name;
  CriticInput input = CriticInput::kUplink;
  std::array<double, 3> reward_mix{};
  double weight = 1.0;
};

// Branches of the value network and how their advantages feed each actor:
// actor advantage = sum_h coeff[h] A_h.
struct CriticLayout {
  std::vector<CriticHead> heads;
  std::vector<double> uplink_coeffs;
  std::vector<double> downlink_coeffs;
};

// aahc: branches u, d, g with actor advantages A_u + A_g and A_d + A_g.
// iterl: independent u and d critics on R_u + R_g and R_d + R_g.
// ctrl: one joint critic on R_u + R_d + R_g shared by both actors.
// Throws std::invalid_argument for the random baseline.
CriticLayout critic_layout(Algorithm algo, const Hyperparams& hp);

int critic_input_dim(CriticInput input, const env::ScenarioConfig& config);

// One MLP per head, scalar output.
nn::ParamSet make_critic(const CriticLayout& layout, const env::ScenarioConfig& config,
                         const Hyperparams& hp, RngStream& rng);

// [s_u; s_d] stacked row-wise.
nn::Matrix joint_states(const nn::Matrix& uplink, const nn::Matrix& downlink);

// Regression targets from advantages and the frozen target network's values.
std::vector<double> critic_targets(std::span<const double> advantages,
                                   std::span<const double> target_values, double gamma,
                                   CriticTarget mode);

struct CriticDiagnostics {
  double loss = 0.0;                // sum_h w_h mse_h
  std::vector<double> branch_mse;   // per head
};

// inputs[h] is the batch for head h (dim x B); targets[h] its B targets.
// Accumulates d loss / d params into grads.
CriticDiagnostics critic_gradient(const nn::ParamSet& critic, const CriticLayout& layout,
                                  const std::vector<nn::Matrix>& inputs,
                                  const std::vector<std::vector<double>>& targets,
                                  nn::ParamSet& grads);

}  // namespace xrnoma::aahc

#endif  // XRNOMA_CRITIC_HPP_
