// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/critic.hpp"

#include <cmath>
#include <stdexcept>

#include "xrnoma/ppo.hpp"

namespace xrnoma::aahc {

CriticLayout critic_layout(Algorithm algo, const Hyperparams& hp) {
  CriticLayout layout;
  switch (algo) {
    case Algorithm::kAahc:
      layout.heads = {{"u", CriticInput::kUplink, {1.0, 0.0, 0.0}, hp.weight_u},
                      {"d", CriticInput::kDownlink, {0.0, 1.0, 0.0}, hp.weight_d},
                      {"g", CriticInput::kJoint, {0.0, 0.0, 1.0}, hp.weight_g}};
      layout.uplink_coeffs = {1.0, 0.0, 1.0};
      layout.downlink_coeffs = {0.0, 1.0, 1.0};
      break;
    case Algorithm::kIteRl:
      layout.heads = {{"u", CriticInput::kUplink, {1.0, 0.0, 1.0}, 1.0},
                      {"d", CriticInput::kDownlink, {0.0, 1.0, 1.0}, 1.0}};
      layout.uplink_coeffs = {1.0, 0.0};
      layout.downlink_coeffs = {0.0, 1.0};
      break;
    case Algorithm::kCtrl:
      layout.heads = {{"g", CriticInput::kJoint, {1.0, 1.0, 1.0}, 1.0}};
      layout.uplink_coeffs = {1.0};
      layout.downlink_coeffs = {1.0};
      break;
    case Algorithm::kRandom:
      throw std::invalid_argument("the random baseline has no critic");
  }
  return layout;
}

int critic_input_dim(CriticInput input, const env::ScenarioConfig& config) {
  switch (input) {
    case CriticInput::kUplink: return config.uplink_state_dim();
    case CriticInput::kDownlink: return config.downlink_state_dim();
    case CriticInput::kJoint: return config.uplink_state_dim() + config.downlink_state_dim();
  }
  return 0;
}

nn::ParamSet make_critic(const CriticLayout& layout, const env::ScenarioConfig& config,
                         const Hyperparams& hp, RngStream& rng) {
  nn::ParamSet critic;
  for (const auto& head : layout.heads) {
    std::vector<int> sizes{critic_input_dim(head.input, config)};
    sizes.insert(sizes.end(), hp.hidden.begin(), hp.hidden.end());
    sizes.push_back(1);
    critic.mlps.push_back(nn::Mlp::uniform_init(std::move(sizes), rng));
  }
  return critic;
}

nn::Matrix joint_states(const nn::Matrix& uplink, const nn::Matrix& downlink) {
  if (uplink.cols() != downlink.cols()) {
    throw std::invalid_argument("joint_states: batch sizes differ");
  }
  nn::Matrix joint(uplink.rows() + downlink.rows(), uplink.cols());
  joint.topRows(uplink.rows()) = uplink;
  joint.bottomRows(downlink.rows()) = downlink;
  return joint;
}

std::vector<double> critic_targets(std::span<const double> advantages,
                                   std::span<const double> target_values, double gamma,
                                   CriticTarget mode) {
  if (advantages.size() != target_values.size()) {
    throw std::invalid_argument("critic_targets: length mismatch");
  }
  const double scale = mode == CriticTarget::kVerbatim ? gamma : 1.0;
  std::vector<double> out(advantages.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = advantages[i] + scale * target_values[i];
  return out;
}

CriticDiagnostics critic_gradient(const nn::ParamSet& critic, const CriticLayout& layout,
                                  const std::vector<nn::Matrix>& inputs,
                                  const std::vector<std::vector<double>>& targets,
                                  nn::ParamSet& grads) {
  const std::size_t heads = layout.heads.size();
  if (critic.mlps.size() != heads || inputs.size() != heads || targets.size() != heads) {
    throw std::invalid_argument("critic_gradient: head count mismatch");
  }
  CriticDiagnostics diag;
  diag.branch_mse.resize(heads, 0.0);
  for (std::size_t h = 0; h < heads; ++h) {
    const auto batch = inputs[h].cols();
    if (batch == 0 || static_cast<std::size_t>(batch) != targets[h].size()) {
      throw std::invalid_argument("critic_gradient: batch/target size mismatch");
    }
    nn::MlpCache cache;
    const nn::Matrix v = critic.mlps[h].forward(inputs[h], &cache);
    nn::Matrix grad(1, batch);
    const double inv_b = 1.0 / static_cast<double>(batch);
    const double w = layout.heads[h].weight;
    for (Eigen::Index b = 0; b < batch; ++b) {
      const double err = v(0, b) - targets[h][b];
      diag.branch_mse[h] += err * err * inv_b;
      grad(0, b) = 2.0 * w * err * inv_b;
    }
    diag.loss += w * diag.branch_mse[h];
    if (w != 0.0) critic.mlps[h].backward(cache, grad, grads.mlps[h]);
  }
  if (!std::isfinite(diag.loss)) throw NonFiniteError("critic loss is not finite");
  return diag;
}

}  // namespace xrnoma::aahc
