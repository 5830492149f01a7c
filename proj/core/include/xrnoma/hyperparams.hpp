// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_HYPERPARAMS_HPP_
#define XRNOMA_HYPERPARAMS_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace xrnoma::aahc {

enum class Algorithm { kAahc, kIteRl, kCtrl, kRandom };

// "aahc", "iterl", "ctrl", "random". parse throws std::invalid_argument.
std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view text);

// How the critic regression target is formed from the GAE advantage.
enum class CriticTarget {
  kVerbatim,      // A + gamma * V'(s_t)
  kConventional,  // A + V'(s_t)
};

std::string_view to_string(CriticTarget target);
CriticTarget parse_critic_target(std::string_view text);

struct Hyperparams {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  int epochs = 10;
  int batch_size = 64;
  double entropy_coef = 1e-3;
  double lr_uplink = 1e-4;
  double lr_downlink = 1e-4;
  double lr_critic = 5e-5;
  double weight_u = 1.0;
  double weight_d = 1.0;
  double weight_g = 1.0;
  int target_sync_period = 1;  // update phases between target syncs
  int trajectory_length = 2048;
  long total_steps = 200000;
  std::vector<int> hidden = {64, 64};
  double policy_output_scale = 0.01;
  double init_log_std = 0.0;
  bool normalize_advantages = true;
  CriticTarget critic_target = CriticTarget::kVerbatim;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace xrnoma::aahc

#endif  // XRNOMA_HYPERPARAMS_HPP_
