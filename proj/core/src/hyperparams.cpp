// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/hyperparams.hpp"

#include <stdexcept>
#include <string>

namespace xrnoma::aahc {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kAahc: return "aahc";
    case Algorithm::kIteRl: return "iterl";
    case Algorithm::kCtrl: return "ctrl";
    case Algorithm::kRandom: return "random";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "aahc") return Algorithm::kAahc;
  if (text == "iterl") return Algorithm::kIteRl;
  if (text == "ctrl") return Algorithm::kCtrl;
  if (text == "random") return Algorithm::kRandom;
  throw std::invalid_argument("unknown algorithm '" + std::string(text) +
                              "' (expected aahc, iterl, ctrl or random)");
}

std::string_view to_string(CriticTarget target) {
  return target == CriticTarget::kVerbatim ? "verbatim" : "conventional";
}

CriticTarget parse_critic_target(std::string_view text) {
  if (text == "verbatim") return CriticTarget::kVerbatim;
  if (text == "conventional") return CriticTarget::kConventional;
  throw std::invalid_argument("unknown critic target '" + std::string(text) +
                              "' (expected verbatim or conventional)");
}

void Hyperparams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("hyper." + what); };
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0)) fail("gae_lambda must lie in (0, 1]");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) fail("clip_epsilon must lie in (0, 1)");
  if (epochs < 1) fail("epochs must be at least 1");
  if (batch_size < 1) fail("batch_size must be at least 1");
  if (trajectory_length < 1) fail("trajectory_length must be at least 1");
  if (batch_size > trajectory_length) fail("batch_size must not exceed trajectory_length");
  if (!(entropy_coef >= 0.0)) fail("entropy_coef must be non-negative");
  if (!(lr_uplink > 0.0) || !(lr_downlink > 0.0) || !(lr_critic > 0.0)) {
    fail("learning rates must be positive");
  }
  if (!(weight_u >= 0.0) || !(weight_d >= 0.0) || !(weight_g >= 0.0)) {
    fail("head weights must be non-negative");
  }
  if (target_sync_period < 1) fail("target_sync_period must be at least 1");
  if (total_steps < 0) fail("total_steps must be non-negative");
  for (int h : hidden) {
    if (h < 1) fail("hidden layer sizes must be positive");
  }
  if (!(policy_output_scale > 0.0)) fail("policy_output_scale must be positive");
}

}  // namespace xrnoma::aahc
