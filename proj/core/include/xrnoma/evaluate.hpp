// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_EVALUATE_HPP_
#define XRNOMA_EVALUATE_HPP_

#include <cstdint>
#include <vector>

#include "xrnoma/env.hpp"
#include "xrnoma/random.hpp"
#include "xrnoma/trainer.hpp"

namespace xrnoma::aahc {

// Uniform channel choice per user and uniform power per user.
class RandomPolicy {
 public:
  RandomPolicy(RngStream uplink, RngStream downlink)
      : uplink_(uplink), downlink_(downlink) {}

  std::vector<int> uplink_action(const env::ScenarioConfig& config);
  std::vector<double> downlink_action(const env::ScenarioConfig& config);

 private:
  RngStream uplink_;
  RngStream downlink_;
};

// Greedy actions of a trained agent: argmax logits and the Gaussian mean.
std::vector<int> greedy_uplink_action(const Agent& agent, const env::ScenarioConfig& config,
                                      const std::vector<double>& s_u);
std::vector<double> greedy_downlink_action(const Agent& agent, const env::ScenarioConfig& config,
                                           const std::vector<double>& s_d);

struct EvaluationResult {
  int episodes = 0;
  double mean_ru = 0.0;  // mean episodic returns
  double mean_rd = 0.0;
  double mean_rg = 0.0;
  // Per-episode KPI means.
  double mean_iterations = 0.0;
  double total_delay_ms = 0.0;
  double retrans_pct = 0.0;
  double max_ul_rate_gbps = 0.0;
  double energy_j = 0.0;
};

// Evaluation environments use streams derived under separate names, so they
// never replay training episodes. Throws std::invalid_argument when
// episodes < 1.
EvaluationResult evaluate(const Agent& agent, const env::ScenarioConfig& config, int episodes,
                          std::uint64_t seed);
EvaluationResult evaluate_random(const env::ScenarioConfig& config, int episodes,
                                 std::uint64_t seed);

// Streams of the evaluation environment and the random policy.
RngStreams derive_evaluation_streams(std::uint64_t seed);

}  // namespace xrnoma::aahc

#endif  // XRNOMA_EVALUATE_HPP_
