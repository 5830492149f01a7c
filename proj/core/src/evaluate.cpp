// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/evaluate.hpp"

#include <functional>
#include <stdexcept>

#include "xrnoma/distributions.hpp"
#include "xrnoma/ppo.hpp"

namespace xrnoma::aahc {
namespace {

using UplinkFn = std::function<std::vector<int>(const std::vector<double>&)>;
using DownlinkFn = std::function<std::vector<double>(const std::vector<double>&)>;

EvaluationResult run_episodes(const env::ScenarioConfig& config, int episodes,
                              const RngStreams& streams, const UplinkFn& act_u,
                              const DownlinkFn& act_d) {
  if (episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
  config.validate();
  env::Environment environment(config, streams.env_init, streams.fading, streams.augment);
  EvaluationResult out;
  out.episodes = episodes;
  for (int e = 0; e < episodes; ++e) {
    environment.reset();
    while (!environment.done()) {
      const auto up = environment.uplink_step(act_u(environment.uplink_state()));
      const auto down = environment.downlink_step(act_d(up.downlink_state));
      out.mean_ru += up.reward;
      out.mean_rd += down.reward;
      out.mean_rg += down.global_reward;
    }
    const env::KpiSummary k = environment.kpi();
    out.mean_iterations += k.iterations;
    out.total_delay_ms += k.total_delay_ms;
    out.retrans_pct += k.retrans_pct;
    out.max_ul_rate_gbps += k.max_ul_rate_gbps;
    out.energy_j += k.energy_j;
  }
  const double inv = 1.0 / episodes;
  out.mean_ru *= inv;
  out.mean_rd *= inv;
  out.mean_rg *= inv;
  out.mean_iterations *= inv;
  out.total_delay_ms *= inv;
  out.retrans_pct *= inv;
  out.max_ul_rate_gbps *= inv;
  out.energy_j *= inv;
  return out;
}

}  // namespace

std::vector<int> RandomPolicy::uplink_action(const env::ScenarioConfig& config) {
  std::vector<int> gamma(static_cast<std::size_t>(config.num_users));
  for (int& g : gamma) {
    g = static_cast<int>(uplink_.uniform_int(static_cast<std::uint64_t>(config.num_channels) + 1));
  }
  return gamma;
}

std::vector<double> RandomPolicy::downlink_action(const env::ScenarioConfig& config) {
  std::vector<double> power(static_cast<std::size_t>(config.num_users));
  for (double& p : power) p = downlink_.uniform(config.dl_power_min_w, config.dl_power_max_w);
  return power;
}

std::vector<int> greedy_uplink_action(const Agent& agent, const env::ScenarioConfig& config,
                                      const std::vector<double>& s_u) {
  const nn::Vector logits =
      agent.uplink_actor.mlps.at(0).forward(std::span<const double>(s_u));
  const auto a = nn::categorical_argmax(std::span<const double>(logits.data(), logits.size()));
  return env::decode_uplink_action(a, config.num_users, config.num_channels);
}

std::vector<double> greedy_downlink_action(const Agent& agent, const env::ScenarioConfig& config,
                                           const std::vector<double>& s_d) {
  const nn::Matrix mean = downlink_means(
      agent.downlink_actor, nn::Vector(nn::Vector::Map(s_d.data(), static_cast<Eigen::Index>(s_d.size()))),
      config.dl_power_min_w, config.dl_power_max_w);
  return std::vector<double>(mean.data(), mean.data() + mean.size());
}

RngStreams derive_evaluation_streams(std::uint64_t seed) {
  return {RngStream::derive(seed, "eval.envInit"),  RngStream::derive(seed, "eval.fading"),
          RngStream::derive(seed, "eval.augment"),  RngStream::derive(seed, "eval.policyUl"),
          RngStream::derive(seed, "eval.policyDl"), RngStream::derive(seed, "eval.shuffle")};
}

EvaluationResult evaluate(const Agent& agent, const env::ScenarioConfig& config, int episodes,
                          std::uint64_t seed) {
  if (agent.algorithm == Algorithm::kRandom) return evaluate_random(config, episodes, seed);
  return run_episodes(
      config, episodes, derive_evaluation_streams(seed),
      [&](const std::vector<double>& s) { return greedy_uplink_action(agent, config, s); },
      [&](const std::vector<double>& s) { return greedy_downlink_action(agent, config, s); });
}

EvaluationResult evaluate_random(const env::ScenarioConfig& config, int episodes,
                                 std::uint64_t seed) {
  const RngStreams streams = derive_evaluation_streams(seed);
  RandomPolicy policy(streams.policy_ul, streams.policy_dl);
  return run_episodes(
      config, episodes, streams,
      [&](const std::vector<double>&) { return policy.uplink_action(config); },
      [&](const std::vector<double>&) { return policy.downlink_action(config); });
}

}  // namespace xrnoma::aahc
