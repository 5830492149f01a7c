// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_TRAINER_HPP_
#define XRNOMA_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "xrnoma/adam.hpp"
#include "xrnoma/critic.hpp"
#include "xrnoma/env.hpp"
#include "xrnoma/hyperparams.hpp"
#include "xrnoma/mlp.hpp"

namespace xrnoma::aahc {

// Trained (or freshly initialized) networks of one learning algorithm.
struct Agent {
  Algorithm algorithm = Algorithm::kAahc;
  CriticLayout layout;
  nn::ParamSet uplink_actor;    // theta1
  nn::ParamSet downlink_actor;  // theta2
  nn::ParamSet critic;          // phi
  nn::ParamSet target_critic;   // phi'
};

// Draws the uplink actor from streams.policy_ul and the downlink actor and
// critic from streams.policy_dl; the target critic starts as a copy.
Agent make_agent(Algorithm algo, const env::ScenarioConfig& config, const Hyperparams& hp,
                 RngStreams& streams);
Agent make_agent(Algorithm algo, const env::ScenarioConfig& config, const Hyperparams& hp,
                 std::uint64_t seed);

// Aggregates of one trajectory-buffer cycle. Reward means are episodic
// returns of the episodes that finished inside the cycle; KPI fields are
// per-episode means over the same episodes (all zero if none finished).
struct CycleStats {
  long env_step = 0;
  int episodes = 0;
  double mean_ru = 0.0;
  double mean_rd = 0.0;
  double mean_rg = 0.0;
  double mean_iterations = 0.0;
  double retrans_pct = 0.0;
  double max_ul_rate_gbps = 0.0;
  double energy_j = 0.0;
  double total_delay_ms = 0.0;
  double wall_clock_ms = 0.0;
  // Update diagnostics (zero for a cycle without an update).
  bool updated = false;
  double uplink_loss = 0.0;
  double downlink_loss = 0.0;
  double critic_loss = 0.0;
};

struct TrainOptions {
  // Wall-clock time is nondeterministic; off by default so that metrics are
  // reproducible byte for byte.
  bool record_wall_clock = false;
  std::function<void(const CycleStats&)> on_cycle;
};

struct TrainResult {
  Agent agent;
  std::vector<CycleStats> cycles;
  int updates = 0;
  long env_steps = 0;
};

// Algorithm-1 loop for aahc, iterl and ctrl (they differ only in the critic
// layout). Throws std::invalid_argument for Algorithm::kRandom.
TrainResult train(Algorithm algo, const env::ScenarioConfig& config, const Hyperparams& hp,
                  std::uint64_t seed, const TrainOptions& options = {});

inline TrainResult train_aahc(const env::ScenarioConfig& config, const Hyperparams& hp,
                              std::uint64_t seed, const TrainOptions& options = {}) {
  return train(Algorithm::kAahc, config, hp, seed, options);
}
inline TrainResult train_iterl(const env::ScenarioConfig& config, const Hyperparams& hp,
                               std::uint64_t seed, const TrainOptions& options = {}) {
  return train(Algorithm::kIteRl, config, hp, seed, options);
}
inline TrainResult train_ctrl(const env::ScenarioConfig& config, const Hyperparams& hp,
                              std::uint64_t seed, const TrainOptions& options = {}) {
  return train(Algorithm::kCtrl, config, hp, seed, options);
}

// ---- lower-level pieces, exposed for testing ----

// One stored transition plus what PPO needs beyond the StepRecord.
struct Transition {
  env::StepRecord record;
  std::vector<double> a_d_raw;  // pre-clip Gaussian sample
  double log_prob_u = 0.0;
  double log_prob_d = 0.0;
  std::vector<double> s_d_next;  // empty when done
};

// Per-head values, advantages and targets for one filled buffer.
struct BufferTargets {
  std::vector<std::vector<double>> values;      // V_phi'(s_t) per head
  std::vector<std::vector<double>> advantages;  // GAE per head
  std::vector<std::vector<double>> targets;     // critic regression targets
  std::vector<double> uplink_advantages;
  std::vector<double> downlink_advantages;
};

BufferTargets compute_buffer_targets(const std::vector<Transition>& buffer,
                                     const CriticLayout& layout, const nn::ParamSet& target_critic,
                                     const Hyperparams& hp);

struct UpdateDiagnostics {
  double uplink_loss = 0.0;
  double downlink_loss = 0.0;
  double critic_loss = 0.0;
  int minibatches = 0;
};

struct Optimizers {
  nn::Adam uplink;
  nn::Adam downlink;
  nn::Adam critic;
};

Optimizers make_optimizers(const Agent& agent, const Hyperparams& hp);

// K epochs over shuffled minibatches; each minibatch steps both actors and
// the critic with their own Adam optimizers. Throws NonFiniteError.
UpdateDiagnostics update_agent(Agent& agent, Optimizers& optimizers,
                               const std::vector<Transition>& buffer,
                               const BufferTargets& targets, const env::ScenarioConfig& config,
                               const Hyperparams& hp, RngStream& shuffle);

}  // namespace xrnoma::aahc

#endif  // XRNOMA_TRAINER_HPP_
