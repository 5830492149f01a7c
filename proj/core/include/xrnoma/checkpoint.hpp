// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_CHECKPOINT_HPP_
#define XRNOMA_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xrnoma/env.hpp"
#include "xrnoma/hyperparams.hpp"
#include "xrnoma/mlp.hpp"
#include "xrnoma/trainer.hpp"

namespace xrnoma::harness {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointMeta {
  std::string algo;
  std::string scenario;
  long env_step = 0;
  std::uint64_t seed = 0;
  int version = kCheckpointVersion;
};

struct Checkpoint {
  CheckpointMeta meta;
  std::vector<std::pair<std::string, nn::ParamSet>> networks;

  // Throws CheckpointError when absent.
  const nn::ParamSet& network(const std::string& name) const;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON with layer sizes and every value as a hex-float string.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
// Throws CheckpointError on malformed text, a version mismatch or
// inconsistent shapes.
Checkpoint deserialize_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint make_checkpoint(const aahc::Agent& agent, const env::ScenarioConfig& config,
                           long env_step, std::uint64_t seed);
// Rebuilds an agent and checks every shape against config and hp.
aahc::Agent agent_from_checkpoint(const Checkpoint& checkpoint, const env::ScenarioConfig& config,
                                  const aahc::Hyperparams& hp);

}  // namespace xrnoma::harness

#endif  // XRNOMA_CHECKPOINT_HPP_
