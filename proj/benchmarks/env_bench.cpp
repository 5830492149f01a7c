// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "xrnoma/env.hpp"
#include "xrnoma/evaluate.hpp"

namespace {

using namespace xrnoma;

void BM_EnvironmentIteration(benchmark::State& state) {
  const auto cfg = env::ScenarioConfig::preset("3-" + std::to_string(state.range(0)));
  const RngStreams s = derive_rng_streams(4);
  env::Environment environment(cfg, s.env_init, s.fading, s.augment);
  aahc::RandomPolicy policy(s.policy_ul, s.policy_dl);
  environment.reset();
  for (auto _ : state) {
    if (environment.done()) environment.reset();
    environment.uplink_step(policy.uplink_action(cfg));
    benchmark::DoNotOptimize(environment.downlink_step(policy.downlink_action(cfg)));
  }
}
BENCHMARK(BM_EnvironmentIteration)->DenseRange(4, 8, 2);

}  // namespace
