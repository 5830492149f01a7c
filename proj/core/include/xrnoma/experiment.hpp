// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_EXPERIMENT_HPP_
#define XRNOMA_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "xrnoma/config.hpp"
#include "xrnoma/evaluate.hpp"

namespace xrnoma::harness {

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  long env_steps = 0;
  double final_train_rg = 0.0;  // mean_rg of the last metrics row
  aahc::EvaluationResult evaluation;
  std::filesystem::path metrics_path;
  std::filesystem::path checkpoint_path;  // empty for the random baseline
};

struct ExperimentResult {
  std::vector<SeedOutcome> seeds;
  std::filesystem::path summary_path;
  std::filesystem::path config_path;

  bool all_ok() const;
  int exit_code() const { return all_ok() ? 0 : 1; }
};

// "<algo>_<scenario>_seed<seed>", the stem of per-seed output files.
std::string run_stem(const ResolvedConfig& config, std::uint64_t seed);

// One seed: train (skipped for random), write the metrics CSV and the
// checkpoint, evaluate. Throws on failure.
SeedOutcome run_seed(const ResolvedConfig& config, std::uint64_t seed, std::ostream* log = nullptr);

// Every seed of config.run.seeds in order. A failing seed is recorded and
// the rest still run. Writes resolved_config.txt and summary.csv (per-seed
// rows, then mean and sample std over the successful seeds).
ExperimentResult run_experiment(const ResolvedConfig& config, std::ostream* log = nullptr);

inline constexpr std::string_view kSummaryHeader =
    "algo,scenario,row,seeds,eval_episodes,mean_ru,mean_rd,mean_rg,mean_iterations,retrans_pct,"
    "max_ul_rate_gbps,energy_j,total_delay_ms,final_train_rg";

// Mean and sample standard deviation (n - 1; zero for one value).
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

}  // namespace xrnoma::harness

#endif  // XRNOMA_EXPERIMENT_HPP_
