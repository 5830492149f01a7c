// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "xrnoma/checkpoint.hpp"
#include "xrnoma/metrics.hpp"

namespace xrnoma::harness {
namespace {

std::string g17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> kpi_fields(const SeedOutcome& s) {
  const auto& e = s.evaluation;
  return {e.mean_ru,     e.mean_rd,          e.mean_rg,  e.mean_iterations, e.retrans_pct,
          e.max_ul_rate_gbps, e.energy_j, e.total_delay_ms, s.final_train_rg};
}

std::string summary_line(const ResolvedConfig& c, const std::string& row, std::size_t seeds,
                         const std::vector<double>& values) {
  std::string out = std::string(aahc::to_string(c.run.algorithm)) + "," + c.scenario.name + "," +
                    row + "," + std::to_string(seeds) + "," + std::to_string(c.run.eval_episodes);
  for (double v : values) out += "," + g17(v);
  return out;
}

}  // namespace

bool ExperimentResult::all_ok() const {
  for (const auto& s : seeds) {
    if (!s.ok) return false;
  }
  return !seeds.empty();
}

std::string run_stem(const ResolvedConfig& config, std::uint64_t seed) {
  return std::string(aahc::to_string(config.run.algorithm)) + "_" + config.scenario.name +
         "_seed" + std::to_string(seed);
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

SeedOutcome run_seed(const ResolvedConfig& config, std::uint64_t seed, std::ostream* log) {
  validate(config);
  const std::filesystem::path dir(config.run.output_dir);
  std::filesystem::create_directories(dir);
  const std::string stem = run_stem(config, seed);
  const std::string algo(aahc::to_string(config.run.algorithm));
  SeedOutcome out;
  out.seed = seed;
  out.metrics_path = dir / ("metrics_" + stem + ".csv");

  if (config.run.algorithm == aahc::Algorithm::kRandom) {
    // Nothing to train: the metrics file holds a single evaluation row.
    out.evaluation = aahc::evaluate_random(config.scenario, config.run.eval_episodes, seed);
    MetricsRow row{algo, config.scenario.name, seed, 0, out.evaluation.episodes,
                   out.evaluation.mean_ru, out.evaluation.mean_rd, out.evaluation.mean_rg,
                   out.evaluation.mean_iterations, out.evaluation.retrans_pct,
                   out.evaluation.max_ul_rate_gbps, out.evaluation.energy_j,
                   out.evaluation.total_delay_ms, 0.0};
    write_metrics(out.metrics_path, {row});
    out.final_train_rg = row.mean_rg;
  } else {
    MetricsWriter writer(out.metrics_path);
    aahc::TrainOptions options;
    options.record_wall_clock = config.run.record_wall_clock;
    options.on_cycle = [&](const aahc::CycleStats& s) {
      writer.write(to_metrics_row(s, algo, config.scenario.name, seed));
      if (log) {
        *log << stem << " step " << s.env_step << " episodes " << s.episodes << " mean_rg "
             << s.mean_rg << " iterations " << s.mean_iterations << '\n';
      }
    };
    const aahc::TrainResult trained =
        aahc::train(config.run.algorithm, config.scenario, config.hyper, seed, options);
    out.env_steps = trained.env_steps;
    if (!trained.cycles.empty()) out.final_train_rg = trained.cycles.back().mean_rg;
    out.checkpoint_path = dir / ("checkpoint_" + stem + ".json");
    save_checkpoint(out.checkpoint_path,
                    make_checkpoint(trained.agent, config.scenario, trained.env_steps, seed));
    out.evaluation =
        aahc::evaluate(trained.agent, config.scenario, config.run.eval_episodes, seed);
  }
  out.ok = true;
  if (log) {
    *log << stem << " evaluation: iterations " << out.evaluation.mean_iterations << " retrans_pct "
         << out.evaluation.retrans_pct << " mean_rg " << out.evaluation.mean_rg << '\n';
  }
  return out;
}

ExperimentResult run_experiment(const ResolvedConfig& config, std::ostream* log) {
  validate(config);
  ExperimentResult result;
  const std::filesystem::path dir(config.run.output_dir);
  std::filesystem::create_directories(dir);
  result.config_path = dir / "resolved_config.txt";
  {
    std::ofstream echo(result.config_path, std::ios::trunc);
    echo << render_config(config);
    if (!echo) throw std::runtime_error(result.config_path.string() + ": write failed");
  }
  for (std::uint64_t seed : config.run.seeds) {
    try {
      result.seeds.push_back(run_seed(config, seed, log));
    } catch (const std::exception& e) {
      SeedOutcome failed;
      failed.seed = seed;
      failed.error = e.what();
      if (log) *log << "seed " << seed << " failed: " << e.what() << '\n';
      result.seeds.push_back(std::move(failed));
    }
  }

  result.summary_path = dir / "summary.csv";
  std::ofstream summary(result.summary_path, std::ios::trunc);
  summary << kSummaryHeader << '\n';
  std::vector<std::vector<double>> columns;
  std::size_t ok = 0;
  for (const auto& s : result.seeds) {
    if (!s.ok) continue;
    const auto values = kpi_fields(s);
    columns.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) columns[i].push_back(values[i]);
    summary << summary_line(config, std::to_string(s.seed), 1, values) << '\n';
    ++ok;
  }
  if (ok > 0) {
    std::vector<double> means, stds;
    for (const auto& col : columns) {
      const MeanStd ms = mean_std(col);
      means.push_back(ms.mean);
      stds.push_back(ms.std);
    }
    summary << summary_line(config, "mean", ok, means) << '\n';
    summary << summary_line(config, "std", ok, stds) << '\n';
  }
  if (!summary) throw std::runtime_error(result.summary_path.string() + ": write failed");
  return result;
}

}  // namespace xrnoma::harness
