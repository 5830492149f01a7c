// SPDX-License-Identifier: Apache-2.0
//
// xrnoma: train, evaluate and sweep the asynchronous uplink/downlink agents.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfcheck.hpp"
#include "xrnoma/checkpoint.hpp"
#include "xrnoma/config.hpp"
#include "xrnoma/evaluate.hpp"
#include "xrnoma/experiment.hpp"

namespace {

using xrnoma::harness::ResolvedConfig;

struct CommonFlags {
  std::string config_file;
  std::vector<std::string> settings;
  std::string scenario;
  std::string algo;
  std::string output_dir;
  long steps = -1;
  int episodes = -1;
  bool wall_clock = false;
  bool print_config = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool training) {
  cmd->add_option("-c,--config", f.config_file, "key = value config file");
  cmd->add_option("-s,--set", f.settings, "override one setting, e.g. hyper.epochs=4")
      ->take_all();
  cmd->add_option("--scenario", f.scenario, "m-n scenario preset");
  cmd->add_option("--episodes", f.episodes, "evaluation episodes");
  cmd->add_flag("--print-config", f.print_config, "echo the resolved configuration");
  if (training) {
    cmd->add_option("--algo", f.algo, "aahc, iterl, ctrl or random");
    cmd->add_option("--steps", f.steps, "environment steps per seed");
    cmd->add_option("-o,--out", f.output_dir, "output directory");
    cmd->add_flag("--wall-clock", f.wall_clock, "record wall-clock time (breaks byte determinism)");
  }
}

// defaults < config file < flags
ResolvedConfig resolve(const CommonFlags& f, const std::vector<std::string>& extra) {
  ResolvedConfig cfg;
  if (!f.config_file.empty()) cfg = xrnoma::harness::load_config_file(f.config_file, cfg);
  auto set = [&cfg](const std::string& key, const std::string& value) {
    try {
      xrnoma::harness::apply_setting(cfg, key, value);
    } catch (const xrnoma::harness::ConfigError& e) {
      throw xrnoma::harness::ConfigError("command line", 0, e.what());
    }
  };
  for (const auto& kv : f.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw xrnoma::harness::ConfigError("command line", 0,
                                         "--set expects key=value, got '" + kv + "'");
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.scenario.empty()) set("scenario", f.scenario);
  if (!f.algo.empty()) set("run.algo", f.algo);
  if (!f.output_dir.empty()) set("run.output_dir", f.output_dir);
  if (f.steps >= 0) set("run.total_steps", std::to_string(f.steps));
  if (f.episodes >= 0) set("run.eval_episodes", std::to_string(f.episodes));
  if (f.wall_clock) set("run.wall_clock", "true");
  for (std::size_t i = 0; i + 1 < extra.size(); i += 2) set(extra[i], extra[i + 1]);
  xrnoma::harness::validate(cfg);
  return cfg;
}

void print_evaluation(const xrnoma::aahc::EvaluationResult& e) {
  std::cout << "episodes          " << e.episodes << '\n'
            << "mean_iterations   " << e.mean_iterations << '\n'
            << "retrans_pct       " << e.retrans_pct << '\n'
            << "total_delay_ms    " << e.total_delay_ms << '\n'
            << "max_ul_rate_gbps  " << e.max_ul_rate_gbps << '\n'
            << "energy_j          " << e.energy_j << '\n'
            << "mean_ru           " << e.mean_ru << '\n'
            << "mean_rd           " << e.mean_rd << '\n'
            << "mean_rg           " << e.mean_rg << '\n';
}

int run_sweep(const ResolvedConfig& cfg, bool print_config) {
  if (print_config) std::cout << xrnoma::harness::render_config(cfg);
  const auto result = xrnoma::harness::run_experiment(cfg, &std::cerr);
  for (const auto& s : result.seeds) {
    if (s.ok) {
      std::cout << "seed " << s.seed << ": iterations " << s.evaluation.mean_iterations
                << ", retrans " << s.evaluation.retrans_pct << "%, mean_rg "
                << s.evaluation.mean_rg << '\n';
    } else {
      std::cout << "seed " << s.seed << ": FAILED: " << s.error << '\n';
    }
  }
  std::cout << "summary: " << result.summary_path.string() << '\n';
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous uplink/downlink NOMA transmission: simulator and trainers"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  std::uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train", "train one seed, then evaluate it");
  add_common(train, train_flags, true);
  auto* seed_opt = train->add_option("--seed", train_seed, "global random seed");

  CommonFlags sweep_flags;
  std::string seed_list;
  auto* sweep = app.add_subcommand("sweep", "train and evaluate several seeds, then summarize");
  add_common(sweep, sweep_flags, true);
  sweep->add_option("--seeds", seed_list, "comma-separated seeds, e.g. 0,1,2");

  CommonFlags eval_flags;
  std::string checkpoint;
  std::uint64_t eval_seed = 0;
  bool eval_random = false;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint or the random policy");
  add_common(evaluate, eval_flags, false);
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint written by train or sweep");
  evaluate->add_option("--seed", eval_seed, "evaluation seed");
  evaluate->add_flag("--random", eval_random, "evaluate the random policy instead");

  app.add_subcommand("selfcheck", "run the built-in oracle and property checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      std::vector<std::string> extra;
      if (seed_opt->count() > 0) extra = {"run.seeds", std::to_string(train_seed)};
      ResolvedConfig cfg = resolve(train_flags, extra);
      if (cfg.run.seeds.size() != 1) {
        std::cerr << "train runs exactly one seed; use sweep for several\n";
        return 2;
      }
      return run_sweep(cfg, train_flags.print_config);
    }
    if (*sweep) {
      std::vector<std::string> extra;
      if (!seed_list.empty()) extra = {"run.seeds", seed_list};
      return run_sweep(resolve(sweep_flags, extra), sweep_flags.print_config);
    }
    if (*evaluate) {
      ResolvedConfig cfg = resolve(eval_flags, {});
      if (eval_flags.print_config) std::cout << xrnoma::harness::render_config(cfg);
      if (eval_random) {
        print_evaluation(
            xrnoma::aahc::evaluate_random(cfg.scenario, cfg.run.eval_episodes, eval_seed));
        return 0;
      }
      if (checkpoint.empty()) {
        std::cerr << "evaluate needs --checkpoint or --random\n";
        return 2;
      }
      const auto ck = xrnoma::harness::load_checkpoint(checkpoint);
      if (ck.meta.scenario != cfg.scenario.name) {
        xrnoma::harness::apply_setting(cfg, "scenario", ck.meta.scenario);
      }
      const auto agent = xrnoma::harness::agent_from_checkpoint(ck, cfg.scenario, cfg.hyper);
      print_evaluation(
          xrnoma::aahc::evaluate(agent, cfg.scenario, cfg.run.eval_episodes, eval_seed));
      return 0;
    }
    const int failures = xrnoma::tools::run_selfcheck(std::cout);
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
