// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "xrnoma/checkpoint.hpp"
#include "xrnoma/config.hpp"
#include "xrnoma/evaluate.hpp"
#include "xrnoma/experiment.hpp"
#include "xrnoma/metrics.hpp"
#include "xrnoma/trainer.hpp"

namespace xrnoma::harness {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            ("xrnoma_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

// ---- config ----

TEST(Config, EmptyTextGivesDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.scenario.name, "3-4");
  EXPECT_EQ(c.scenario.bandwidth_hz, 10e9);
  EXPECT_EQ(c.scenario.utti_s, 0.5e-3);
  EXPECT_EQ(c.scenario.dtti_s, 1.5e-3);
  EXPECT_EQ(c.scenario.dl_power_max_w, 20.0);
  EXPECT_EQ(c.hyper.gamma, 0.99);
  EXPECT_EQ(c.hyper.gae_lambda, 0.95);
  EXPECT_EQ(c.hyper.batch_size, 64);
  EXPECT_EQ(c.hyper.entropy_coef, 1e-3);
  EXPECT_EQ(c.hyper.lr_critic, 5e-5);
  EXPECT_EQ(c.run.algorithm, aahc::Algorithm::kAahc);
  EXPECT_EQ(c.run.seeds, std::vector<std::uint64_t>{0});
}

TEST(Config, ScenarioPreset) {
  const auto c = parse_config("scenario = 3-8\n");
  EXPECT_EQ(c.scenario.num_channels, 3);
  EXPECT_EQ(c.scenario.num_users, 8);
  EXPECT_EQ(c.scenario.name, "3-8");
}

TEST(Config, LaterLayersWin) {
  const auto file = parse_config("hyper.epochs = 4\nrun.algo = ctrl  # baseline\n");
  ResolvedConfig flags = file;
  apply_setting(flags, "hyper.epochs", "7");
  validate(flags);
  EXPECT_EQ(file.hyper.epochs, 4);
  EXPECT_EQ(flags.hyper.epochs, 7);
  EXPECT_EQ(flags.run.algorithm, aahc::Algorithm::kCtrl);
  const auto layered = parse_config("hyper.epochs = 9\n", "<flags>", file);
  EXPECT_EQ(layered.hyper.epochs, 9);
  EXPECT_EQ(layered.run.algorithm, aahc::Algorithm::kCtrl);
}

TEST(Config, ErrorsCiteLine) {
  try {
    parse_config("# comment\nhyper.gamma = 0.9\nhyper.nope = 1\n", "cfg.txt");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("cfg.txt:3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("hyper.nope"), std::string::npos);
  }
  EXPECT_THROW(parse_config("hyper.gamma 0.9\n"), ConfigError);
  EXPECT_THROW(parse_config("hyper.epochs = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config("hyper.gamma = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("run.seeds = 1,1\n"), ConfigError);
  EXPECT_THROW(parse_config("run.algo = sarsa\n"), ConfigError);
}

TEST(Config, RenderRoundTrip) {
  const auto c = parse_config(
      "scenario = 2-5\nrun.seeds = 3,1,4\nrun.algo = iterl\nfading.beta0 = 1.2345678901234e-7\n"
      "hyper.hidden = 32,16\nhyper.lr_uplink = 3e-4\nscenario.noise_psd_dbm_hz = -170\n"
      "hyper.critic_target = conventional\n");
  const std::string text = render_config(c);
  const auto again = parse_config(text, "rendered");
  EXPECT_EQ(render_config(again), text);
  EXPECT_EQ(again.scenario.num_users, 5);
  EXPECT_EQ(again.run.seeds, (std::vector<std::uint64_t>{3, 1, 4}));
  EXPECT_EQ(again.scenario.fading.beta0, 1.2345678901234e-7);
  EXPECT_EQ(again.scenario.noise_psd_w_hz, c.scenario.noise_psd_w_hz);
  EXPECT_EQ(again.hyper.hidden, (std::vector<int>{32, 16}));
  EXPECT_EQ(again.hyper.critic_target, aahc::CriticTarget::kConventional);
}

TEST(Config, LoadMissingFileFails) {
  EXPECT_THROW(load_config_file("/nonexistent/xrnoma.cfg"), ConfigError);
}

// ---- metrics ----

MetricsRow sample_row(long step) {
  return MetricsRow{"aahc", "3-4", 2, step, 5, -0.123456789, -1.5, -7.25, 6.2, 12.5, 3.14159265,
                    0.0421, 9.87654321, 0.0};
}

TEST(Metrics, HeaderOnlyFile) {
  TempDir dir;
  const auto p = dir.path() / "m.csv";
  write_metrics(p, {});
  EXPECT_EQ(slurp(p), std::string(kMetricsHeader) + "\n");
  EXPECT_TRUE(read_metrics(p).empty());
}

TEST(Metrics, ParseBackToSixDigits) {
  TempDir dir;
  const auto p = dir.path() / "m.csv";
  const std::vector<MetricsRow> rows{sample_row(2048), sample_row(4096)};
  write_metrics(p, rows);
  const auto back = read_metrics(p);
  ASSERT_EQ(back.size(), 2u);
  const auto& a = rows[0];
  const auto& b = back[0];
  EXPECT_EQ(b.algo, "aahc");
  EXPECT_EQ(b.seed, 2u);
  EXPECT_EQ(b.env_step, 2048);
  EXPECT_EQ(b.episodes, 5);
  for (auto [x, y] : {std::pair{a.mean_ru, b.mean_ru}, {a.max_ul_rate_gbps, b.max_ul_rate_gbps},
                      {a.total_delay_ms, b.total_delay_ms}, {a.energy_j, b.energy_j}}) {
    EXPECT_LE(std::abs(x - y), 5e-6 * std::abs(x));
  }
  EXPECT_THROW(parse_metrics_row("aahc,3-4,1"), std::invalid_argument);
}

TEST(Metrics, AppendContinuesMonotonically) {
  TempDir dir;
  const auto p = dir.path() / "m.csv";
  {
    MetricsWriter w(p);
    w.write(sample_row(100));
    w.write(sample_row(200));
    EXPECT_THROW(w.write(sample_row(150)), std::invalid_argument);
  }
  {
    MetricsWriter w(p, true);
    EXPECT_THROW(w.write(sample_row(199)), std::invalid_argument);
    w.write(sample_row(300));
  }
  const auto rows = read_metrics(p);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2].env_step, 300);
  std::ofstream(dir.path() / "bad.csv") << "not,a,header\n";
  EXPECT_THROW(read_metrics(dir.path() / "bad.csv"), MetricsIoError);
  EXPECT_THROW(MetricsWriter(dir.path() / "bad.csv", true), MetricsIoError);
}

// ---- checkpoint ----

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  TempDir dir;
  const auto cfg = env::ScenarioConfig::preset("2-3");
  aahc::Hyperparams hp;
  hp.hidden = {8, 8};
  const auto agent = aahc::make_agent(aahc::Algorithm::kAahc, cfg, hp, 5);
  const auto ck = make_checkpoint(agent, cfg, 1234, 5);
  save_checkpoint(dir.path() / "a.json", ck);
  const auto loaded = load_checkpoint(dir.path() / "a.json");
  save_checkpoint(dir.path() / "b.json", loaded);
  EXPECT_EQ(slurp(dir.path() / "a.json"), slurp(dir.path() / "b.json"));
  EXPECT_EQ(loaded.meta.env_step, 1234);
  EXPECT_EQ(loaded.meta.algo, "aahc");
  const auto back = agent_from_checkpoint(loaded, cfg, hp);
  EXPECT_TRUE(back.uplink_actor.identical(agent.uplink_actor));
  EXPECT_TRUE(back.downlink_actor.identical(agent.downlink_actor));
  EXPECT_TRUE(back.critic.identical(agent.critic));
  EXPECT_TRUE(back.target_critic.identical(agent.target_critic));
  EXPECT_THROW(agent_from_checkpoint(loaded, env::ScenarioConfig::preset("3-4"), hp),
               CheckpointError);
  EXPECT_THROW(loaded.network("nope"), CheckpointError);
}

TEST(Checkpoint, MalformedInputFailsCleanly) {
  TempDir dir;
  const auto cfg = env::ScenarioConfig::preset("2-3");
  aahc::Hyperparams hp;
  hp.hidden = {4};
  const auto text = serialize_checkpoint(
      make_checkpoint(aahc::make_agent(aahc::Algorithm::kCtrl, cfg, hp, 1), cfg, 0, 1));
  for (std::size_t cut : {std::size_t{0}, text.size() / 3, text.size() - 3}) {
    EXPECT_THROW(deserialize_checkpoint(text.substr(0, cut)), CheckpointError) << cut;
  }
  std::string wrong_version = text;
  const auto pos = wrong_version.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  wrong_version.replace(pos, 12, "\"version\": 9");
  EXPECT_THROW(deserialize_checkpoint(wrong_version), CheckpointError);
  EXPECT_THROW(load_checkpoint(dir.path() / "missing.json"), CheckpointError);
}

TEST(Checkpoint, LoadedPolicyEvaluatesIdentically) {
  TempDir dir;
  const auto cfg = env::ScenarioConfig::preset("3-4");
  aahc::Hyperparams hp;
  hp.hidden = {16, 16};
  hp.trajectory_length = 64;
  hp.batch_size = 16;
  hp.total_steps = 128;
  const auto trained = aahc::train_aahc(cfg, hp, 3);
  save_checkpoint(dir.path() / "c.json", make_checkpoint(trained.agent, cfg, 128, 3));
  const auto loaded = agent_from_checkpoint(load_checkpoint(dir.path() / "c.json"), cfg, hp);
  const auto a = aahc::evaluate(trained.agent, cfg, 5, 3);
  const auto b = aahc::evaluate(loaded, cfg, 5, 3);
  EXPECT_EQ(a.mean_iterations, b.mean_iterations);
  EXPECT_EQ(a.mean_rg, b.mean_rg);
  EXPECT_EQ(a.energy_j, b.energy_j);
  EXPECT_EQ(a.total_delay_ms, b.total_delay_ms);
  EXPECT_EQ(a.retrans_pct, b.retrans_pct);
}

// ---- experiment ----

TEST(Experiment, RandomSingleSeed) {
  TempDir dir;
  auto c = parse_config("run.algo = random\nrun.eval_episodes = 10\n");
  c.run.output_dir = dir.path().string();
  const auto r = run_experiment(c);
  ASSERT_EQ(r.seeds.size(), 1u);
  EXPECT_TRUE(r.all_ok());
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_TRUE(r.seeds[0].checkpoint_path.empty());
  const auto rows = read_metrics(r.seeds[0].metrics_path);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].episodes, 10);
  EXPECT_TRUE(fs::exists(r.summary_path));
  EXPECT_EQ(parse_config(slurp(r.config_path)).run.algorithm, aahc::Algorithm::kRandom);
}

TEST(Experiment, TwoSeedsWriteCheckpointsAndSummary) {
  TempDir dir;
  auto c = parse_config(
      "scenario = 2-3\nrun.seeds = 0,1\nrun.total_steps = 64\nrun.eval_episodes = 3\n"
      "hyper.trajectory_length = 32\nhyper.batch_size = 16\nhyper.hidden = 8,8\n");
  c.run.output_dir = dir.path().string();
  const auto r = run_experiment(c);
  ASSERT_TRUE(r.all_ok());
  int checkpoints = 0, summaries = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    const auto name = e.path().filename().string();
    checkpoints += name.rfind("checkpoint_", 0) == 0;
    summaries += name == "summary.csv";
  }
  EXPECT_EQ(checkpoints, 2);
  EXPECT_EQ(summaries, 1);
  EXPECT_EQ(run_stem(c, 1), "aahc_2-3_seed1");

  std::ifstream in(r.summary_path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kSummaryHeader);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(split(line));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2][2], "mean");
  EXPECT_EQ(rows[3][2], "std");
  for (std::size_t col = 5; col < rows[0].size(); ++col) {
    const double a = std::stod(rows[0][col]), b = std::stod(rows[1][col]);
    const double mean = (a + b) / 2.0;
    const double sd = std::sqrt(((a - mean) * (a - mean) + (b - mean) * (b - mean)) / 1.0);
    EXPECT_NEAR(std::stod(rows[2][col]), mean, 1e-12 * std::max(1.0, std::abs(mean))) << col;
    EXPECT_NEAR(std::stod(rows[3][col]), sd, 1e-12 * std::max(1.0, sd)) << col;
  }
  EXPECT_DOUBLE_EQ(std::stod(rows[0][7]), r.seeds[0].evaluation.mean_rg);
}

TEST(Experiment, MeanStd) {
  const auto one = mean_std({4.0});
  EXPECT_EQ(one.mean, 4.0);
  EXPECT_EQ(one.std, 0.0);
  const auto three = mean_std({1.0, 2.0, 6.0});
  EXPECT_DOUBLE_EQ(three.mean, 3.0);
  EXPECT_DOUBLE_EQ(three.std, std::sqrt(7.0));
}

TEST(Experiment, TrainingMetricsAreReproducible) {
  TempDir dir;
  auto c = parse_config(
      "scenario = 2-3\nrun.total_steps = 96\nrun.eval_episodes = 2\n"
      "hyper.trajectory_length = 32\nhyper.batch_size = 16\nhyper.hidden = 8,8\n");
  c.run.output_dir = (dir.path() / "a").string();
  const auto a = run_experiment(c);
  c.run.output_dir = (dir.path() / "b").string();
  const auto b = run_experiment(c);
  ASSERT_TRUE(a.all_ok() && b.all_ok());
  EXPECT_EQ(slurp(a.seeds[0].metrics_path), slurp(b.seeds[0].metrics_path));
  EXPECT_EQ(read_metrics(a.seeds[0].metrics_path).size(), 3u);
}

}  // namespace
}  // namespace xrnoma::harness
