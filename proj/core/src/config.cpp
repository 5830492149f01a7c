// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace xrnoma::harness {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError("", 0,
                    "invalid value '" + std::string(value) + "' for " + std::string(key) +
                        " (expected " + expected + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a finite number");
  }
  return out;
}

long to_long(std::string_view key, std::string_view v) {
  long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  const long x = to_long(key, v);
  if (x < -2147483647L || x > 2147483647L) bad_value(key, v, "a 32-bit integer");
  return static_cast<int>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto end = comma == std::string_view::npos ? v.size() : comma;
    out.push_back(trim(v.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fmt(long x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(bool x) { return x ? "true" : "false"; }

struct Entry {
  std::string key;
  std::function<void(ResolvedConfig&, std::string_view, std::string_view)> set;
  // Empty when the key is an alias that render_config leaves out.
  std::function<std::string(const ResolvedConfig&)> get;
};

template <typename T>
Entry number(std::string key, T ResolvedConfig::*section, double T::*field) {
  return {std::move(key),
          [section, field](ResolvedConfig& c, std::string_view k, std::string_view v) {
            (c.*section).*field = to_double(k, v);
          },
          [section, field](const ResolvedConfig& c) { return fmt((c.*section).*field); }};
}

template <typename T>
Entry integer(std::string key, T ResolvedConfig::*section, int T::*field) {
  return {std::move(key),
          [section, field](ResolvedConfig& c, std::string_view k, std::string_view v) {
            (c.*section).*field = to_int(k, v);
          },
          [section, field](const ResolvedConfig& c) { return fmt((c.*section).*field); }};
}

void set_scenario_name(ResolvedConfig& c, std::string_view k, std::string_view v) {
  env::ScenarioConfig preset;
  try {
    preset = env::ScenarioConfig::preset(v);
  } catch (const std::invalid_argument&) {
    bad_value(k, v, "m-n with m, n >= 1");
  }
  c.scenario.name = preset.name;
  c.scenario.num_channels = preset.num_channels;
  c.scenario.num_users = preset.num_users;
}

void rename_scenario(ResolvedConfig& c) {
  c.scenario.name =
      std::to_string(c.scenario.num_channels) + "-" + std::to_string(c.scenario.num_users);
}

double watt_to_dbm(double w_per_hz) { return 10.0 * std::log10(w_per_hz * 1000.0); }

const std::vector<Entry>& entries() {
  using C = ResolvedConfig;
  using S = env::ScenarioConfig;
  using H = aahc::Hyperparams;
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    // run.
    t.push_back({"run.algo",
                 [](C& c, std::string_view k, std::string_view v) {
                   try {
                     c.run.algorithm = aahc::parse_algorithm(v);
                   } catch (const std::invalid_argument&) {
                     bad_value(k, v, "aahc, iterl, ctrl or random");
                   }
                 },
                 [](const C& c) { return std::string(aahc::to_string(c.run.algorithm)); }});
    t.push_back({"run.seeds",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.run.seeds.clear();
                   for (const auto& item : split_list(v)) {
                     std::uint64_t s = 0;
                     const auto r = std::from_chars(item.data(), item.data() + item.size(), s);
                     if (item.empty() || r.ec != std::errc() || r.ptr != item.data() + item.size()) {
                       bad_value(k, v, "a comma-separated list of unsigned integers");
                     }
                     c.run.seeds.push_back(s);
                   }
                 },
                 [](const C& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.run.seeds.size(); ++i) {
                     out += (i ? "," : "") + std::to_string(c.run.seeds[i]);
                   }
                   return out;
                 }});
    t.push_back({"run.total_steps",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.hyper.total_steps = to_long(k, v);
                 },
                 [](const C& c) { return fmt(c.hyper.total_steps); }});
    t.push_back({"run.output_dir",
                 [](C& c, std::string_view, std::string_view v) { c.run.output_dir = v; },
                 [](const C& c) { return c.run.output_dir; }});
    t.push_back(integer("run.eval_episodes", &C::run, &RunSpec::eval_episodes));
    t.push_back({"run.wall_clock",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.run.record_wall_clock = to_bool(k, v);
                 },
                 [](const C& c) { return fmt(c.run.record_wall_clock); }});
    // scenario.
    t.push_back({"scenario", set_scenario_name, nullptr});
    t.push_back({"scenario.name", set_scenario_name,
                 [](const C& c) { return c.scenario.name; }});
    t.push_back({"scenario.num_channels",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.scenario.num_channels = to_int(k, v);
                   rename_scenario(c);
                 },
                 nullptr});
    t.push_back({"scenario.num_users",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.scenario.num_users = to_int(k, v);
                   rename_scenario(c);
                 },
                 nullptr});
    t.push_back(number("scenario.bandwidth_hz", &C::scenario, &S::bandwidth_hz));
    t.push_back({"scenario.noise_psd_dbm_hz",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.scenario.noise_psd_w_hz = env::dbm_per_hz_to_watt_per_hz(to_double(k, v));
                 },
                 [](const C& c) {
                   // dBm is the readable form; fall back to W/Hz when the
                   // conversion would not reproduce the value exactly.
                   const double dbm = watt_to_dbm(c.scenario.noise_psd_w_hz);
                   if (env::dbm_per_hz_to_watt_per_hz(dbm) == c.scenario.noise_psd_w_hz) {
                     return fmt(dbm);
                   }
                   return std::string();
                 }});
    t.push_back({"scenario.noise_psd_w_hz",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.scenario.noise_psd_w_hz = to_double(k, v);
                 },
                 [](const C& c) {
                   const double dbm = watt_to_dbm(c.scenario.noise_psd_w_hz);
                   if (env::dbm_per_hz_to_watt_per_hz(dbm) == c.scenario.noise_psd_w_hz) {
                     return std::string();
                   }
                   return fmt(c.scenario.noise_psd_w_hz);
                 }});
    t.push_back(number("scenario.utti_s", &C::scenario, &S::utti_s));
    t.push_back(number("scenario.dtti_s", &C::scenario, &S::dtti_s));
    t.push_back(number("scenario.dl_power_min_w", &C::scenario, &S::dl_power_min_w));
    t.push_back(number("scenario.dl_power_max_w", &C::scenario, &S::dl_power_max_w));
    t.push_back(number("scenario.buffer_min_mbit", &C::scenario, &S::buffer_min_mbit));
    t.push_back(number("scenario.buffer_max_mbit", &C::scenario, &S::buffer_max_mbit));
    t.push_back(number("scenario.ul_power_min_w", &C::scenario, &S::ul_power_min_w));
    t.push_back(number("scenario.ul_power_max_w", &C::scenario, &S::ul_power_max_w));
    t.push_back(number("scenario.augment_min", &C::scenario, &S::augment_min));
    t.push_back(number("scenario.augment_max", &C::scenario, &S::augment_max));
    t.push_back(integer("scenario.max_iterations", &C::scenario, &S::max_iterations));
    t.push_back(number("scenario.area_x_m", &C::scenario, &S::area_x_m));
    t.push_back(number("scenario.area_y_m", &C::scenario, &S::area_y_m));
    t.push_back(number("scenario.walk_step_m", &C::scenario, &S::walk_step_m));
    t.push_back(number("scenario.power_epsilon_w", &C::scenario, &S::power_epsilon_w));
    // fading.
    auto fading = [&t](std::string key, double channel::FadingParams::*field) {
      t.push_back({std::move(key),
                   [field](C& c, std::string_view k, std::string_view v) {
                     c.scenario.fading.*field = to_double(k, v);
                   },
                   [field](const C& c) { return fmt(c.scenario.fading.*field); }});
    };
    fading("fading.beta0", &channel::FadingParams::beta0);
    fading("fading.alpha", &channel::FadingParams::alpha);
    fading("fading.rice_k", &channel::FadingParams::rice_k);
    fading("fading.height_m", &channel::FadingParams::height);
    t.push_back({"fading.los_re",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.scenario.fading.los.real(to_double(k, v));
                 },
                 [](const C& c) { return fmt(c.scenario.fading.los.real()); }});
    t.push_back({"fading.los_im",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.scenario.fading.los.imag(to_double(k, v));
                 },
                 [](const C& c) { return fmt(c.scenario.fading.los.imag()); }});
    // hyper.
    t.push_back(number("hyper.gamma", &C::hyper, &H::gamma));
    t.push_back(number("hyper.gae_lambda", &C::hyper, &H::gae_lambda));
    t.push_back(number("hyper.clip_epsilon", &C::hyper, &H::clip_epsilon));
    t.push_back(integer("hyper.epochs", &C::hyper, &H::epochs));
    t.push_back(integer("hyper.batch_size", &C::hyper, &H::batch_size));
    t.push_back(number("hyper.entropy_coef", &C::hyper, &H::entropy_coef));
    t.push_back(number("hyper.lr_uplink", &C::hyper, &H::lr_uplink));
    t.push_back(number("hyper.lr_downlink", &C::hyper, &H::lr_downlink));
    t.push_back(number("hyper.lr_critic", &C::hyper, &H::lr_critic));
    t.push_back(number("hyper.weight_u", &C::hyper, &H::weight_u));
    t.push_back(number("hyper.weight_d", &C::hyper, &H::weight_d));
    t.push_back(number("hyper.weight_g", &C::hyper, &H::weight_g));
    t.push_back(integer("hyper.target_sync_period", &C::hyper, &H::target_sync_period));
    t.push_back(integer("hyper.trajectory_length", &C::hyper, &H::trajectory_length));
    t.push_back({"hyper.hidden",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.hyper.hidden.clear();
                   for (const auto& item : split_list(v)) c.hyper.hidden.push_back(to_int(k, item));
                 },
                 [](const C& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.hyper.hidden.size(); ++i) {
                     out += (i ? "," : "") + std::to_string(c.hyper.hidden[i]);
                   }
                   return out;
                 }});
    t.push_back(number("hyper.policy_output_scale", &C::hyper, &H::policy_output_scale));
    t.push_back(number("hyper.init_log_std", &C::hyper, &H::init_log_std));
    t.push_back({"hyper.normalize_advantages",
                 [](C& c, std::string_view k, std::string_view v) {
                   c.hyper.normalize_advantages = to_bool(k, v);
                 },
                 [](const C& c) { return fmt(c.hyper.normalize_advantages); }});
    t.push_back({"hyper.critic_target",
                 [](C& c, std::string_view k, std::string_view v) {
                   try {
                     c.hyper.critic_target = aahc::parse_critic_target(v);
                   } catch (const std::invalid_argument&) {
                     bad_value(k, v, "verbatim or conventional");
                   }
                 },
                 [](const C& c) { return std::string(aahc::to_string(c.hyper.critic_target)); }});
    return t;
  }();
  return table;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error((source.empty() ? std::string() : source + ":") +
                         (line > 0 ? std::to_string(line) + ": " : std::string(source.empty() ? "" : " ")) +
                         message),
      line_(line) {}

void apply_setting(ResolvedConfig& config, std::string_view key, std::string_view value) {
  for (const auto& e : entries()) {
    if (e.key == key) {
      e.set(config, key, value);
      return;
    }
  }
  throw ConfigError("", 0, "unknown key '" + std::string(key) + "'");
}

void validate(const ResolvedConfig& config) {
  try {
    config.scenario.validate();
    config.hyper.validate();
    // Training needs a materialized (M+1)^N logit layer.
    if (config.run.algorithm != aahc::Algorithm::kRandom &&
        config.scenario.num_uplink_actions() > (1ULL << 24)) {
      throw std::invalid_argument("scenario: (M+1)^N uplink actions exceed 2^24");
    }
  } catch (const std::exception& e) {
    throw ConfigError("", 0, e.what());
  }
  if (config.run.seeds.empty()) throw ConfigError("", 0, "run.seeds must not be empty");
  const std::set<std::uint64_t> unique(config.run.seeds.begin(), config.run.seeds.end());
  if (unique.size() != config.run.seeds.size()) {
    throw ConfigError("", 0, "run.seeds must be distinct");
  }
  if (config.run.eval_episodes < 1) throw ConfigError("", 0, "run.eval_episodes must be >= 1");
  if (config.run.output_dir.empty()) throw ConfigError("", 0, "run.output_dir must not be empty");
}

ResolvedConfig parse_config(std::string_view text, std::string_view source,
                            const ResolvedConfig& base) {
  ResolvedConfig config = base;
  const std::string src(source);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(src, line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(src, line_no, "missing key before '='");
    try {
      apply_setting(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(src, line_no, e.what());
    }
  }
  try {
    validate(config);
  } catch (const ConfigError& e) {
    throw ConfigError(src, 0, e.what());
  }
  return config;
}

ResolvedConfig load_config_file(const std::filesystem::path& path, const ResolvedConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string(), base);
}

std::string render_config(const ResolvedConfig& config) {
  std::string out = "# resolved configuration\n";
  for (const auto& e : entries()) {
    if (!e.get) continue;
    const std::string value = e.get(config);
    if (value.empty() && e.key.rfind("scenario.noise", 0) == 0) continue;
    out += e.key + " = " + value + "\n";
  }
  return out;
}

}  // namespace xrnoma::harness
