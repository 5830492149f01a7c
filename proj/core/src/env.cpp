// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "xrnoma/noma_phy.hpp"

namespace xrnoma::env {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("scenario: ") + what);
}

}  // namespace

ScenarioConfig ScenarioConfig::preset(std::string_view name) {
  const auto dash = name.find('-');
  int m = 0;
  int n = 0;
  bool ok = dash != std::string_view::npos && dash > 0 && dash + 1 < name.size();
  if (ok) {
    const auto r1 = std::from_chars(name.data(), name.data() + dash, m);
    const auto r2 = std::from_chars(name.data() + dash + 1, name.data() + name.size(), n);
    ok = r1.ec == std::errc() && r1.ptr == name.data() + dash && r2.ec == std::errc() &&
         r2.ptr == name.data() + name.size();
  }
  if (!ok || m < 1 || n < 1) {
    throw std::invalid_argument("scenario name '" + std::string(name) +
                                "' is not of the form m-n with m, n >= 1");
  }
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  cfg.num_channels = m;
  cfg.num_users = n;
  return cfg;
}

void ScenarioConfig::validate() const {
  require(num_channels >= 1, "num_channels must be >= 1");
  require(num_users >= 1, "num_users must be >= 1");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(noise_psd_w_hz > 0.0, "noise PSD must be > 0");
  require(utti_s > 0.0, "utti_s must be > 0");
  require(dtti_s > 0.0, "dtti_s must be > 0");
  require(dl_power_min_w >= 0.0 && dl_power_min_w < dl_power_max_w,
          "need 0 <= dl_power_min_w < dl_power_max_w");
  require(buffer_min_mbit > 0.0 && buffer_min_mbit <= buffer_max_mbit,
          "need 0 < buffer_min_mbit <= buffer_max_mbit");
  require(ul_power_min_w > 0.0 && ul_power_min_w <= ul_power_max_w,
          "need 0 < ul_power_min_w <= ul_power_max_w");
  require(augment_min > 0.0 && augment_min <= augment_max, "need 0 < augment_min <= augment_max");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(area_x_m > 0.0 && area_y_m > 0.0, "area dimensions must be > 0");
  require(walk_step_m >= 0.0, "walk_step_m must be >= 0");
  require(power_epsilon_w >= 0.0, "power_epsilon_w must be >= 0");
  fading.validate();
}

std::uint64_t ScenarioConfig::num_uplink_actions() const {
  std::uint64_t count = 1;
  for (int n = 0; n < num_users; ++n) {
    if (count > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(num_channels + 1)) {
      throw std::overflow_error("uplink action space (M+1)^N is too large");
    }
    count *= static_cast<std::uint64_t>(num_channels + 1);
  }
  return count;
}

double dbm_per_hz_to_watt_per_hz(double dbm_per_hz) {
  return std::pow(10.0, dbm_per_hz / 10.0) / 1000.0;
}

std::uint64_t encode_uplink_action(std::span<const int> gamma, int num_channels) {
  const auto base = static_cast<std::uint64_t>(num_channels + 1);
  std::uint64_t index = 0;
  std::uint64_t place = 1;
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    if (gamma[n] < 0 || gamma[n] > num_channels) {
      throw std::out_of_range("encode_uplink_action: gamma[" + std::to_string(n) +
                              "] outside {0.." + std::to_string(num_channels) + "}");
    }
    index += static_cast<std::uint64_t>(gamma[n]) * place;
    place *= base;
  }
  return index;
}

std::vector<int> decode_uplink_action(std::uint64_t index, int num_users, int num_channels) {
  const auto base = static_cast<std::uint64_t>(num_channels + 1);
  std::vector<int> gamma(num_users);
  for (int n = 0; n < num_users; ++n) {
    gamma[n] = static_cast<int>(index % base);
    index /= base;
  }
  if (index != 0) {
    throw std::out_of_range("decode_uplink_action: index exceeds (M+1)^N");
  }
  return gamma;
}

double normalize_power_gain(double power_gain) {
  if (!(power_gain > 0.0)) return 0.0;
  return std::clamp((std::log10(power_gain) + 12.0) / 8.0, 0.0, 1.0);
}

std::vector<double> build_uplink_state(const EpisodeState& state, const ScenarioConfig& config) {
  const int n_users = config.num_users;
  std::vector<double> s;
  s.reserve(config.uplink_state_dim());
  for (int n = 0; n < n_users; ++n) s.push_back(state.buffers_mbit[n] / kBufferScaleMbit);
  for (int n = 0; n < n_users; ++n) s.push_back(state.ul_power_w[n] / kUlPowerScaleW);
  for (double g : state.power_gains) s.push_back(normalize_power_gain(g));
  return s;
}

std::vector<double> build_downlink_state(const EpisodeState& state, const ScenarioConfig& config) {
  if (!state.pending) throw SequenceError("downlink state requested without a pending uplink");
  const auto& up = *state.pending;
  const int n_users = config.num_users;
  std::vector<double> s;
  s.reserve(config.downlink_state_dim());
  for (int n = 0; n < n_users; ++n) {
    s.push_back(static_cast<double>(up.gamma[n]) / config.num_channels);
  }
  for (int n = 0; n < n_users; ++n) s.push_back(state.buffers_mbit[n] / kBufferScaleMbit);
  for (int n = 0; n < n_users; ++n) {
    s.push_back(std::clamp(up.rendered_mbit[n] / kRenderedScaleMbit, 0.0, 1.0));
  }
  for (double g : state.power_gains) s.push_back(normalize_power_gain(g));
  return s;
}

KpiSummary kpi_summary(const EpisodeState& state) {
  const auto& k = state.kpi;
  KpiSummary out;
  out.iterations = k.iterations;
  out.total_delay_ms = k.total_delay_s * 1e3;
  out.retrans_pct = k.transmission_count > 0
                        ? 100.0 * static_cast<double>(k.retrans_count) /
                              static_cast<double>(k.transmission_count)
                        : 0.0;
  out.max_ul_rate_gbps = k.iterations > 0 ? k.max_ul_rate_sum_bps / k.iterations / 1e9 : 0.0;
  out.energy_j = k.energy_j;
  return out;
}

Environment::Environment(ScenarioConfig config, RngStream env_init, RngStream fading,
                         RngStream augment)
    : config_(std::move(config)),
      noise_psd_(config_.noise_psd_w_hz),
      env_init_(env_init),
      fading_(fading),
      augment_(augment) {
  config_.validate();
}

void Environment::resample_channel() {
  state_.gains = channel::sample_gains(fading_, state_.topology, config_.num_channels,
                                       config_.fading);
  state_.power_gains.resize(state_.gains.size());
  std::transform(state_.gains.begin(), state_.gains.end(), state_.power_gains.begin(),
                 [](std::complex<double> h) { return std::norm(h); });
}

std::vector<double> Environment::reset() {
  const int n_users = config_.num_users;
  EpisodeState s;
  s.initial_buffers_mbit.resize(n_users);
  s.ul_power_w.resize(n_users);
  for (int n = 0; n < n_users; ++n) {
    s.initial_buffers_mbit[n] = env_init_.uniform(config_.buffer_min_mbit, config_.buffer_max_mbit);
  }
  for (int n = 0; n < n_users; ++n) {
    s.ul_power_w[n] = env_init_.uniform(config_.ul_power_min_w, config_.ul_power_max_w);
  }
  s.buffers_mbit = s.initial_buffers_mbit;
  s.delivered_mbit.assign(n_users, 0.0);
  s.topology = channel::sample_topology(env_init_, n_users, config_.area_x_m, config_.area_y_m);
  state_ = std::move(s);
  resample_channel();
  started_ = true;
  return uplink_state();
}

UplinkOutcome Environment::uplink_step(std::span<const int> gamma) {
  if (!started_) throw SequenceError("uplink_step before reset");
  if (state_.done) throw SequenceError("uplink_step on a finished episode; call reset()");
  if (state_.pending) throw SequenceError("uplink_step called twice without a downlink_step");
  const int n_users = config_.num_users;
  if (static_cast<int>(gamma.size()) != n_users) {
    throw std::invalid_argument("uplink_step: gamma has " + std::to_string(gamma.size()) +
                                " entries, expected " + std::to_string(n_users));
  }

  // Users with an empty buffer send nothing and take no part in SIC.
  std::vector<int> active(gamma.begin(), gamma.end());
  for (int n = 0; n < n_users; ++n) {
    if (state_.buffers_mbit[n] <= 0.0) active[n] = 0;
  }
  const noma::ChannelAssignment assignment(active, config_.num_channels);
  const auto budget =
      noma::LinkBudget::uniform(n_users, config_.num_channels, config_.bandwidth_hz, noise_psd_,
                                state_.ul_power_w, std::vector<double>(n_users, 0.0));

  PendingUplink up;
  up.gamma.assign(gamma.begin(), gamma.end());
  up.rates_bps = noma::uplink_rates(assignment, budget, state_.power_gains);
  up.data_mbit.resize(n_users);
  up.augment.resize(n_users);
  up.rendered_mbit.resize(n_users);
  double penalty = 0.0;
  for (int n = 0; n < n_users; ++n) {
    up.data_mbit[n] = std::min(state_.buffers_mbit[n], up.rates_bps[n] * config_.utti_s * 1e-6);
    up.augment[n] = augment_.uniform(config_.augment_min, config_.augment_max);
    up.rendered_mbit[n] = up.augment[n] * up.data_mbit[n];
    penalty += (1.0 - up.data_mbit[n] / state_.initial_buffers_mbit[n]) / n_users;
  }
  up.upload_efficiency = -penalty;
  state_.pending = std::move(up);

  UplinkOutcome out;
  out.reward = state_.pending->upload_efficiency;
  out.downlink_state = downlink_state();
  return out;
}

DownlinkOutcome Environment::downlink_step(std::span<const double> dl_power) {
  if (!state_.pending) throw SequenceError("downlink_step without a pending uplink_step");
  const int n_users = config_.num_users;
  const double p_min = config_.dl_power_min_w;
  const double p_max = config_.dl_power_max_w;
  if (static_cast<int>(dl_power.size()) != n_users) {
    throw std::invalid_argument("downlink_step: expected " + std::to_string(n_users) + " powers");
  }
  for (int n = 0; n < n_users; ++n) {
    if (!(dl_power[n] >= p_min && dl_power[n] <= p_max)) {
      throw std::invalid_argument("downlink_step: power[" + std::to_string(n) + "] = " +
                                  std::to_string(dl_power[n]) + " outside [p'_min, p'_max]");
    }
  }
  const PendingUplink& up = *state_.pending;

  // Only users carrying rendered data receive a downlink transmission.
  std::vector<int> active(n_users, 0);
  for (int n = 0; n < n_users; ++n) {
    if (up.gamma[n] != 0 && up.rendered_mbit[n] > 0.0) active[n] = up.gamma[n];
  }
  const noma::ChannelAssignment assignment(active, config_.num_channels);
  const auto budget = noma::LinkBudget::uniform(
      n_users, config_.num_channels, config_.bandwidth_hz, noise_psd_, state_.ul_power_w,
      std::vector<double>(dl_power.begin(), dl_power.end()));

  const double tau_d = config_.dtti_s;
  DownlinkReport rep;
  rep.rates_bps = noma::downlink_rates(assignment, budget, state_.power_gains);
  rep.delays_s.assign(n_users, 0.0);
  rep.failures.assign(n_users, 0);
  double max_delay = 0.0;
  double delay_ratio_sum = 0.0;
  int failures = 0;
  for (int n = 0; n < n_users; ++n) {
    if (active[n] != 0) {
      ++rep.transmissions;
      rep.delays_s[n] = rep.rates_bps[n] > 0.0 ? up.rendered_mbit[n] * 1e6 / rep.rates_bps[n]
                                               : std::numeric_limits<double>::infinity();
      rep.failures[n] = rep.delays_s[n] > tau_d ? 1 : 0;
    }
    failures += rep.failures[n];
    max_delay = std::max(max_delay, rep.delays_s[n]);
    delay_ratio_sum += rep.delays_s[n] / (tau_d * n_users);
    if (up.gamma[n] != 0) rep.energy_j += dl_power[n] * std::min(rep.delays_s[n], tau_d);
    rep.energy_penalty -= (dl_power[n] - p_min) / ((p_max - p_min) * n_users) * 0.5;
    if (up.gamma[n] == 0 && dl_power[n] - p_min > config_.power_epsilon_w) rep.power_guide -= 0.2;
  }
  rep.download_efficiency = -std::min(delay_ratio_sum, 1.0);
  rep.global = -1.0 - 0.5 * failures;
  rep.delay_cost_s = config_.utti_s + std::min(max_delay, tau_d);
  rep.max_ul_rate_bps = *std::max_element(up.rates_bps.begin(), up.rates_bps.end());

  bool all_empty = true;
  for (int n = 0; n < n_users; ++n) {
    const double delivered = rep.failures[n] ? 0.0 : up.data_mbit[n];
    state_.delivered_mbit[n] += delivered;
    // D_n = B_n exactly when the buffer drains, so this lands on 0.0.
    state_.buffers_mbit[n] = std::max(0.0, state_.buffers_mbit[n] - delivered);
    all_empty = all_empty && state_.buffers_mbit[n] == 0.0;
  }

  auto& k = state_.kpi;
  k.iterations += 1;
  k.retrans_count += failures;
  k.transmission_count += rep.transmissions;
  k.energy_j += rep.energy_j;
  k.max_ul_rate_sum_bps += rep.max_ul_rate_bps;
  k.total_delay_s += rep.delay_cost_s;

  state_.pending.reset();
  state_.topology = channel::step_topology(fading_, state_.topology, config_.walk_step_m);
  resample_channel();
  state_.t += 1;
  state_.truncated = !all_empty && state_.t >= config_.max_iterations;
  state_.done = all_empty || state_.t >= config_.max_iterations;

  DownlinkOutcome out;
  out.reward = rep.download_efficiency + rep.energy_penalty + rep.power_guide;
  out.global_reward = rep.global;
  out.uplink_state = uplink_state();
  out.done = state_.done;
  out.report = std::move(rep);
  return out;
}

std::vector<double> Environment::uplink_state() const {
  return build_uplink_state(state_, config_);
}

std::vector<double> Environment::downlink_state() const {
  return build_downlink_state(state_, config_);
}

}  // namespace xrnoma::env
