// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_ENV_HPP_
#define XRNOMA_ENV_HPP_

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xrnoma/channel_model.hpp"
#include "xrnoma/random.hpp"

namespace xrnoma::env {

// Normalization constants for the observation vectors.
inline constexpr double kBufferScaleMbit = 20.0;
inline constexpr double kUlPowerScaleW = 10.0;
inline constexpr double kRenderedScaleMbit = 300.0;

// Physical and episode constants for one "m-n" scenario.
struct ScenarioConfig {
  std::string name = "3-4";
  int num_channels = 3;
  int num_users = 4;
  double bandwidth_hz = 10e9;
  double noise_psd_w_hz = 3.981071705534953e-21;  // -174 dBm/Hz
  double utti_s = 0.5e-3;
  double dtti_s = 1.5e-3;
  double dl_power_min_w = 0.0;
  double dl_power_max_w = 20.0;
  double buffer_min_mbit = 10.0;
  double buffer_max_mbit = 20.0;
  double ul_power_min_w = 3.0;
  double ul_power_max_w = 10.0;
  double augment_min = 5.0;
  double augment_max = 15.0;
  int max_iterations = 100;
  double area_x_m = 100.0;
  double area_y_m = 100.0;
  double walk_step_m = 1.0;
  double power_epsilon_w = 1e-6;
  channel::FadingParams fading;

  // Preset for "m-n": m channels, n users, every other field at its default.
  static ScenarioConfig preset(std::string_view name);

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  // (M+1)^N; throws std::overflow_error past 2^62.
  std::uint64_t num_uplink_actions() const;
  int uplink_state_dim() const { return num_users * (num_channels + 2); }
  int downlink_state_dim() const { return num_users * (num_channels + 3); }
};

// Converts a noise PSD from dBm/Hz to W/Hz.
double dbm_per_hz_to_watt_per_hz(double dbm_per_hz);

// Raised when stage calls violate the uplink/downlink alternation.
class SequenceError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// a_u = sum_n gamma_n (M+1)^(n-1). Throws std::out_of_range on a bad digit.
std::uint64_t encode_uplink_action(std::span<const int> gamma, int num_channels);
// Base-(M+1) digits, least significant digit first. Throws std::out_of_range.
std::vector<int> decode_uplink_action(std::uint64_t index, int num_users, int num_channels);

// Result of the uplink stage retained for the downlink stage.
struct PendingUplink {
  std::vector<int> gamma;
  std::vector<double> rates_bps;     // r_n
  std::vector<double> data_mbit;     // D_n
  std::vector<double> augment;       // c_n
  std::vector<double> rendered_mbit; // D'_n = c_n D_n
  double upload_efficiency = 0.0;    // R_ur
};

struct KpiAccumulators {
  int iterations = 0;
  long retrans_count = 0;
  long transmission_count = 0;
  double energy_j = 0.0;
  double max_ul_rate_sum_bps = 0.0;  // sum over iterations of max_n r_n
  double total_delay_s = 0.0;
};

struct EpisodeState {
  std::vector<double> buffers_mbit;
  std::vector<double> initial_buffers_mbit;
  std::vector<double> ul_power_w;
  channel::Topology topology;
  std::vector<std::complex<double>> gains;  // N x M row-major
  std::vector<double> power_gains;          // |h|^2, N x M row-major
  int t = 0;
  bool done = false;
  bool truncated = false;
  std::optional<PendingUplink> pending;
  KpiAccumulators kpi;
  // Per-user sum of (1 - I) D over the episode; conservation bookkeeping.
  std::vector<double> delivered_mbit;
};

// Everything the downlink stage computed, for logging and verification.
struct DownlinkReport {
  std::vector<double> rates_bps;   // r'_n
  std::vector<double> delays_s;    // d'_n, +inf for a payload with zero rate
  std::vector<int> failures;       // I_n
  double energy_j = 0.0;           // E^t
  double download_efficiency = 0.0;  // R_dr
  double energy_penalty = 0.0;       // R_ene
  double power_guide = 0.0;          // sum_n R_{n,gu}
  double global = 0.0;               // R_g
  int transmissions = 0;
  double delay_cost_s = 0.0;         // tau_u + min(max_n d'_n, tau_d)
  double max_ul_rate_bps = 0.0;
};

struct UplinkOutcome {
  double reward = 0.0;  // R_u = R_ur
  std::vector<double> downlink_state;
};

struct DownlinkOutcome {
  double reward = 0.0;         // R_d = R_dr + R_ene + sum R_gu
  double global_reward = 0.0;  // R_g
  std::vector<double> uplink_state;
  bool done = false;
  DownlinkReport report;
};

struct KpiSummary {
  int iterations = 0;
  double total_delay_ms = 0.0;
  double retrans_pct = 0.0;
  double max_ul_rate_gbps = 0.0;
  double energy_j = 0.0;
};

KpiSummary kpi_summary(const EpisodeState& state);

// One asynchronous transition as stored in a trajectory buffer.
struct StepRecord {
  std::vector<double> s_u;
  std::uint64_t a_u = 0;
  double r_u = 0.0;
  std::vector<double> s_d;
  std::vector<double> a_d;
  double r_d = 0.0;
  double r_g = 0.0;
  std::vector<double> s_u_next;
  bool done = false;
  // Raw KPI deltas of this iteration.
  int failures = 0;
  int transmissions = 0;
  double energy_j = 0.0;
  double delay_s = 0.0;
  double max_ul_rate_bps = 0.0;
};

// The two-stage asynchronous environment. Copyable, so a caller can look
// ahead on a copy without disturbing the original episode.
class Environment {
 public:
  Environment(ScenarioConfig config, RngStream env_init, RngStream fading, RngStream augment);

  // Starts a new episode and returns the first uplink observation.
  std::vector<double> reset();

  // Uplink stage. Throws SequenceError if an uplink result is already pending
  // or the episode is finished; std::invalid_argument for a malformed gamma.
  UplinkOutcome uplink_step(std::span<const int> gamma);

  // Downlink stage. Throws SequenceError without a pending uplink and
  // std::invalid_argument for powers outside [p'_min, p'_max].
  DownlinkOutcome downlink_step(std::span<const double> dl_power);

  std::vector<double> uplink_state() const;
  // Throws SequenceError when no uplink result is pending.
  std::vector<double> downlink_state() const;

  bool done() const { return state_.done; }
  bool awaiting_downlink() const { return state_.pending.has_value(); }
  const EpisodeState& state() const { return state_; }
  const ScenarioConfig& config() const { return config_; }
  KpiSummary kpi() const { return kpi_summary(state_); }

 private:
  void resample_channel();

  ScenarioConfig config_;
  double noise_psd_;
  RngStream env_init_;
  RngStream fading_;
  RngStream augment_;
  EpisodeState state_;
  bool started_ = false;
};

// Observation builders, usable without an Environment.
std::vector<double> build_uplink_state(const EpisodeState& state, const ScenarioConfig& config);
std::vector<double> build_downlink_state(const EpisodeState& state, const ScenarioConfig& config);

// clamp((log10(|h|^2) + 12) / 8, 0, 1).
double normalize_power_gain(double power_gain);

}  // namespace xrnoma::env

#endif  // XRNOMA_ENV_HPP_
