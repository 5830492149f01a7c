// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_NOMA_PHY_HPP_
#define XRNOMA_NOMA_PHY_HPP_

#include <span>
#include <vector>

namespace xrnoma::noma {

// Joint offloading decision and channel access: gamma[n] in {0..M}, 0 = idle.
class ChannelAssignment {
 public:
  // Throws std::invalid_argument if any entry lies outside {0..num_channels}.
  ChannelAssignment(std::vector<int> gamma, int num_channels);

  const std::vector<int>& gamma() const { return gamma_; }
  int num_users() const { return static_cast<int>(gamma_.size()); }
  int num_channels() const { return num_channels_; }
  bool scheduled(int user) const { return gamma_[user] != 0; }

  // members(m) for m in 1..M: users on channel m in ascending index order.
  const std::vector<int>& members(int channel) const { return members_[channel - 1]; }

 private:
  std::vector<int> gamma_;
  int num_channels_;
  std::vector<std::vector<int>> members_;
};

// Physical-layer quantities for one TTI. Per-(user, channel) arrays are
// row-major N x M.
struct LinkBudget {
  std::vector<double> bandwidth_hz;   // W_m, size M
  double noise_psd_mc = 0.0;          // W/Hz
  std::vector<double> noise_psd_xu;   // W/Hz, size N x M
  std::vector<double> ul_power;       // W, size N
  std::vector<double> dl_power;       // W, size N

  // Same bandwidth on every channel and the same noise PSD everywhere.
  static LinkBudget uniform(int num_users, int num_channels, double bandwidth_hz,
                            double noise_psd, std::vector<double> ul_power,
                            std::vector<double> dl_power);
};

// SIC order at the MC: descending p_n |h_{n,m}|^2, ties by ascending user index.
// ul_power and power_gain are parallel to members.
std::vector<int> uplink_order(std::span<const int> members, std::span<const double> ul_power,
                              std::span<const double> power_gain);

// SIC order at the XUs: descending |h_{n,m}|^2 / sigma_{n,m}^2, ties by ascending
// user index. power_gain and noise_psd are parallel to members.
std::vector<int> downlink_order(std::span<const int> members, std::span<const double> power_gain,
                                std::span<const double> noise_psd);

// Achievable uplink rate per user in bit/s; idle users get 0. power_gain is N x M.
std::vector<double> uplink_rates(const ChannelAssignment& assignment, const LinkBudget& budget,
                                 std::span<const double> power_gain);

// Achievable downlink rate per user in bit/s. Interference from users decoded
// earlier is scaled by the receiver's own gain |h_{n,m}|^2.
std::vector<double> downlink_rates(const ChannelAssignment& assignment, const LinkBudget& budget,
                                   std::span<const double> power_gain);

}  // namespace xrnoma::noma

#endif  // XRNOMA_NOMA_PHY_HPP_
