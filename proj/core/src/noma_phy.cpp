// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/noma_phy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace xrnoma::noma {
namespace {

std::vector<int> order_by_key(std::span<const int> members, const std::vector<double>& key) {
  std::vector<int> idx(members.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return members[a] < members[b];
  });
  std::vector<int> ordered;
  ordered.reserve(members.size());
  for (int i : idx) ordered.push_back(members[i]);
  return ordered;
}

double shannon(double bandwidth, double sinr) {
  return bandwidth * std::log1p(sinr) / std::log(2.0);
}

void check_shapes(const ChannelAssignment& a, const LinkBudget& b,
                  std::span<const double> power_gain) {
  const std::size_t n = a.num_users();
  const std::size_t m = a.num_channels();
  if (b.bandwidth_hz.size() != m || b.noise_psd_xu.size() != n * m || b.ul_power.size() != n ||
      b.dl_power.size() != n || power_gain.size() != n * m) {
    throw std::invalid_argument("noma: link budget / gain shapes do not match the assignment");
  }
}

}  // namespace

ChannelAssignment::ChannelAssignment(std::vector<int> gamma, int num_channels)
    : gamma_(std::move(gamma)), num_channels_(num_channels), members_(num_channels) {
  if (num_channels < 1) throw std::invalid_argument("assignment: need at least one channel");
  for (int n = 0; n < num_users(); ++n) {
    const int g = gamma_[n];
    if (g < 0 || g > num_channels) {
      throw std::invalid_argument("assignment: gamma[" + std::to_string(n) + "] = " +
                                  std::to_string(g) + " outside {0.." +
                                  std::to_string(num_channels) + "}");
    }
    if (g != 0) members_[g - 1].push_back(n);
  }
}

LinkBudget LinkBudget::uniform(int num_users, int num_channels, double bandwidth_hz,
                               double noise_psd, std::vector<double> ul_power,
                               std::vector<double> dl_power) {
  LinkBudget b;
  b.bandwidth_hz.assign(num_channels, bandwidth_hz);
  b.noise_psd_mc = noise_psd;
  b.noise_psd_xu.assign(static_cast<std::size_t>(num_users) * num_channels, noise_psd);
  b.ul_power = std::move(ul_power);
  b.dl_power = std::move(dl_power);
  return b;
}

std::vector<int> uplink_order(std::span<const int> members, std::span<const double> ul_power,
                              std::span<const double> power_gain) {
  std::vector<double> key(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) key[i] = ul_power[i] * power_gain[i];
  return order_by_key(members, key);
}

std::vector<int> downlink_order(std::span<const int> members, std::span<const double> power_gain,
                                std::span<const double> noise_psd) {
  std::vector<double> key(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) key[i] = power_gain[i] / noise_psd[i];
  return order_by_key(members, key);
}

std::vector<double> uplink_rates(const ChannelAssignment& assignment, const LinkBudget& budget,
                                 std::span<const double> power_gain) {
  check_shapes(assignment, budget, power_gain);
  const int num_ch = assignment.num_channels();
  std::vector<double> rates(assignment.num_users(), 0.0);
  std::vector<double> pw, gn;
  for (int m = 1; m <= num_ch; ++m) {
    const auto& members = assignment.members(m);
    if (members.empty()) continue;
    pw.clear();
    gn.clear();
    for (int n : members) {
      pw.push_back(budget.ul_power[n]);
      gn.push_back(power_gain[n * num_ch + (m - 1)]);
    }
    const auto order = uplink_order(members, pw, gn);
    const double w = budget.bandwidth_hz[m - 1];
    const double noise = w * budget.noise_psd_mc;
    // Walk from the last decoded user backwards so the tail sum accumulates.
    double tail = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int n = *it;
      const double rx = budget.ul_power[n] * power_gain[n * num_ch + (m - 1)];
      rates[n] = shannon(w, rx / (tail + noise));
      tail += rx;
    }
  }
  return rates;
}

std::vector<double> downlink_rates(const ChannelAssignment& assignment, const LinkBudget& budget,
                                   std::span<const double> power_gain) {
  check_shapes(assignment, budget, power_gain);
  const int num_ch = assignment.num_channels();
  std::vector<double> rates(assignment.num_users(), 0.0);
  std::vector<double> gn, nz;
  for (int m = 1; m <= num_ch; ++m) {
    const auto& members = assignment.members(m);
    if (members.empty()) continue;
    gn.clear();
    nz.clear();
    for (int n : members) {
      gn.push_back(power_gain[n * num_ch + (m - 1)]);
      nz.push_back(budget.noise_psd_xu[n * num_ch + (m - 1)]);
    }
    const auto order = downlink_order(members, gn, nz);
    const double w = budget.bandwidth_hz[m - 1];
    double head_power = 0.0;  // sum of p' over users decoded before n
    for (int n : order) {
      const double g = power_gain[n * num_ch + (m - 1)];
      const double p = budget.dl_power[n];
      const double noise = w * budget.noise_psd_xu[n * num_ch + (m - 1)];
      rates[n] = p > 0.0 ? shannon(w, p * g / (head_power * g + noise)) : 0.0;
      head_power += p;
    }
  }
  return rates;
}

}  // namespace xrnoma::noma
