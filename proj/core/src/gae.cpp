// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/gae.hpp"

#include <stdexcept>

namespace xrnoma::aahc {

std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                std::span<const double> next_values,
                                std::span<const std::uint8_t> dones, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || next_values.size() != n || dones.size() != n) {
    throw std::invalid_argument("compute_gae: input lengths differ");
  }
  std::vector<double> adv(n);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * live * next_values[i] - values[i];
    running = delta + gamma * lambda * live * running;
    adv[i] = running;
  }
  return adv;
}

}  // namespace xrnoma::aahc
