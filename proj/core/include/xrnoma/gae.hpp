// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_GAE_HPP_
#define XRNOMA_GAE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace xrnoma::aahc {

// Truncated GAE, computed backwards:
//   delta_t = r_t + gamma (1 - done_t) V(s_{t+1}) - V(s_t)
//   A_t     = delta_t + gamma lambda (1 - done_t) A_{t+1}
// Throws std::invalid_argument on length mismatch.
std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                std::span<const double> next_values,
                                std::span<const std::uint8_t> dones, double gamma, double lambda);

}  // namespace xrnoma::aahc

#endif  // XRNOMA_GAE_HPP_
