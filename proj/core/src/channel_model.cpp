// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xrnoma::channel {

void FadingParams::validate() const {
  if (!(beta0 > 0.0)) throw std::invalid_argument("fading.beta0 must be > 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("fading.alpha must be >= 0");
  if (!(rice_k >= 0.0)) throw std::invalid_argument("fading.rice_k must be >= 0");
  if (!(height >= 0.0)) throw std::invalid_argument("fading.height_m must be >= 0");
  if (std::abs(std::abs(los) - 1.0) > 1e-9) {
    throw std::invalid_argument("fading LOS component must have unit magnitude");
  }
}

bool Topology::contains(const Point& p) const {
  return std::abs(p.x) <= area_x / 2.0 && std::abs(p.y) <= area_y / 2.0;
}

double distance(Point xu, Point mc, double height) {
  const double dx = xu.x - mc.x;
  const double dy = xu.y - mc.y;
  return std::sqrt(dx * dx + dy * dy + height * height);
}

double path_gain(double distance, const FadingParams& params) {
  if (!(distance > 0.0)) {
    throw std::domain_error("path_gain: distance must be positive");
  }
  return params.beta0 * std::pow(distance, -params.alpha);
}

std::complex<double> sample_small_scale(RngStream& rng, double rice_k,
                                        std::complex<double> los) {
  const double los_weight = std::sqrt(rice_k / (rice_k + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (rice_k + 1.0));
  return los_weight * los + nlos_weight * rng.complex_normal();
}

ChannelGain channel_gain(double beta, std::complex<double> g) {
  const std::complex<double> h = std::sqrt(beta) * g;
  return {h, std::norm(h)};
}

Topology sample_topology(RngStream& rng, int num_users, double area_x, double area_y) {
  Topology topo;
  topo.area_x = area_x;
  topo.area_y = area_y;
  topo.mc_position = {rng.uniform(-area_x / 2, area_x / 2), rng.uniform(-area_y / 2, area_y / 2)};
  topo.xu_positions.reserve(num_users);
  for (int n = 0; n < num_users; ++n) {
    topo.xu_positions.push_back(
        {rng.uniform(-area_x / 2, area_x / 2), rng.uniform(-area_y / 2, area_y / 2)});
  }
  return topo;
}

Topology step_topology(RngStream& rng, const Topology& topology, double walk_step) {
  if (walk_step < 0.0) throw std::invalid_argument("walk_step must be >= 0");
  Topology next = topology;
  if (walk_step == 0.0) return next;
  const double hx = topology.area_x / 2.0;
  const double hy = topology.area_y / 2.0;
  for (Point& p : next.xu_positions) {
    p.x = std::clamp(p.x + rng.uniform(-walk_step, walk_step), -hx, hx);
    p.y = std::clamp(p.y + rng.uniform(-walk_step, walk_step), -hy, hy);
  }
  return next;
}

std::vector<std::complex<double>> sample_gains(RngStream& rng, const Topology& topology,
                                               int num_channels, const FadingParams& params) {
  std::vector<std::complex<double>> gains;
  gains.reserve(topology.xu_positions.size() * num_channels);
  for (const Point& p : topology.xu_positions) {
    const double beta = path_gain(distance(p, topology.mc_position, params.height), params);
    for (int m = 0; m < num_channels; ++m) {
      gains.push_back(channel_gain(beta, sample_small_scale(rng, params.rice_k, params.los)).h);
    }
  }
  return gains;
}

}  // namespace xrnoma::channel
