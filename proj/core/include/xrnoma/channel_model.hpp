// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_CHANNEL_MODEL_HPP_
#define XRNOMA_CHANNEL_MODEL_HPP_

#include <complex>
#include <vector>

#include "xrnoma/random.hpp"

namespace xrnoma::channel {

struct Point {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  bool operator==(const Point&) const = default;
};

// Large-scale and Rician parameters shared by every XU-MC link.
struct FadingParams {
  double beta0 = 1e-3;      // linear gain at the 1 m reference distance
  double alpha = 2.0;       // path-loss exponent
  double rice_k = 3.0;      // Rician factor, linear
  double height = 3.0;      // vertical MC-XU separation, meters
  std::complex<double> los{1.0, 0.0};  // deterministic LOS term, |los| = 1

  // Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

// Floor plan centered at (0, 0).
struct Topology {
  std::vector<Point> xu_positions;
  Point mc_position;
  double area_x = 100.0;
  double area_y = 100.0;

  bool contains(const Point& p) const;
};

// 3-D Euclidean distance between an XU and the MC separated vertically by height.
double distance(Point xu, Point mc, double height);

// beta0 * distance^-alpha. Throws std::domain_error for distance <= 0.
double path_gain(double distance, const FadingParams& params);

// sqrt(K/(K+1)) * los + sqrt(1/(K+1)) * g~, g~ ~ CN(0, 1).
std::complex<double> sample_small_scale(RngStream& rng, double rice_k,
                                        std::complex<double> los);

struct ChannelGain {
  std::complex<double> h;
  double power = 0.0;  // |h|^2
};

// h = sqrt(beta) * g.
ChannelGain channel_gain(double beta, std::complex<double> g);

// Uniform placement of N XUs and the MC inside the area.
Topology sample_topology(RngStream& rng, int num_users, double area_x, double area_y);

// Random walk: each XU coordinate moves by U[-walk_step, walk_step], clipped to
// the area. The MC does not move.
Topology step_topology(RngStream& rng, const Topology& topology, double walk_step);

// Row-major N x M matrix of complex gains for the current topology.
std::vector<std::complex<double>> sample_gains(RngStream& rng, const Topology& topology,
                                               int num_channels, const FadingParams& params);

}  // namespace xrnoma::channel

#endif  // XRNOMA_CHANNEL_MODEL_HPP_
