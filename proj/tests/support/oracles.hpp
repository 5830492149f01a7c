// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations used by unit and acceptance tests.
// Nothing here calls into the library code it is checking.

#ifndef XRNOMA_TESTS_ORACLES_HPP_
#define XRNOMA_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(got), std::abs(want));
  return scale == 0.0 ? 0.0 : std::abs(got - want) / scale;
}

// Uplink: user i on channel m is interfered by co-channel users decoded
// after it, i.e. with a smaller p|h|^2 (or equal and larger index).
// gains is N x M row-major; gamma[i] in {0..M}.
inline std::vector<double> uplink_rates(const std::vector<int>& gamma,
                                        const std::vector<double>& p,
                                        const std::vector<double>& gains, int m_channels,
                                        double w, double noise_psd) {
  const std::size_t n = gamma.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (gamma[i] == 0) continue;
    const int m = gamma[i] - 1;
    const double own = p[i] * gains[i * m_channels + m];
    double interference = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || gamma[j] != gamma[i]) continue;
      const double other = p[j] * gains[j * m_channels + m];
      if (other < own || (other == own && j > i)) interference += other;
    }
    out[i] = w * std::log2(1.0 + own / (interference + w * noise_psd));
  }
  return out;
}

// Downlink: user i is interfered by co-channel users decoded before it
// (larger |h|^2 / sigma^2, or equal and smaller index); the interfering
// power reaches i through i's own gain.
inline std::vector<double> downlink_rates(const std::vector<int>& gamma,
                                          const std::vector<double>& p_dl,
                                          const std::vector<double>& gains, int m_channels,
                                          double w, const std::vector<double>& noise_xu) {
  const std::size_t n = gamma.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (gamma[i] == 0) continue;
    const int m = gamma[i] - 1;
    const double gi = gains[i * m_channels + m];
    const double key_i = gi / noise_xu[i * m_channels + m];
    double interference = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || gamma[j] != gamma[i]) continue;
      const double key_j = gains[j * m_channels + m] / noise_xu[j * m_channels + m];
      if (key_j > key_i || (key_j == key_i && j < i)) interference += p_dl[j] * gi;
    }
    out[i] = w * std::log2(1.0 + p_dl[i] * gi / (interference + w * noise_xu[i * m_channels + m]));
  }
  return out;
}

// A_t = sum_{k >= t} (gamma lambda)^{k-t} delta_k, stopping after the first
// terminal step.
inline std::vector<double> gae_direct(const std::vector<double>& r, const std::vector<double>& v,
                                      const std::vector<double>& vn,
                                      const std::vector<std::uint8_t>& done, double gamma,
                                      double lambda) {
  const std::size_t n = r.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      const double delta = r[k] + gamma * (done[k] ? 0.0 : vn[k]) - v[k];
      out[t] += weight * delta;
      if (done[k]) break;
      weight *= gamma * lambda;
    }
  }
  return out;
}

// Rewards of one downlink stage, from the raw quantities.
struct StageRewards {
  double r_dr = 0.0;
  double r_ene = 0.0;
  double r_gu = 0.0;
  double r_g = 0.0;
  double energy = 0.0;
  std::vector<int> failures;
};

inline StageRewards downlink_rewards(const std::vector<int>& gamma,
                                     const std::vector<double>& rendered_mbit,
                                     const std::vector<double>& dl_rates,
                                     const std::vector<double>& p_dl, double tau_d, double p_min,
                                     double p_max, double eps) {
  const std::size_t n = gamma.size();
  StageRewards out;
  out.failures.assign(n, 0);
  double ratio = 0.0, power = 0.0;
  int fails = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    if (gamma[i] != 0 && rendered_mbit[i] > 0.0) {
      d = dl_rates[i] > 0.0 ? rendered_mbit[i] * 1e6 / dl_rates[i]
                            : std::numeric_limits<double>::infinity();
      if (d > tau_d) out.failures[i] = 1;
    }
    fails += out.failures[i];
    ratio += d;
    if (gamma[i] != 0) out.energy += p_dl[i] * std::min(d, tau_d);
    power += p_dl[i] - p_min;
    if (gamma[i] == 0 && p_dl[i] - p_min > eps) out.r_gu -= 0.2;
  }
  const double nn = static_cast<double>(n);
  out.r_dr = -std::min(ratio / (tau_d * nn), 1.0);
  out.r_ene = -power / ((p_max - p_min) * nn) * 0.5;
  out.r_g = -1.0 - 0.5 * fails;
  return out;
}

// Central difference of f at every coordinate of x; returns the gradient.
inline std::vector<double> central_difference(const std::function<double()>& f,
                                              std::vector<double*> coords, double h) {
  std::vector<double> g(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double keep = *coords[i];
    *coords[i] = keep + h;
    const double up = f();
    *coords[i] = keep - h;
    const double down = f();
    *coords[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Fourth-order central difference: (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h.
inline std::vector<double> central_difference4(const std::function<double()>& f,
                                               std::vector<double*> coords, double h) {
  std::vector<double> g(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double keep = *coords[i];
    auto at = [&](double dx) {
      *coords[i] = keep + dx;
      return f();
    };
    g[i] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12.0 * h);
    *coords[i] = keep;
  }
  return g;
}

// Dense forward pass: tanh on all but the last layer. weights[l] is out x in
// row-major.
inline std::vector<double> dense_forward(const std::vector<std::vector<double>>& weights,
                                         const std::vector<std::vector<double>>& biases,
                                         const std::vector<int>& sizes, std::vector<double> x) {
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    std::vector<double> y(sizes[l + 1], 0.0);
    for (int o = 0; o < sizes[l + 1]; ++o) {
      double acc = biases[l][o];
      for (int i = 0; i < sizes[l]; ++i) acc += weights[l][o * sizes[l] + i] * x[i];
      y[o] = l + 2 < sizes.size() ? std::tanh(acc) : acc;
    }
    x = std::move(y);
  }
  return x;
}

}  // namespace oracle

#endif  // XRNOMA_TESTS_ORACLES_HPP_
