// SPDX-License-Identifier: Apache-2.0

#include "selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "xrnoma/critic.hpp"
#include "xrnoma/env.hpp"
#include "xrnoma/evaluate.hpp"
#include "xrnoma/gae.hpp"
#include "xrnoma/noma_phy.hpp"

namespace xrnoma::tools {
namespace {

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Lone-channel uplink rates against a sort-and-sum evaluation.
bool check_uplink_rates() {
  RngStream rng = RngStream::derive(7, "selfcheck.rates");
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(5));
    std::vector<int> gamma(n, 1);
    std::vector<double> p(n), g(n);
    for (int i = 0; i < n; ++i) {
      p[i] = rng.uniform(3.0, 10.0);
      g[i] = std::pow(10.0, rng.uniform(-12.0, -8.0));
    }
    const double w = 1e10, s2 = 4e-21;
    const auto budget = noma::LinkBudget::uniform(n, 1, w, s2, p, std::vector<double>(n, 1.0));
    const auto rates = noma::uplink_rates(noma::ChannelAssignment(gamma, 1), budget, g);
    for (int i = 0; i < n; ++i) {
      double interference = 0.0;
      for (int j = 0; j < n; ++j) {
        const bool after = p[j] * g[j] < p[i] * g[i] || (p[j] * g[j] == p[i] * g[i] && j > i);
        if (after) interference += p[j] * g[j];
      }
      const double expect = w * std::log2(1.0 + p[i] * g[i] / (interference + w * s2));
      if (!close(rates[i], expect, 1e-10)) return false;
    }
  }
  return true;
}

bool check_encoding() {
  for (std::uint64_t a = 0; a < 256; ++a) {
    const auto gamma = env::decode_uplink_action(a, 4, 3);
    if (env::encode_uplink_action(gamma, 3) != a) return false;
  }
  return true;
}

bool check_gae() {
  RngStream rng = RngStream::derive(7, "selfcheck.gae");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t t = 1 + rng.uniform_int(32);
    std::vector<double> r(t), v(t), vn(t);
    std::vector<std::uint8_t> d(t);
    for (std::size_t i = 0; i < t; ++i) {
      r[i] = rng.uniform(-1, 1);
      v[i] = rng.uniform(-1, 1);
      vn[i] = rng.uniform(-1, 1);
      d[i] = rng.uniform() < 0.2;
    }
    const auto adv = aahc::compute_gae(r, v, vn, d, 0.99, 0.95);
    for (std::size_t i = 0; i < t; ++i) {
      double sum = 0.0, w = 1.0;
      for (std::size_t k = i; k < t; ++k) {
        sum += w * (r[k] + 0.99 * (d[k] ? 0.0 : vn[k]) - v[k]);
        if (d[k]) break;
        w *= 0.99 * 0.95;
      }
      if (!close(adv[i], sum, 1e-10)) return false;
    }
  }
  return true;
}

bool check_reward_ranges() {
  const auto cfg = env::ScenarioConfig::preset("3-4");
  const RngStreams s = derive_rng_streams(11);
  env::Environment e(cfg, s.env_init, s.fading, s.augment);
  aahc::RandomPolicy policy(s.policy_ul, s.policy_dl);
  e.reset();
  for (int step = 0; step < 2000; ++step) {
    if (e.done()) e.reset();
    const auto up = e.uplink_step(policy.uplink_action(cfg));
    const auto down = e.downlink_step(policy.downlink_action(cfg));
    const auto& rep = down.report;
    int failures = 0;
    for (int f : rep.failures) failures += f;
    if (up.reward < -1 || up.reward > 0) return false;
    if (rep.download_efficiency < -1 || rep.download_efficiency > 0) return false;
    if (rep.energy_penalty < -0.5 || rep.energy_penalty > 0) return false;
    if (down.global_reward != -1.0 - 0.5 * failures) return false;
  }
  return true;
}

bool check_determinism() {
  const auto cfg = env::ScenarioConfig::preset("3-4");
  const auto a = aahc::evaluate_random(cfg, 5, 3);
  const auto b = aahc::evaluate_random(cfg, 5, 3);
  return a.mean_iterations == b.mean_iterations && a.energy_j == b.energy_j &&
         a.mean_rg == b.mean_rg;
}

// Central differences on one critic branch.
bool check_critic_gradient() {
  aahc::Hyperparams hp;
  hp.hidden = {8, 8};
  const auto cfg = env::ScenarioConfig::preset("3-2");
  RngStream rng = RngStream::derive(5, "selfcheck.grad");
  const auto layout = aahc::critic_layout(aahc::Algorithm::kCtrl, hp);
  nn::ParamSet critic = aahc::make_critic(layout, cfg, hp, rng);
  const int dim = aahc::critic_input_dim(layout.heads[0].input, cfg);
  nn::Matrix x(dim, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
  const std::vector<nn::Matrix> inputs{x};
  const std::vector<std::vector<double>> y{{0.3, -0.2, 1.0, 0.5}};
  nn::ParamSet grads = critic.zeros_like();
  aahc::critic_gradient(critic, layout, inputs, y, grads);
  auto loss = [&]() {
    nn::ParamSet scratch = critic.zeros_like();
    return aahc::critic_gradient(critic, layout, inputs, y, scratch).loss;
  };
  auto params = critic.tensors();
  const auto g = grads.tensors();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < params[t].size(); ++i) {
      const double keep = params[t][i];
      params[t][i] = keep + 1e-6;
      const double up = loss();
      params[t][i] = keep - 1e-6;
      const double down = loss();
      params[t][i] = keep;
      const double fd = (up - down) / 2e-6;
      if (std::abs(fd - g[t][i]) > 1e-5 * std::max(1.0, std::abs(fd))) return false;
    }
  }
  return true;
}

}  // namespace

int run_selfcheck(std::ostream& out) {
  const std::pair<const char*, std::function<bool()>> checks[] = {
      {"uplink rates vs sort-and-sum oracle", check_uplink_rates},
      {"uplink action encode/decode bijection (3-4)", check_encoding},
      {"GAE recursion vs direct sum", check_gae},
      {"reward ranges over 2000 random steps", check_reward_ranges},
      {"evaluation determinism", check_determinism},
      {"critic gradient vs central differences", check_critic_gradient},
  };
  int failures = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      out << "  exception: " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  }
  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
      << '\n';
  return failures;
}

}  // namespace xrnoma::tools
