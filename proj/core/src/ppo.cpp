// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xrnoma/distributions.hpp"

namespace xrnoma::aahc {
namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

void check_batch(std::size_t batch, std::size_t actions, std::size_t old_lp, std::size_t adv) {
  if (batch == 0) throw std::invalid_argument("actor gradient: empty batch");
  if (actions != batch || old_lp != batch || adv != batch) {
    throw std::invalid_argument("actor gradient: batch arrays differ in length");
  }
}

void check_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw NonFiniteError(std::string(what) + " is not finite");
}

}  // namespace

SurrogateTerm clip_surrogate(double log_prob_new, double log_prob_old, double advantage,
                             double clip_epsilon) {
  SurrogateTerm term;
  term.ratio = std::exp(log_prob_new - log_prob_old);
  const double clipped_ratio = std::clamp(term.ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
  const double plain = term.ratio * advantage;
  const double clipped = clipped_ratio * advantage;
  if (plain <= clipped) {
    term.value = plain;
    term.grad_log_prob = plain;  // d(r A)/d lp = r A
  } else {
    term.value = clipped;
    term.clipped = true;
  }
  return term;
}

std::vector<double> normalize_advantages(std::span<const double> advantages) {
  std::vector<double> out(advantages.begin(), advantages.end());
  if (out.empty()) return out;
  const double n = static_cast<double>(out.size());
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
  double var = 0.0;
  for (double a : out) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : out) a = sd > 1e-12 ? (a - mean) / (sd + 1e-8) : 0.0;
  return out;
}

nn::ParamSet make_uplink_actor(const env::ScenarioConfig& config, const Hyperparams& hp,
                               RngStream& rng) {
  const auto actions = config.num_uplink_actions();
  if (actions > (1ULL << 24)) throw std::invalid_argument("uplink action space too large");
  nn::ParamSet actor;
  actor.mlps.push_back(nn::Mlp::uniform_init(
      layer_sizes(config.uplink_state_dim(), hp.hidden, static_cast<int>(actions)), rng,
      hp.policy_output_scale));
  return actor;
}

nn::ParamSet make_downlink_actor(const env::ScenarioConfig& config, const Hyperparams& hp,
                                 RngStream& rng) {
  nn::ParamSet actor;
  actor.mlps.push_back(nn::Mlp::uniform_init(
      layer_sizes(config.downlink_state_dim(), hp.hidden, config.num_users), rng,
      hp.policy_output_scale));
  actor.vectors.push_back(nn::Vector::Constant(config.num_users, hp.init_log_std));
  return actor;
}

nn::Matrix downlink_means(const nn::ParamSet& actor, const nn::Matrix& states, double lo,
                          double hi) {
  nn::Matrix raw = actor.mlps.at(0).forward(states);
  return raw.unaryExpr([lo, hi](double r) { return nn::squash_mean(r, lo, hi); });
}

ActorDiagnostics uplink_actor_gradient(const nn::ParamSet& actor, const nn::Matrix& states,
                                       std::span<const std::uint64_t> actions,
                                       std::span<const double> old_log_probs,
                                       std::span<const double> advantages, double clip_epsilon,
                                       double entropy_coef, nn::ParamSet& grads) {
  const auto batch = static_cast<std::size_t>(states.cols());
  check_batch(batch, actions.size(), old_log_probs.size(), advantages.size());
  const nn::Mlp& net = actor.mlps.at(0);
  nn::MlpCache cache;
  const nn::Matrix logits = net.forward(states, &cache);
  nn::Matrix grad(logits.rows(), logits.cols());
  std::vector<double> entropy_grad(logits.rows());
  ActorDiagnostics diag;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    std::span<const double> z(logits.col(col).data(), logits.rows());
    std::span<double> g(grad.col(col).data(), grad.rows());
    const double lp = nn::categorical_log_prob(z, actions[b]);
    const double h = nn::categorical_entropy(z);
    const SurrogateTerm term = clip_surrogate(lp, old_log_probs[b], advantages[b], clip_epsilon);
    diag.surrogate += term.value * inv_b;
    diag.entropy += h * inv_b;
    if (term.clipped) diag.clip_fraction += inv_b;
    nn::categorical_log_prob_grad(z, actions[b], g);
    nn::categorical_entropy_grad(z, entropy_grad);
    for (std::size_t j = 0; j < g.size(); ++j) {
      g[j] = -inv_b * (term.grad_log_prob * g[j] + entropy_coef * entropy_grad[j]);
    }
  }
  diag.loss = -diag.surrogate - entropy_coef * diag.entropy;
  check_finite(diag.loss, "uplink actor loss");
  net.backward(cache, grad, grads.mlps.at(0));
  return diag;
}

ActorDiagnostics downlink_actor_gradient(const nn::ParamSet& actor, const nn::Matrix& states,
                                         const nn::Matrix& actions,
                                         std::span<const double> old_log_probs,
                                         std::span<const double> advantages, double clip_epsilon,
                                         double entropy_coef, double lo, double hi,
                                         nn::ParamSet& grads) {
  const auto batch = static_cast<std::size_t>(states.cols());
  check_batch(batch, static_cast<std::size_t>(actions.cols()), old_log_probs.size(),
              advantages.size());
  const nn::Mlp& net = actor.mlps.at(0);
  const nn::Vector& log_std = actor.vectors.at(0);
  const auto dim = log_std.size();
  if (actions.rows() != dim || net.output_dim() != dim) {
    throw std::invalid_argument("downlink actor gradient: action dimension mismatch");
  }
  nn::MlpCache cache;
  const nn::Matrix raw = net.forward(states, &cache);
  nn::Vector sigma(dim);
  std::vector<double> ls(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    ls[i] = nn::clamp_log_std(log_std(i));
    sigma(i) = std::exp(ls[i]);
  }
  const double h = nn::gaussian_entropy(ls);
  nn::Matrix grad_raw(dim, raw.cols());
  nn::Vector grad_ls = nn::Vector::Zero(dim);
  std::vector<double> mean(dim);
  ActorDiagnostics diag;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    for (Eigen::Index i = 0; i < dim; ++i) mean[i] = nn::squash_mean(raw(i, col), lo, hi);
    std::span<const double> x(actions.col(col).data(), dim);
    const double lp = nn::gaussian_log_prob(x, mean, ls);
    const SurrogateTerm term = clip_surrogate(lp, old_log_probs[b], advantages[b], clip_epsilon);
    diag.surrogate += term.value * inv_b;
    if (term.clipped) diag.clip_fraction += inv_b;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double z = (x[i] - mean[i]) / sigma(i);
      // d lp / d mu = z / sigma, d lp / d log_std = z^2 - 1
      grad_raw(i, col) = -inv_b * term.grad_log_prob * (z / sigma(i)) *
                         nn::squash_mean_derivative(raw(i, col), lo, hi);
      grad_ls(i) -= inv_b * term.grad_log_prob * (z * z - 1.0);
    }
  }
  diag.entropy = h;
  diag.loss = -diag.surrogate - entropy_coef * h;
  check_finite(diag.loss, "downlink actor loss");
  net.backward(cache, grad_raw, grads.mlps.at(0));
  nn::Vector& g_ls = grads.vectors.at(0);
  for (Eigen::Index i = 0; i < dim; ++i) {
    // The clamp blocks the gradient outside [kLogStdMin, kLogStdMax].
    if (log_std(i) > nn::kLogStdMin && log_std(i) < nn::kLogStdMax) {
      g_ls(i) += grad_ls(i) - entropy_coef;
    }
  }
  return diag;
}

}  // namespace xrnoma::aahc
