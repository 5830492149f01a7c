// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "xrnoma/distributions.hpp"
#include "xrnoma/gae.hpp"
#include "xrnoma/ppo.hpp"

namespace xrnoma::aahc {
namespace {

nn::Matrix stack_columns(const std::vector<Transition>& buffer,
                         const std::vector<double>& (*pick)(const Transition&), int rows) {
  nn::Matrix out(rows, static_cast<Eigen::Index>(buffer.size()));
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const auto& v = pick(buffer[i]);
    if (v.empty()) {
      out.col(static_cast<Eigen::Index>(i)).setZero();
      continue;
    }
    if (static_cast<int>(v.size()) != rows) throw std::invalid_argument("buffer: state size mismatch");
    out.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const nn::Vector>(v.data(), rows);
  }
  return out;
}

const std::vector<double>& pick_su(const Transition& t) { return t.record.s_u; }
const std::vector<double>& pick_sd(const Transition& t) { return t.record.s_d; }
const std::vector<double>& pick_su_next(const Transition& t) { return t.record.s_u_next; }
const std::vector<double>& pick_sd_next(const Transition& t) { return t.s_d_next; }
const std::vector<double>& pick_ad_raw(const Transition& t) { return t.a_d_raw; }

struct StateBatches {
  nn::Matrix uplink;
  nn::Matrix downlink;
  nn::Matrix joint;

  const nn::Matrix& get(CriticInput input) const {
    switch (input) {
      case CriticInput::kUplink: return uplink;
      case CriticInput::kDownlink: return downlink;
      case CriticInput::kJoint: return joint;
    }
    return joint;
  }
};

StateBatches make_batches(nn::Matrix uplink, nn::Matrix downlink) {
  StateBatches b;
  b.joint = joint_states(uplink, downlink);
  b.uplink = std::move(uplink);
  b.downlink = std::move(downlink);
  return b;
}

nn::Matrix gather(const nn::Matrix& m, const std::vector<std::size_t>& cols) {
  nn::Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(cols[i]));
  }
  return out;
}

void check_finite_grads(const nn::ParamSet& grads, const char* what) {
  for (const auto& t : grads.tensors()) {
    for (double g : t) {
      if (!std::isfinite(g)) throw NonFiniteError(std::string(what) + " gradient is not finite");
    }
  }
}

std::vector<double> mix_advantages(const BufferTargets& t, const std::vector<double>& coeffs,
                                   std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t h = 0; h < coeffs.size(); ++h) {
    if (coeffs[h] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) out[i] += coeffs[h] * t.advantages[h][i];
  }
  return out;
}

struct EpisodeTally {
  double ru = 0.0;
  double rd = 0.0;
  double rg = 0.0;
};

struct CycleTally {
  int episodes = 0;
  CycleStats sums;

  void add(const EpisodeTally& ep, const env::KpiSummary& kpi) {
    ++episodes;
    sums.mean_ru += ep.ru;
    sums.mean_rd += ep.rd;
    sums.mean_rg += ep.rg;
    sums.mean_iterations += kpi.iterations;
    sums.retrans_pct += kpi.retrans_pct;
    sums.max_ul_rate_gbps += kpi.max_ul_rate_gbps;
    sums.energy_j += kpi.energy_j;
    sums.total_delay_ms += kpi.total_delay_ms;
  }

  CycleStats finish(long env_step) const {
    CycleStats s;
    s.env_step = env_step;
    s.episodes = episodes;
    if (episodes > 0) {
      const double k = 1.0 / episodes;
      s.mean_ru = sums.mean_ru * k;
      s.mean_rd = sums.mean_rd * k;
      s.mean_rg = sums.mean_rg * k;
      s.mean_iterations = sums.mean_iterations * k;
      s.retrans_pct = sums.retrans_pct * k;
      s.max_ul_rate_gbps = sums.max_ul_rate_gbps * k;
      s.energy_j = sums.energy_j * k;
      s.total_delay_ms = sums.total_delay_ms * k;
    }
    return s;
  }
};

}  // namespace

Agent make_agent(Algorithm algo, const env::ScenarioConfig& config, const Hyperparams& hp,
                 RngStreams& streams) {
  Agent agent;
  agent.algorithm = algo;
  agent.layout = critic_layout(algo, hp);
  agent.uplink_actor = make_uplink_actor(config, hp, streams.policy_ul);
  agent.downlink_actor = make_downlink_actor(config, hp, streams.policy_dl);
  agent.critic = make_critic(agent.layout, config, hp, streams.policy_dl);
  agent.target_critic = agent.critic;
  return agent;
}

Agent make_agent(Algorithm algo, const env::ScenarioConfig& config, const Hyperparams& hp,
                 std::uint64_t seed) {
  RngStreams streams = derive_rng_streams(seed);
  return make_agent(algo, config, hp, streams);
}

Optimizers make_optimizers(const Agent& agent, const Hyperparams& hp) {
  return {nn::Adam(agent.uplink_actor, hp.lr_uplink), nn::Adam(agent.downlink_actor, hp.lr_downlink),
          nn::Adam(agent.critic, hp.lr_critic)};
}

BufferTargets compute_buffer_targets(const std::vector<Transition>& buffer,
                                     const CriticLayout& layout, const nn::ParamSet& target_critic,
                                     const Hyperparams& hp) {
  if (buffer.empty()) throw std::invalid_argument("compute_buffer_targets: empty buffer");
  const int du = static_cast<int>(buffer.front().record.s_u.size());
  const int dd = static_cast<int>(buffer.front().record.s_d.size());
  for (const auto& t : buffer) {
    if (!t.record.done && t.s_d_next.empty()) {
      throw std::invalid_argument("compute_buffer_targets: missing next downlink state");
    }
  }
  const StateBatches now = make_batches(stack_columns(buffer, pick_su, du),
                                        stack_columns(buffer, pick_sd, dd));
  const StateBatches next = make_batches(stack_columns(buffer, pick_su_next, du),
                                         stack_columns(buffer, pick_sd_next, dd));
  const std::size_t n = buffer.size();
  std::vector<std::uint8_t> dones(n);
  for (std::size_t i = 0; i < n; ++i) dones[i] = buffer[i].record.done ? 1 : 0;

  BufferTargets out;
  for (std::size_t h = 0; h < layout.heads.size(); ++h) {
    const CriticHead& head = layout.heads[h];
    const nn::Matrix v = target_critic.mlps.at(h).forward(now.get(head.input));
    const nn::Matrix vn = target_critic.mlps.at(h).forward(next.get(head.input));
    std::vector<double> values(v.data(), v.data() + n);
    std::vector<double> next_values(vn.data(), vn.data() + n);
    std::vector<double> rewards(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = buffer[i].record;
      rewards[i] = head.reward_mix[0] * r.r_u + head.reward_mix[1] * r.r_d +
                   head.reward_mix[2] * r.r_g;
    }
    auto adv = compute_gae(rewards, values, next_values, dones, hp.gamma, hp.gae_lambda);
    out.targets.push_back(critic_targets(adv, values, hp.gamma, hp.critic_target));
    out.values.push_back(std::move(values));
    out.advantages.push_back(std::move(adv));
  }
  out.uplink_advantages = mix_advantages(out, layout.uplink_coeffs, n);
  out.downlink_advantages = mix_advantages(out, layout.downlink_coeffs, n);
  return out;
}

UpdateDiagnostics update_agent(Agent& agent, Optimizers& optimizers,
                               const std::vector<Transition>& buffer,
                               const BufferTargets& targets, const env::ScenarioConfig& config,
                               const Hyperparams& hp, RngStream& shuffle) {
  const std::size_t n = buffer.size();
  const int du = config.uplink_state_dim();
  const int dd = config.downlink_state_dim();
  const StateBatches states =
      make_batches(stack_columns(buffer, pick_su, du), stack_columns(buffer, pick_sd, dd));
  const nn::Matrix actions_d = stack_columns(buffer, pick_ad_raw, config.num_users);
  const double lo = config.dl_power_min_w;
  const double hi = config.dl_power_max_w;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  UpdateDiagnostics diag;
  const auto bs = static_cast<std::size_t>(hp.batch_size);
  std::vector<std::size_t> cols;
  std::vector<std::uint64_t> a_u;
  std::vector<double> lp_u, lp_d, adv_u, adv_d;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.uniform_int(i)]);
    }
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t end = std::min(n, start + bs);
      cols.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(end));
      a_u.clear();
      lp_u.clear();
      lp_d.clear();
      adv_u.clear();
      adv_d.clear();
      for (std::size_t c : cols) {
        a_u.push_back(buffer[c].record.a_u);
        lp_u.push_back(buffer[c].log_prob_u);
        lp_d.push_back(buffer[c].log_prob_d);
        adv_u.push_back(targets.uplink_advantages[c]);
        adv_d.push_back(targets.downlink_advantages[c]);
      }
      if (hp.normalize_advantages) {
        adv_u = normalize_advantages(adv_u);
        adv_d = normalize_advantages(adv_d);
      }

      nn::ParamSet g_ul = agent.uplink_actor.zeros_like();
      const auto ul = uplink_actor_gradient(agent.uplink_actor, gather(states.uplink, cols), a_u,
                                            lp_u, adv_u, hp.clip_epsilon, hp.entropy_coef, g_ul);
      check_finite_grads(g_ul, "uplink actor");
      optimizers.uplink.step(agent.uplink_actor, g_ul);

      nn::ParamSet g_dl = agent.downlink_actor.zeros_like();
      const auto dl = downlink_actor_gradient(agent.downlink_actor, gather(states.downlink, cols),
                                              gather(actions_d, cols), lp_d, adv_d,
                                              hp.clip_epsilon, hp.entropy_coef, lo, hi, g_dl);
      check_finite_grads(g_dl, "downlink actor");
      optimizers.downlink.step(agent.downlink_actor, g_dl);

      std::vector<nn::Matrix> inputs;
      std::vector<std::vector<double>> y;
      for (std::size_t h = 0; h < agent.layout.heads.size(); ++h) {
        inputs.push_back(gather(states.get(agent.layout.heads[h].input), cols));
        std::vector<double> yh;
        yh.reserve(cols.size());
        for (std::size_t c : cols) yh.push_back(targets.targets[h][c]);
        y.push_back(std::move(yh));
      }
      nn::ParamSet g_c = agent.critic.zeros_like();
      const auto cr = critic_gradient(agent.critic, agent.layout, inputs, y, g_c);
      check_finite_grads(g_c, "critic");
      optimizers.critic.step(agent.critic, g_c);

      diag.uplink_loss += ul.loss;
      diag.downlink_loss += dl.loss;
      diag.critic_loss += cr.loss;
      ++diag.minibatches;
    }
  }
  if (diag.minibatches > 0) {
    diag.uplink_loss /= diag.minibatches;
    diag.downlink_loss /= diag.minibatches;
    diag.critic_loss /= diag.minibatches;
  }
  return diag;
}

TrainResult train(Algorithm algo, const env::ScenarioConfig& config, const Hyperparams& hp,
                  std::uint64_t seed, const TrainOptions& options) {
  if (algo == Algorithm::kRandom) {
    throw std::invalid_argument("train: the random baseline has nothing to train");
  }
  config.validate();
  hp.validate();
  const auto started = std::chrono::steady_clock::now();
  RngStreams streams = derive_rng_streams(seed);
  TrainResult result;
  result.agent = make_agent(algo, config, hp, streams);
  Agent& agent = result.agent;
  Optimizers optimizers = make_optimizers(agent, hp);
  env::Environment environment(config, streams.env_init, streams.fading, streams.augment);

  const double lo = config.dl_power_min_w;
  const double hi = config.dl_power_max_w;
  const auto capacity = static_cast<std::size_t>(hp.trajectory_length);
  std::vector<Transition> buffer;
  buffer.reserve(capacity);
  bool need_reset = true;
  EpisodeTally episode;
  CycleTally cycle;
  int phases = 0;
  std::vector<double> mean(static_cast<std::size_t>(config.num_users));

  auto sample_uplink = [&](const std::vector<double>& s_u, RngStream& rng) {
    const nn::Vector logits =
        agent.uplink_actor.mlps[0].forward(std::span<const double>(s_u));
    return nn::categorical_sample(std::span<const double>(logits.data(), logits.size()), rng);
  };

  auto emit = [&](CycleStats stats) {
    if (options.record_wall_clock) {
      stats.wall_clock_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - started)
                                .count();
    }
    if (options.on_cycle) options.on_cycle(stats);
    result.cycles.push_back(stats);
  };

  while (result.env_steps < hp.total_steps) {
    if (need_reset) {
      environment.reset();
      episode = {};
      need_reset = false;
    }
    Transition tr;
    env::StepRecord& rec = tr.record;
    rec.s_u = environment.uplink_state();
    const auto draw_u = sample_uplink(rec.s_u, streams.policy_ul);
    rec.a_u = draw_u.action;
    tr.log_prob_u = draw_u.log_prob;
    const auto gamma =
        env::decode_uplink_action(rec.a_u, config.num_users, config.num_channels);
    const auto up = environment.uplink_step(gamma);
    rec.r_u = up.reward;
    rec.s_d = up.downlink_state;

    const nn::Vector raw = agent.downlink_actor.mlps[0].forward(std::span<const double>(rec.s_d));
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean[i] = nn::squash_mean(raw(static_cast<Eigen::Index>(i)), lo, hi);
    }
    const nn::Vector& log_std = agent.downlink_actor.vectors[0];
    const auto draw_d = nn::gaussian_sample(
        mean, std::span<const double>(log_std.data(), log_std.size()), streams.policy_dl, lo, hi);
    const auto down = environment.downlink_step(draw_d.clipped);
    tr.a_d_raw = draw_d.sample;
    tr.log_prob_d = draw_d.log_prob;
    rec.a_d = draw_d.clipped;
    rec.r_d = down.reward;
    rec.r_g = down.global_reward;
    rec.s_u_next = down.uplink_state;
    rec.done = down.done;
    rec.failures = std::accumulate(down.report.failures.begin(), down.report.failures.end(), 0);
    rec.transmissions = down.report.transmissions;
    rec.energy_j = down.report.energy_j;
    rec.delay_s = down.report.delay_cost_s;
    rec.max_ul_rate_bps = down.report.max_ul_rate_bps;
    ++result.env_steps;

    if (!buffer.empty() && !buffer.back().record.done) buffer.back().s_d_next = rec.s_d;
    buffer.push_back(std::move(tr));

    episode.ru += rec.r_u;
    episode.rd += rec.r_d;
    episode.rg += rec.r_g;
    if (rec.done) {
      cycle.add(episode, environment.kpi());
      need_reset = true;
    }

    if (buffer.size() == capacity) {
      Transition& last = buffer.back();
      if (!last.record.done) {
        // Bootstrap s_d^{t+1} by playing the next uplink stage on a copy.
        env::Environment peek = environment;
        RngStream peek_rng = streams.policy_ul;
        const auto draw = sample_uplink(last.record.s_u_next, peek_rng);
        last.s_d_next = peek.uplink_step(env::decode_uplink_action(draw.action, config.num_users,
                                                                   config.num_channels))
                            .downlink_state;
      }
      const BufferTargets targets =
          compute_buffer_targets(buffer, agent.layout, agent.target_critic, hp);
      const UpdateDiagnostics diag =
          update_agent(agent, optimizers, buffer, targets, config, hp, streams.shuffle);
      ++phases;
      ++result.updates;
      if (phases % hp.target_sync_period == 0) agent.target_critic = agent.critic;
      CycleStats stats = cycle.finish(result.env_steps);
      stats.updated = true;
      stats.uplink_loss = diag.uplink_loss;
      stats.downlink_loss = diag.downlink_loss;
      stats.critic_loss = diag.critic_loss;
      emit(stats);
      cycle = {};
      buffer.clear();
    }
  }
  if (!buffer.empty()) emit(cycle.finish(result.env_steps));
  return result;
}

}  // namespace xrnoma::aahc
