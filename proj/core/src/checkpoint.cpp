// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace xrnoma::harness {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "xrnoma-checkpoint";

std::string hex(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double unhex(const json& j) {
  if (!j.is_string()) throw CheckpointError("checkpoint: value is not a hex-float string");
  const std::string s = j.get<std::string>();
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw CheckpointError("checkpoint: malformed number '" + s + "'");
  }
  return x;
}

json dump_values(std::span<const double> values) {
  json arr = json::array();
  for (double v : values) arr.push_back(hex(v));
  return arr;
}

void load_values(const json& arr, std::span<double> out, const std::string& what) {
  if (!arr.is_array() || arr.size() != out.size()) {
    throw CheckpointError("checkpoint: " + what + " has the wrong number of values");
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = unhex(arr[i]);
}

json dump_params(const nn::ParamSet& p) {
  json mlps = json::array();
  for (const auto& m : p.mlps) {
    json layers = json::array();
    for (const auto& l : m.layers()) {
      layers.push_back({{"weight", dump_values({l.weight.data(), static_cast<std::size_t>(l.weight.size())})},
                        {"bias", dump_values({l.bias.data(), static_cast<std::size_t>(l.bias.size())})}});
    }
    mlps.push_back({{"sizes", m.sizes()}, {"layers", std::move(layers)}});
  }
  json vectors = json::array();
  for (const auto& v : p.vectors) {
    vectors.push_back(dump_values({v.data(), static_cast<std::size_t>(v.size())}));
  }
  return {{"mlps", std::move(mlps)}, {"vectors", std::move(vectors)}};
}

nn::ParamSet load_params(const json& j, const std::string& name) {
  nn::ParamSet p;
  for (const auto& jm : j.at("mlps")) {
    const auto sizes = jm.at("sizes").get<std::vector<int>>();
    nn::Mlp m;
    try {
      m = nn::Mlp(sizes);
    } catch (const std::invalid_argument& e) {
      throw CheckpointError("checkpoint: " + name + ": " + e.what());
    }
    const auto& jl = jm.at("layers");
    if (!jl.is_array() || jl.size() != m.layers().size()) {
      throw CheckpointError("checkpoint: " + name + ": layer count does not match sizes");
    }
    for (std::size_t l = 0; l < jl.size(); ++l) {
      auto& layer = m.layers()[l];
      load_values(jl[l].at("weight"), {layer.weight.data(), static_cast<std::size_t>(layer.weight.size())},
                  name + " weight");
      load_values(jl[l].at("bias"), {layer.bias.data(), static_cast<std::size_t>(layer.bias.size())},
                  name + " bias");
    }
    p.mlps.push_back(std::move(m));
  }
  for (const auto& jv : j.at("vectors")) {
    if (!jv.is_array()) throw CheckpointError("checkpoint: " + name + ": vector is not an array");
    nn::Vector v(static_cast<Eigen::Index>(jv.size()));
    load_values(jv, {v.data(), static_cast<std::size_t>(v.size())}, name + " vector");
    p.vectors.push_back(std::move(v));
  }
  return p;
}

bool same_shapes(const nn::ParamSet& a, const nn::ParamSet& b) {
  if (a.mlps.size() != b.mlps.size() || a.vectors.size() != b.vectors.size()) return false;
  for (std::size_t i = 0; i < a.mlps.size(); ++i) {
    if (a.mlps[i].sizes() != b.mlps[i].sizes()) return false;
  }
  for (std::size_t i = 0; i < a.vectors.size(); ++i) {
    if (a.vectors[i].size() != b.vectors[i].size()) return false;
  }
  return true;
}

}  // namespace

const nn::ParamSet& Checkpoint::network(const std::string& name) const {
  for (const auto& [n, p] : networks) {
    if (n == name) return p;
  }
  throw CheckpointError("checkpoint: no network named '" + name + "'");
}

std::string serialize_checkpoint(const Checkpoint& c) {
  json nets = json::array();
  for (const auto& [name, params] : c.networks) {
    json entry = dump_params(params);
    entry["name"] = name;
    nets.push_back(std::move(entry));
  }
  const json doc = {{"format", kFormat},
                    {"meta",
                     {{"algo", c.meta.algo},
                      {"scenario", c.meta.scenario},
                      {"env_step", c.meta.env_step},
                      {"seed", c.meta.seed},
                      {"version", c.meta.version}}},
                    {"networks", std::move(nets)}};
  return doc.dump(1) + "\n";
}

Checkpoint deserialize_checkpoint(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint: malformed or truncated file: ") + e.what());
  }
  try {
    if (doc.at("format") != kFormat) throw CheckpointError("checkpoint: not an xrnoma checkpoint");
    Checkpoint c;
    const auto& meta = doc.at("meta");
    c.meta.version = meta.at("version").get<int>();
    if (c.meta.version != kCheckpointVersion) {
      throw CheckpointError("checkpoint: version " + std::to_string(c.meta.version) +
                            " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
    }
    c.meta.algo = meta.at("algo").get<std::string>();
    c.meta.scenario = meta.at("scenario").get<std::string>();
    c.meta.env_step = meta.at("env_step").get<long>();
    c.meta.seed = meta.at("seed").get<std::uint64_t>();
    for (const auto& jn : doc.at("networks")) {
      const auto name = jn.at("name").get<std::string>();
      c.networks.emplace_back(name, load_params(jn, name));
    }
    return c;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: unexpected structure: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(path.string() + ": cannot open for writing");
  out << serialize_checkpoint(checkpoint);
  if (!out) throw CheckpointError(path.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(path.string() + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return deserialize_checkpoint(text.str());
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

Checkpoint make_checkpoint(const aahc::Agent& agent, const env::ScenarioConfig& config,
                           long env_step, std::uint64_t seed) {
  Checkpoint c;
  c.meta.algo = std::string(aahc::to_string(agent.algorithm));
  c.meta.scenario = config.name;
  c.meta.env_step = env_step;
  c.meta.seed = seed;
  c.networks = {{"uplink_actor", agent.uplink_actor},
                {"downlink_actor", agent.downlink_actor},
                {"critic", agent.critic},
                {"target_critic", agent.target_critic}};
  return c;
}

aahc::Agent agent_from_checkpoint(const Checkpoint& checkpoint, const env::ScenarioConfig& config,
                                  const aahc::Hyperparams& hp) {
  aahc::Algorithm algo;
  try {
    algo = aahc::parse_algorithm(checkpoint.meta.algo);
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  if (algo == aahc::Algorithm::kRandom) {
    throw CheckpointError("checkpoint: the random baseline has no networks");
  }
  if (checkpoint.meta.scenario != config.name) {
    throw CheckpointError("checkpoint: trained on scenario " + checkpoint.meta.scenario +
                          ", requested " + config.name);
  }
  // A fresh agent supplies the expected shapes.
  aahc::Agent agent = aahc::make_agent(algo, config, hp, checkpoint.meta.seed);
  auto take = [&](const char* name, nn::ParamSet& slot) {
    const nn::ParamSet& p = checkpoint.network(name);
    if (!same_shapes(p, slot)) {
      throw CheckpointError(std::string("checkpoint: ") + name +
                            " shapes do not match the configured networks");
    }
    slot = p;
  };
  take("uplink_actor", agent.uplink_actor);
  take("downlink_actor", agent.downlink_actor);
  take("critic", agent.critic);
  take("target_critic", agent.target_critic);
  return agent;
}

}  // namespace xrnoma::harness
