// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_RANDOM_HPP_
#define XRNOMA_RANDOM_HPP_

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace xrnoma {

// Counter-based random stream. The output at position i is a pure function of
// (key, i), so a stream is fully described by two integers and replays
// identically on any platform with IEEE doubles.
class RngStream {
 public:
  struct State {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;
    bool operator==(const State&) const = default;
  };

  RngStream() = default;
  explicit RngStream(State state) : state_(state) {}

  // Stream keyed on (global_seed, name).
  static RngStream derive(std::uint64_t global_seed, std::string_view name);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer on [0, n); n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();
  // Standard circularly-symmetric complex normal CN(0, 1).
  std::complex<double> complex_normal();

  State state() const { return state_; }
  void restore(State state) { state_ = state; }

  // "key:counter" in lowercase hex.
  std::string serialize() const;
  static RngStream deserialize(std::string_view text);

 private:
  State state_;
};

// Named streams used by one training/evaluation run.
struct RngStreams {
  RngStream env_init;
  RngStream fading;
  RngStream augment;
  RngStream policy_ul;
  RngStream policy_dl;
  RngStream shuffle;
};

RngStreams derive_rng_streams(std::uint64_t global_seed);

}  // namespace xrnoma

#endif  // XRNOMA_RANDOM_HPP_
