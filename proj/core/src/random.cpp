// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/random.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xrnoma {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream RngStream::derive(std::uint64_t global_seed, std::string_view name) {
  const std::uint64_t key = mix64(mix64(global_seed + kGolden) ^ fnv1a(name));
  return RngStream(State{key, 0});
}

std::uint64_t RngStream::next_u64() {
  ++state_.counter;
  return mix64(state_.key + state_.counter * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  // Rejection sampling on the largest multiple of n.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double RngStream::normal() {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> RngStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::string RngStream::serialize() const {
  char buf[40];
  auto end = std::to_chars(buf, buf + sizeof(buf), state_.key, 16).ptr;
  *end++ = ':';
  end = std::to_chars(end, buf + sizeof(buf), state_.counter, 16).ptr;
  return std::string(buf, end);
}

RngStream RngStream::deserialize(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("rng state: missing ':' in '" + std::string(text) + "'");
  }
  State s;
  const auto parse = [&](std::string_view part, std::uint64_t& out) {
    const auto res = std::from_chars(part.data(), part.data() + part.size(), out, 16);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size()) {
      throw std::invalid_argument("rng state: malformed '" + std::string(text) + "'");
    }
  };
  parse(text.substr(0, colon), s.key);
  parse(text.substr(colon + 1), s.counter);
  return RngStream(s);
}

RngStreams derive_rng_streams(std::uint64_t global_seed) {
  return RngStreams{
      RngStream::derive(global_seed, "envInit"),
      RngStream::derive(global_seed, "fading"),
      RngStream::derive(global_seed, "augment"),
      RngStream::derive(global_seed, "policyUl"),
      RngStream::derive(global_seed, "policyDl"),
      RngStream::derive(global_seed, "shuffle"),
  };
}

}  // namespace xrnoma
