// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_CONFIG_HPP_
#define XRNOMA_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xrnoma/env.hpp"
#include "xrnoma/hyperparams.hpp"

namespace xrnoma::harness {

struct RunSpec {
  aahc::Algorithm algorithm = aahc::Algorithm::kAahc;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "runs";
  int eval_episodes = 200;
  bool record_wall_clock = false;
};

struct ResolvedConfig {
  RunSpec run;
  env::ScenarioConfig scenario;
  aahc::Hyperparams hyper;
};

// Parse or validation failure. line() is 0 when the problem is not tied to
// one input line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Applies one "key = value" setting. Keys carry a section prefix: run.,
// scenario., fading. or hyper.; "scenario" alone selects an m-n preset.
// Throws ConfigError (line 0) for unknown keys and malformed values.
void apply_setting(ResolvedConfig& config, std::string_view key, std::string_view value);

// Parses "key = value" lines ('#' starts a comment) on top of base and
// validates the result. Errors cite source:line.
ResolvedConfig parse_config(std::string_view text, std::string_view source = "<config>",
                            const ResolvedConfig& base = {});
ResolvedConfig load_config_file(const std::filesystem::path& path,
                                const ResolvedConfig& base = {});

// Every key with its resolved value, in a form parse_config accepts and that
// reproduces the same configuration bit for bit.
std::string render_config(const ResolvedConfig& config);

// Throws ConfigError naming the first violated invariant.
void validate(const ResolvedConfig& config);

}  // namespace xrnoma::harness

#endif  // XRNOMA_CONFIG_HPP_
