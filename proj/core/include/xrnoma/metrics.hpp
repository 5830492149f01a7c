// SPDX-License-Identifier: Apache-2.0

#ifndef XRNOMA_METRICS_HPP_
#define XRNOMA_METRICS_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xrnoma/trainer.hpp"

namespace xrnoma::harness {

inline constexpr std::string_view kMetricsHeader =
    "algo,scenario,seed,env_step,episodes,mean_ru,mean_rd,mean_rg,mean_iterations,retrans_pct,"
    "max_ul_rate_gbps,energy_j,total_delay_ms,wall_clock_ms";

struct MetricsRow {
  std::string algo;
  std::string scenario;
  std::uint64_t seed = 0;
  long env_step = 0;
  int episodes = 0;
  double mean_ru = 0.0;
  double mean_rd = 0.0;
  double mean_rg = 0.0;
  double mean_iterations = 0.0;
  double retrans_pct = 0.0;
  double max_ul_rate_gbps = 0.0;
  double energy_j = 0.0;
  double total_delay_ms = 0.0;
  double wall_clock_ms = 0.0;
};

MetricsRow to_metrics_row(const aahc::CycleStats& stats, std::string_view algo,
                          std::string_view scenario, std::uint64_t seed);

// One CSV line without the newline; reals use %.6g.
std::string format_metrics_row(const MetricsRow& row);
// Throws std::invalid_argument on a malformed line.
MetricsRow parse_metrics_row(std::string_view line);

class MetricsIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Streams rows to a CSV file. In append mode an existing file keeps its
// rows and new env_step values must not go below the last one written.
class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, bool append = false);

  // Throws std::invalid_argument when env_step decreases, MetricsIoError on
  // write failure.
  void write(const MetricsRow& row);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  long last_step_ = -1;
};

// Header plus rows; a header-only file for an empty list.
void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
// Throws MetricsIoError when unreadable or the header differs.
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

}  // namespace xrnoma::harness

#endif  // XRNOMA_METRICS_HPP_
