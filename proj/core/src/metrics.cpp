// SPDX-License-Identifier: Apache-2.0

#include "xrnoma/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

namespace xrnoma::harness {
namespace {

std::string g6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view text, const char* name) {
  T out{};
  const auto r = std::from_chars(text.data(), text.data() + text.size(), out);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("metrics: bad ") + name + " '" + std::string(text) +
                                "'");
  }
  return out;
}

long last_env_step(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  long last = -1;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      if (line != kMetricsHeader) {
        throw MetricsIoError(path.string() + ": existing file has a different header");
      }
      header = false;
      continue;
    }
    if (!line.empty()) last = parse_metrics_row(line).env_step;
  }
  return last;
}

}  // namespace

MetricsRow to_metrics_row(const aahc::CycleStats& s, std::string_view algo,
                          std::string_view scenario, std::uint64_t seed) {
  return {std::string(algo), std::string(scenario), seed, s.env_step, s.episodes, s.mean_ru,
          s.mean_rd, s.mean_rg, s.mean_iterations, s.retrans_pct, s.max_ul_rate_gbps, s.energy_j,
          s.total_delay_ms, s.wall_clock_ms};
}

std::string format_metrics_row(const MetricsRow& r) {
  std::string out = r.algo + "," + r.scenario + "," + std::to_string(r.seed) + "," +
                    std::to_string(r.env_step) + "," + std::to_string(r.episodes);
  for (double x : {r.mean_ru, r.mean_rd, r.mean_rg, r.mean_iterations, r.retrans_pct,
                   r.max_ul_rate_gbps, r.energy_j, r.total_delay_ms, r.wall_clock_ms}) {
    out += "," + g6(x);
  }
  return out;
}

MetricsRow parse_metrics_row(std::string_view line) {
  const auto f = split_csv(line);
  if (f.size() != 14) throw std::invalid_argument("metrics: expected 14 fields");
  MetricsRow r;
  r.algo = std::string(f[0]);
  r.scenario = std::string(f[1]);
  r.seed = parse_field<std::uint64_t>(f[2], "seed");
  r.env_step = parse_field<long>(f[3], "env_step");
  r.episodes = parse_field<int>(f[4], "episodes");
  double* reals[] = {&r.mean_ru,          &r.mean_rd,  &r.mean_rg,        &r.mean_iterations,
                     &r.retrans_pct,      &r.max_ul_rate_gbps, &r.energy_j, &r.total_delay_ms,
                     &r.wall_clock_ms};
  for (std::size_t i = 0; i < 9; ++i) *reals[i] = parse_field<double>(f[5 + i], "value");
  return r;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path, bool append) : path_(path) {
  const bool resume = append && std::filesystem::exists(path) &&
                      std::filesystem::file_size(path) > 0;
  if (resume) last_step_ = last_env_step(path);
  out_.open(path, resume ? std::ios::app : std::ios::trunc);
  if (!out_) throw MetricsIoError(path.string() + ": cannot open for writing");
  if (!resume) out_ << kMetricsHeader << '\n';
  out_.flush();
  if (!out_) throw MetricsIoError(path.string() + ": write failed");
}

void MetricsWriter::write(const MetricsRow& row) {
  if (row.env_step < last_step_) {
    throw std::invalid_argument(path_.string() + ": env_step " + std::to_string(row.env_step) +
                                " precedes " + std::to_string(last_step_));
  }
  out_ << format_metrics_row(row) << '\n';
  out_.flush();
  if (!out_) throw MetricsIoError(path_.string() + ": write failed");
  last_step_ = row.env_step;
}

void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  MetricsWriter writer(path);
  for (const auto& r : rows) writer.write(r);
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MetricsIoError(path.string() + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw MetricsIoError(path.string() + ": missing or unexpected header");
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_metrics_row(line));
  }
  return rows;
}

}  // namespace xrnoma::harness
