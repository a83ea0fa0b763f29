#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gal/core/recording.hpp"
#include "gal/error.hpp"

namespace gal::dsp {

// Per-channel population mean and standard deviation.
struct StandardizationStats {
  std::vector<std::string> channels;
  std::vector<double> mean;
  std::vector<double> std;
};

namespace detail {

inline std::size_t channel_index(const Recording& rec, const std::string& name) {
  for (std::size_t c = 0; c < rec.n_channels(); ++c)
    if (rec.channels()[c] == name) return c;
  fail(ErrorKind::ChannelMismatch, "channel '" + name + "' not present in recording");
}

}  // namespace detail

// Pooled statistics over several recordings (e.g. all training series).
// `channel_subset` empty means every channel of the first recording.
inline StandardizationStats fit_standardizer(std::span<const Recording> recordings,
                                             std::span<const std::string> channel_subset = {}) {
  if (recordings.empty()) fail(ErrorKind::EmptyInput, "no recordings to fit");
  StandardizationStats stats;
  if (channel_subset.empty())
    stats.channels = recordings.front().channels();
  else
    stats.channels.assign(channel_subset.begin(), channel_subset.end());

  for (const auto& name : stats.channels) {
    // Two-pass with compensation.
    std::size_t count = 0;
    double sum = 0.0;
    for (const auto& rec : recordings) {
      const auto& row = rec.channel(detail::channel_index(rec, name));
      for (double v : row) sum += v;
      count += row.size();
    }
    if (count < 2)
      fail(ErrorKind::DegenerateChannel, "channel '" + name + "' has fewer than 2 samples");
    const double mean0 = sum / static_cast<double>(count);
    double sq = 0.0, corr = 0.0;
    for (const auto& rec : recordings) {
      const auto& row = rec.channel(detail::channel_index(rec, name));
      for (double v : row) {
        const double d = v - mean0;
        sq += d * d;
        corr += d;
      }
    }
    const double n = static_cast<double>(count);
    const double mean = mean0 + corr / n;
    const double var = (sq - corr * corr / n) / n;
    if (!(var > 0.0) || !std::isfinite(var))
      fail(ErrorKind::DegenerateChannel, "channel '" + name + "' is constant");
    stats.mean.push_back(mean);
    stats.std.push_back(std::sqrt(var));
  }
  return stats;
}

inline StandardizationStats fit_standardizer(const Recording& rec,
                                             std::span<const std::string> channel_subset = {}) {
  return fit_standardizer(std::span<const Recording>(&rec, 1), channel_subset);
}

inline Recording standardize(const Recording& rec, const StandardizationStats& stats) {
  if (stats.channels != rec.channels())
    fail(ErrorKind::ChannelMismatch, "standardization stats cover " +
                                         std::to_string(stats.channels.size()) +
                                         " channels that do not match the recording's " +
                                         std::to_string(rec.n_channels()));
  auto samples = rec.samples();
  for (std::size_t c = 0; c < samples.size(); ++c) {
    const double m = stats.mean[c];
    const double sd = stats.std[c];
    for (double& v : samples[c]) v = (v - m) / sd;
  }
  return rec.with_samples(std::move(samples));
}

}  // namespace gal::dsp
