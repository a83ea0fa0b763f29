#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gal/error.hpp"

namespace gal {

inline constexpr std::size_t kNumEvents = 6;

// Column order of the WAY-EEG-GAL events file.
inline constexpr std::array<std::string_view, kNumEvents> kEventNames = {
    "HandStart", "FirstDigitTouch", "BothStartLoadPhase", "LiftOff", "Replace", "BothRelease"};

inline constexpr std::array<std::string_view, kNumEvents> kEventAbbrev = {"HS", "FDT", "BSP",
                                                                          "LO", "R",   "BR"};

inline constexpr double kDefaultSampleRate = 500.0;

using EventVector = std::array<std::uint8_t, kNumEvents>;

// Multichannel EEG series. samples()[c][t] is channel c at sample t (microvolts).
class Recording {
 public:
  Recording() = default;

  Recording(std::vector<std::string> channels, std::vector<std::vector<double>> samples,
            double sample_rate, std::string subject_id = {}, std::string series_id = {})
      : channels_(std::move(channels)),
        samples_(std::move(samples)),
        sample_rate_(sample_rate),
        subject_id_(std::move(subject_id)),
        series_id_(std::move(series_id)) {
    if (channels_.empty()) fail(ErrorKind::InvalidArgument, "recording has no channels");
    if (channels_.size() != samples_.size())
      fail(ErrorKind::InvalidArgument,
           "channel names (" + std::to_string(channels_.size()) + ") do not match sample rows (" +
               std::to_string(samples_.size()) + ")");
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
      fail(ErrorKind::InvalidArgument, "sample rate must be positive");
    const std::size_t n = samples_.front().size();
    if (n == 0) fail(ErrorKind::InvalidArgument, "recording has no samples");
    for (std::size_t c = 0; c < samples_.size(); ++c)
      if (samples_[c].size() != n)
        fail(ErrorKind::InvalidArgument, "channel '" + channels_[c] + "' has ragged length");
  }

  const std::vector<std::string>& channels() const { return channels_; }
  const std::vector<std::vector<double>>& samples() const { return samples_; }
  const std::vector<double>& channel(std::size_t c) const { return samples_.at(c); }
  double sample_rate() const { return sample_rate_; }
  const std::string& subject_id() const { return subject_id_; }
  const std::string& series_id() const { return series_id_; }

  std::size_t n_channels() const { return channels_.size(); }
  std::size_t n_samples() const { return samples_.empty() ? 0 : samples_.front().size(); }

  // Same metadata, new sample matrix.
  Recording with_samples(std::vector<std::vector<double>> samples) const {
    return Recording(channels_, std::move(samples), sample_rate_, subject_id_, series_id_);
  }

 private:
  std::vector<std::string> channels_;
  std::vector<std::vector<double>> samples_;
  double sample_rate_ = kDefaultSampleRate;
  std::string subject_id_;
  std::string series_id_;
};

// Per-sample activity of the six GAL events; flags()[e][t] in {0, 1}.
class EventLabels {
 public:
  EventLabels() = default;

  explicit EventLabels(std::vector<std::vector<std::uint8_t>> flags) : flags_(std::move(flags)) {
    if (flags_.size() != kNumEvents)
      fail(ErrorKind::WrongEventColumns,
           "expected " + std::to_string(kNumEvents) + " event rows, got " +
               std::to_string(flags_.size()));
    const std::size_t n = flags_.front().size();
    for (const auto& row : flags_) {
      if (row.size() != n) fail(ErrorKind::LengthMismatch, "event rows differ in length");
      for (auto v : row)
        if (v > 1) fail(ErrorKind::NonBinaryCell, "event flag outside {0,1}");
    }
  }

  static EventLabels zeros(std::size_t n_samples) {
    return EventLabels(std::vector<std::vector<std::uint8_t>>(
        kNumEvents, std::vector<std::uint8_t>(n_samples, 0)));
  }

  const std::vector<std::vector<std::uint8_t>>& flags() const { return flags_; }
  std::size_t n_samples() const { return flags_.empty() ? 0 : flags_.front().size(); }
  bool active(std::size_t event, std::size_t t) const { return flags_[event][t] != 0; }

 private:
  std::vector<std::vector<std::uint8_t>> flags_;
};

}  // namespace gal
