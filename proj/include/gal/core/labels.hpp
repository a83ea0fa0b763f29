#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gal/core/recording.hpp"
#include "gal/error.hpp"

namespace gal {

// Default ±150 ms at 500 Hz.
inline constexpr std::size_t kDefaultLabelTolerance = 75;

inline std::size_t tolerance_samples(double tolerance_seconds, double sample_rate) {
  return static_cast<std::size_t>(std::llround(tolerance_seconds * sample_rate));
}

// Target e of window i is 1 iff event e is active somewhere in
// [end_i - tolerance, end_i + tolerance] (clipped to the series).
inline std::vector<EventVector> label_windows(const EventLabels& labels,
                                              std::span<const std::size_t> window_end_indices,
                                              std::size_t tolerance) {
  const std::size_t n = labels.n_samples();
  // prefix[e][t] = number of active samples of event e in [0, t)
  std::vector<std::vector<std::size_t>> prefix(kNumEvents, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t e = 0; e < kNumEvents; ++e)
    for (std::size_t t = 0; t < n; ++t)
      prefix[e][t + 1] = prefix[e][t] + (labels.active(e, t) ? 1 : 0);

  std::vector<EventVector> out;
  out.reserve(window_end_indices.size());
  for (std::size_t end : window_end_indices) {
    if (end >= n)
      fail(ErrorKind::IndexOutOfRange,
           "window end " + std::to_string(end) + " outside [0, " + std::to_string(n) + ")");
    const std::size_t lo = end >= tolerance ? end - tolerance : 0;
    const std::size_t hi = std::min(n - 1, end + tolerance);
    EventVector v{};
    for (std::size_t e = 0; e < kNumEvents; ++e)
      v[e] = prefix[e][hi + 1] - prefix[e][lo] > 0 ? 1 : 0;
    out.push_back(v);
  }
  return out;
}

}  // namespace gal
