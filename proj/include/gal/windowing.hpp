#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gal/core/labels.hpp"
#include "gal/core/recording.hpp"
#include "gal/error.hpp"

namespace gal {

struct WindowSpec {
  std::size_t length = 256;
  std::size_t stride = 32;
  std::size_t label_tolerance = kDefaultLabelTolerance;

  void validate() const {
    if (length < 1) fail(ErrorKind::InvalidArgument, "window length must be >= 1");
    if (stride < 1) fail(ErrorKind::InvalidArgument, "window stride must be >= 1");
  }
};

// C x T windows over one or more recordings. Windows are views: the matrix is
// copied out of the source recording on demand, so per-sample (stride 1)
// evaluation does not materialize every window at once.
class WindowBatch {
 public:
  struct Ref {
    std::size_t source = 0;
    std::size_t end = 0;  // inclusive last sample of the window
  };

  WindowBatch() = default;
  WindowBatch(std::size_t channels, std::size_t length) : channels_(channels), length_(length) {}

  std::size_t size() const { return refs_.size(); }
  bool empty() const { return refs_.empty(); }
  std::size_t channels() const { return channels_; }
  std::size_t length() const { return length_; }
  const std::vector<EventVector>& targets() const { return targets_; }
  const std::vector<Ref>& refs() const { return refs_; }
  const std::vector<std::shared_ptr<const Recording>>& sources() const { return sources_; }

  std::vector<std::size_t> end_indices() const {
    std::vector<std::size_t> out;
    out.reserve(refs_.size());
    for (const auto& r : refs_) out.push_back(r.end);
    return out;
  }

  // Row-major C x T copy of window i into `out` (size C*T).
  void copy_window(std::size_t i, std::span<double> out) const {
    const Ref& r = refs_.at(i);
    const Recording& rec = *sources_[r.source];
    const std::size_t start = r.end + 1 - length_;
    for (std::size_t c = 0; c < channels_; ++c) {
      const auto& row = rec.samples()[c];
      std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(start), length_,
                  out.begin() + static_cast<std::ptrdiff_t>(c * length_));
    }
  }

  std::vector<double> window(std::size_t i) const {
    std::vector<double> m(channels_ * length_);
    copy_window(i, m);
    return m;
  }

  void append(std::shared_ptr<const Recording> rec, std::span<const std::size_t> ends,
              std::span<const EventVector> targets) {
    if (rec->n_channels() != channels_)
      fail(ErrorKind::ShapeMismatch, "recording has " + std::to_string(rec->n_channels()) +
                                         " channels, batch expects " + std::to_string(channels_));
    const std::size_t src = sources_.size();
    sources_.push_back(std::move(rec));
    for (std::size_t i = 0; i < ends.size(); ++i) {
      refs_.push_back({src, ends[i]});
      targets_.push_back(targets[i]);
    }
  }

  void append(const WindowBatch& other) {
    if (other.empty()) return;
    if (empty() && sources_.empty()) {
      channels_ = other.channels_;
      length_ = other.length_;
    }
    if (other.channels_ != channels_ || other.length_ != length_)
      fail(ErrorKind::ShapeMismatch, "cannot concatenate window batches of different shape");
    const std::size_t offset = sources_.size();
    sources_.insert(sources_.end(), other.sources_.begin(), other.sources_.end());
    for (const auto& r : other.refs_) refs_.push_back({r.source + offset, r.end});
    targets_.insert(targets_.end(), other.targets_.begin(), other.targets_.end());
  }

 private:
  std::size_t channels_ = 0;
  std::size_t length_ = 0;
  std::vector<std::shared_ptr<const Recording>> sources_;
  std::vector<Ref> refs_;
  std::vector<EventVector> targets_;
};

// Window ends T-1, T-1+stride, ... (causal: each window sees only samples up
// to and including its end).
inline std::vector<std::size_t> window_end_indices(std::size_t n_samples, const WindowSpec& spec) {
  spec.validate();
  if (n_samples < spec.length)
    fail(ErrorKind::RecordingTooShort, "recording of " + std::to_string(n_samples) +
                                           " samples is shorter than the window length " +
                                           std::to_string(spec.length));
  std::vector<std::size_t> ends;
  for (std::size_t e = spec.length - 1; e < n_samples; e += spec.stride) ends.push_back(e);
  return ends;
}

inline WindowBatch make_windows(std::shared_ptr<const Recording> rec, const EventLabels& labels,
                                const WindowSpec& spec) {
  if (labels.n_samples() != rec->n_samples())
    fail(ErrorKind::LengthMismatch, "labels and recording differ in length");
  const auto ends = window_end_indices(rec->n_samples(), spec);
  const auto targets = label_windows(labels, ends, spec.label_tolerance);
  WindowBatch batch(rec->n_channels(), spec.length);
  batch.append(std::move(rec), ends, targets);
  return batch;
}

inline WindowBatch make_windows(const Recording& rec, const EventLabels& labels,
                                const WindowSpec& spec) {
  return make_windows(std::make_shared<const Recording>(rec), labels, spec);
}

// Identifier of one recorded series. Ordering is "natural": embedded numbers
// compare numerically, so series10 sorts after series9.
struct SeriesKey {
  std::string subject;
  std::string series;

  static int natural_compare(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (std::isdigit(static_cast<unsigned char>(a[i])) &&
          std::isdigit(static_cast<unsigned char>(b[j]))) {
        std::size_t ie = i, je = j;
        while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
        while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
        unsigned long long x = 0, y = 0;
        std::from_chars(a.data() + i, a.data() + ie, x);
        std::from_chars(b.data() + j, b.data() + je, y);
        if (x != y) return x < y ? -1 : 1;
        i = ie;
        j = je;
      } else {
        if (a[i] != b[j]) return a[i] < b[j] ? -1 : 1;
        ++i;
        ++j;
      }
    }
    if (i < a.size()) return 1;
    if (j < b.size()) return -1;
    return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
  }

  friend bool operator<(const SeriesKey& l, const SeriesKey& r) {
    if (int c = natural_compare(l.subject, r.subject); c != 0) return c < 0;
    return natural_compare(l.series, r.series) < 0;
  }
  friend bool operator==(const SeriesKey& l, const SeriesKey& r) = default;
};

// Holds out the last `holdout_per_subject` series (natural order) of every
// subject for testing.
struct HoldoutRule {
  std::size_t holdout_per_subject = 2;
};

template <typename T>
struct SeriesSplit {
  std::map<SeriesKey, T> train;
  std::map<SeriesKey, T> test;
};

template <typename T>
SeriesSplit<T> split_by_series(const std::map<SeriesKey, T>& items, const HoldoutRule& rule) {
  std::map<std::string, std::vector<SeriesKey>, bool (*)(const std::string&, const std::string&)>
      by_subject([](const std::string& a, const std::string& b) {
        return SeriesKey::natural_compare(a, b) < 0;
      });
  for (const auto& [key, _] : items) by_subject[key.subject].push_back(key);

  SeriesSplit<T> split;
  for (auto& [subject, keys] : by_subject) {
    if (rule.holdout_per_subject > 0 && keys.size() < rule.holdout_per_subject + 1)
      fail(ErrorKind::InsufficientSeries,
           "subject '" + subject + "' has " + std::to_string(keys.size()) +
               " series; holding out " + std::to_string(rule.holdout_per_subject) +
               " needs at least " + std::to_string(rule.holdout_per_subject + 1));
    std::sort(keys.begin(), keys.end());
    const std::size_t n_train = keys.size() - rule.holdout_per_subject;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      auto& dest = i < n_train ? split.train : split.test;
      dest.emplace(keys[i], items.at(keys[i]));
    }
  }
  return split;
}

template <typename T>
SeriesSplit<T> split_by_series(const std::vector<std::pair<SeriesKey, T>>& items,
                               const HoldoutRule& rule) {
  std::map<SeriesKey, T> m;
  for (const auto& [k, v] : items) {
    if (!m.emplace(k, v).second)
      fail(ErrorKind::InvalidArgument,
           "duplicate series '" + k.subject + "/" + k.series + "'");
  }
  return split_by_series(m, rule);
}

}  // namespace gal
