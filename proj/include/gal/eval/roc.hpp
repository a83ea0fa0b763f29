#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gal/error.hpp"

namespace gal::eval {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Points run from (0,0) at threshold +inf to (1,1) at the lowest score.
// Point k is the operating point "predict positive iff score >= thresholds[k]".
struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<double> thresholds;
};

namespace detail {

inline void check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels,
                         std::size_t& positives, std::size_t& negatives) {
  if (scores.size() != labels.size())
    fail(ErrorKind::LengthMismatch, std::to_string(scores.size()) + " scores vs " +
                                        std::to_string(labels.size()) + " labels");
  positives = 0;
  for (auto l : labels) {
    if (l > 1) fail(ErrorKind::NonBinaryCell, "labels must be 0 or 1");
    positives += l;
  }
  negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0)
    fail(ErrorKind::SingleClass, "ROC/AUC undefined with " + std::to_string(positives) +
                                     " positives and " + std::to_string(negatives) + " negatives");
}

}  // namespace detail

// Tied scores share one threshold, so each distinct score contributes one
// point and ties are credited one half under the trapezoid.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::size_t pos = 0, neg = 0;
  detail::check_inputs(scores, labels, pos, neg);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0, fp = 0;
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]]) ++tp; else ++fp;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    curve.thresholds.push_back(s);
  }
  return curve;
}

// Trapezoidal area under the curve's points.
inline double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

// Exhaustive enumeration of (positive, negative) pairs: a pair scores 1 when
// the positive outranks the negative and 1/2 on a tie.
inline double auc_pairwise_oracle(std::span<const double> scores,
                                  std::span<const std::uint8_t> labels) {
  std::size_t pos = 0, neg = 0;
  detail::check_inputs(scores, labels, pos, neg);
  std::uint64_t wins2 = 0;  // twice the credit, kept integral
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) wins2 += 2;
      else if (scores[i] == scores[j]) wins2 += 1;
    }
  }
  return static_cast<double>(wins2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace gal::eval
