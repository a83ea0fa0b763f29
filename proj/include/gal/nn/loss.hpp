#pragma once

#include <algorithm>
#include <cmath>

#include "gal/error.hpp"
#include "gal/nn/tensor.hpp"

namespace gal::nn {

inline constexpr double kBceClamp = 1e-7;

struct LossResult {
  double value = 0.0;
  Tensor grad;  // d loss / d scores
};

// Mean over all entries of -[t ln s + (1 - t) ln(1 - s)], s clamped to
// [1e-7, 1 - 1e-7]. The gradient is zero where the clamp is active.
inline LossResult bce_loss(const Tensor& scores, const Tensor& targets) {
  if (scores.shape() != targets.shape())
    fail(ErrorKind::ShapeMismatch, "scores " + shape_str(scores.shape()) + " vs targets " +
                                       shape_str(targets.shape()));
  if (scores.empty()) fail(ErrorKind::ShapeMismatch, "empty score tensor");
  const double inv_n = 1.0 / static_cast<double>(scores.size());
  LossResult r{0.0, Tensor(scores.shape())};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double raw = scores[i];
    const double s = std::clamp(raw, kBceClamp, 1.0 - kBceClamp);
    const double t = targets[i];
    r.value -= t * std::log(s) + (1.0 - t) * std::log(1.0 - s);
    const bool clamped = raw < kBceClamp || raw > 1.0 - kBceClamp;
    r.grad[i] = clamped ? 0.0 : inv_n * (s - t) / (s * (1.0 - s));
  }
  r.value *= inv_n;
  return r;
}

}  // namespace gal::nn
