#pragma once

#include <span>
#include <vector>

#include "gal/error.hpp"

namespace gal::dsp {

// Full linear convolution: y[n] = sum_k x[k] g[n - k], length |x| + |g| - 1.
inline std::vector<double> convolve(std::span<const double> x, std::span<const double> g) {
  if (x.empty() || g.empty()) fail(ErrorKind::EmptyInput, "convolve needs non-empty inputs");
  std::vector<double> y(x.size() + g.size() - 1, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = x[k];
    for (std::size_t j = 0; j < g.size(); ++j) y[k + j] += xk * g[j];
  }
  return y;
}

}  // namespace gal::dsp
