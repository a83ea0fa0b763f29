#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gal/error.hpp"

namespace gal::dsp {

enum class WaveletName { db1, db2 };

inline std::string_view to_string(WaveletName w) { return w == WaveletName::db1 ? "db1" : "db2"; }

inline WaveletName parse_wavelet(std::string_view s) {
  if (s == "db1" || s == "haar") return WaveletName::db1;
  if (s == "db2") return WaveletName::db2;
  fail(ErrorKind::InvalidArgument, "unsupported wavelet '" + std::string(s) + "' (db1, db2)");
}

// Orthogonal Daubechies filter pair. `lowpass` is the scaling filter in the
// usual published order (sums to sqrt 2); `highpass` is its quadrature mirror
// h[k] = (-1)^k g[L-1-k]. Analysis correlates with these filters (equivalently,
// convolves with their reversal); synthesis convolves with them.
struct WaveletSpec {
  WaveletName name = WaveletName::db2;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t length() const { return lowpass.size(); }

  static WaveletSpec make(WaveletName name) {
    WaveletSpec w;
    w.name = name;
    if (name == WaveletName::db1) {
      const double r = 1.0 / std::numbers::sqrt2;
      w.lowpass = {r, r};
    } else {
      const double s3 = std::numbers::sqrt3;
      const double d = 4.0 * std::numbers::sqrt2;
      w.lowpass = {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d};
    }
    const std::size_t len = w.lowpass.size();
    w.highpass.resize(len);
    for (std::size_t k = 0; k < len; ++k)
      w.highpass[k] = (k % 2 == 0 ? 1.0 : -1.0) * w.lowpass[len - 1 - k];
    return w;
  }
};

// Symmetric: half-point reflection (x[-1] = x[0]), redundant coefficients.
// Periodic: circular wrap with exactly n/2 coefficients per level (orthogonal).
enum class ExtensionMode { Symmetric, Periodic };

struct DwtDecomposition {
  std::size_t levels = 0;
  std::vector<double> approx;
  std::vector<std::vector<double>> details;  // deepest level first
  std::size_t original_length = 0;
  WaveletSpec wavelet;
  ExtensionMode mode = ExtensionMode::Symmetric;
};

namespace detail {

inline std::size_t reflect_index(long long m, std::size_t n) {
  const long long period = 2 * static_cast<long long>(n);
  long long r = m % period;
  if (r < 0) r += period;
  return static_cast<std::size_t>(r < static_cast<long long>(n) ? r : period - 1 - r);
}

inline std::size_t wrap_index(long long m, std::size_t n) {
  long long r = m % static_cast<long long>(n);
  if (r < 0) r += static_cast<long long>(n);
  return static_cast<std::size_t>(r);
}

inline std::size_t coeff_length(std::size_t n, std::size_t filter_len, ExtensionMode mode) {
  return mode == ExtensionMode::Periodic ? n / 2 : (n + filter_len - 1) / 2;
}

inline bool level_feasible(std::size_t n, std::size_t filter_len, ExtensionMode mode) {
  if (n < filter_len) return false;
  return mode == ExtensionMode::Symmetric || n % 2 == 0;
}

inline long long phase(std::size_t filter_len, ExtensionMode mode) {
  return mode == ExtensionMode::Periodic ? static_cast<long long>(filter_len / 2) : 1;
}

// One analysis step: out[i] = sum_k f[L-1-k] * x[2i+s-k], i.e. every other
// sample of the convolution with the reversed filter. s = 1 for the symmetric
// mode and L/2 for the periodic one (the usual periodization alignment).
inline std::vector<double> analyze(std::span<const double> x, std::span<const double> filter,
                                   ExtensionMode mode) {
  const std::size_t n = x.size();
  const std::size_t len = filter.size();
  std::vector<double> out(coeff_length(n, len, mode));
  const long long shift = phase(len, mode);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const long long m = 2 * static_cast<long long>(i) + shift - static_cast<long long>(k);
      const std::size_t idx = mode == ExtensionMode::Periodic ? wrap_index(m, n) : reflect_index(m, n);
      acc += filter[len - 1 - k] * x[idx];
    }
    out[i] = acc;
  }
  return out;
}

// Transpose of `analyze` for both bands; for the symmetric mode it is the
// inverse on the 2n - L + 2 interior samples, for periodic the exact inverse.
inline std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                                      const WaveletSpec& w, ExtensionMode mode,
                                      std::size_t out_len) {
  const std::size_t len = w.length();
  std::vector<double> out(out_len, 0.0);
  if (mode == ExtensionMode::Periodic) {
    for (std::size_t i = 0; i < approx.size(); ++i)
      for (std::size_t k = 0; k < len; ++k) {
        const long long m =
            2 * static_cast<long long>(i) + phase(len, mode) - static_cast<long long>(k);
        const std::size_t idx = wrap_index(m, out_len);
        out[idx] += w.lowpass[len - 1 - k] * approx[i] + w.highpass[len - 1 - k] * detail[i];
      }
    return out;
  }
  // x[m] = sum_i a[i] g[m + L - 2 - 2i] + d[i] h[m + L - 2 - 2i]
  for (std::size_t m = 0; m < out_len; ++m) {
    double acc = 0.0;
    const long long base = static_cast<long long>(m + len) - 2;
    const long long lo = std::max(0LL, (base - static_cast<long long>(len) + 2) / 2);
    const long long hi = std::min(static_cast<long long>(approx.size()) - 1, base / 2);
    for (long long i = lo; i <= hi; ++i) {
      const auto j = static_cast<std::size_t>(base - 2 * i);
      const auto ii = static_cast<std::size_t>(i);
      acc += approx[ii] * w.lowpass[j] + detail[ii] * w.highpass[j];
    }
    out[m] = acc;
  }
  return out;
}

}  // namespace detail

inline std::size_t max_dwt_level(std::size_t n, const WaveletSpec& w,
                                 ExtensionMode mode = ExtensionMode::Symmetric) {
  std::size_t level = 0;
  while (detail::level_feasible(n, w.length(), mode)) {
    n = detail::coeff_length(n, w.length(), mode);
    ++level;
  }
  return level;
}

inline DwtDecomposition dwt_decompose(std::span<const double> x, const WaveletSpec& wavelet,
                                      std::size_t levels,
                                      ExtensionMode mode = ExtensionMode::Symmetric) {
  if (levels < 1) fail(ErrorKind::InvalidArgument, "dwt needs at least one level");
  const std::size_t feasible = max_dwt_level(x.size(), wavelet, mode);
  if (levels > feasible)
    fail(ErrorKind::TooShortForLevels,
         "signal of length " + std::to_string(x.size()) + " supports at most " +
             std::to_string(feasible) + " level(s) of " + std::string(to_string(wavelet.name)) +
             ", requested " + std::to_string(levels));

  DwtDecomposition d;
  d.levels = levels;
  d.original_length = x.size();
  d.wavelet = wavelet;
  d.mode = mode;
  std::vector<double> current(x.begin(), x.end());
  std::vector<std::vector<double>> finest_first;
  for (std::size_t l = 0; l < levels; ++l) {
    finest_first.push_back(detail::analyze(current, wavelet.highpass, mode));
    current = detail::analyze(current, wavelet.lowpass, mode);
  }
  d.approx = std::move(current);
  d.details.assign(finest_first.rbegin(), finest_first.rend());
  return d;
}

inline std::vector<double> dwt_reconstruct(const DwtDecomposition& d) {
  const std::size_t len = d.wavelet.length();
  if (len < 2 || d.wavelet.highpass.size() != len)
    fail(ErrorKind::InconsistentLengths, "wavelet filters are malformed");
  if (d.details.size() != d.levels || d.levels == 0)
    fail(ErrorKind::InconsistentLengths, "expected " + std::to_string(d.levels) +
                                             " detail sequences, got " +
                                             std::to_string(d.details.size()));
  // Signal length entering each level, finest first.
  std::vector<std::size_t> input_len(d.levels);
  std::size_t n = d.original_length;
  for (std::size_t l = 0; l < d.levels; ++l) {
    input_len[l] = n;
    n = detail::coeff_length(n, len, d.mode);
  }
  if (d.approx.size() != n)
    fail(ErrorKind::InconsistentLengths, "approximation has " + std::to_string(d.approx.size()) +
                                             " coefficients, expected " + std::to_string(n));
  for (std::size_t l = 0; l < d.levels; ++l) {
    const auto& det = d.details[d.levels - 1 - l];
    const std::size_t expect = detail::coeff_length(input_len[l], len, d.mode);
    if (det.size() != expect)
      fail(ErrorKind::InconsistentLengths, "detail level " + std::to_string(l + 1) + " has " +
                                               std::to_string(det.size()) +
                                               " coefficients, expected " + std::to_string(expect));
  }

  std::vector<double> current = d.approx;
  for (std::size_t j = 0; j < d.levels; ++j) {
    const std::size_t level = d.levels - 1 - j;  // finest-first index
    current = detail::synthesize(current, d.details[j], d.wavelet, d.mode, input_len[level]);
  }
  return current;
}

inline double soft_threshold(double c, double threshold) {
  if (c > threshold) return c - threshold;
  if (c < -threshold) return c + threshold;
  return 0.0;
}

inline double median_abs(std::span<const double> v) {
  if (v.empty()) return 0.0;
  std::vector<double> a(v.size());
  std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
  const std::size_t mid = a.size() / 2;
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
  double m = a[mid];
  if (a.size() % 2 == 0) {
    const double lower = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

struct Threshold {
  enum class Kind { Universal, Fixed };
  Kind kind = Kind::Universal;
  double value = 0.0;

  static Threshold universal() { return {Kind::Universal, 0.0}; }
  static Threshold fixed(double v) { return {Kind::Fixed, v}; }
};

// sigma_hat * sqrt(2 ln N), sigma_hat = median(|finest detail|) / 0.6745.
inline double universal_threshold(const DwtDecomposition& d) {
  const double sigma = median_abs(d.details.back()) / 0.6745;
  const double n = static_cast<double>(d.original_length);
  return n > 1.0 ? sigma * std::sqrt(2.0 * std::log(n)) : 0.0;
}

inline double resolve_threshold(const DwtDecomposition& d, Threshold t) {
  return t.kind == Threshold::Kind::Universal ? universal_threshold(d) : t.value;
}

// Soft-thresholds every detail coefficient; the approximation is untouched.
inline std::vector<double> wavelet_denoise(std::span<const double> x, const WaveletSpec& wavelet,
                                           std::size_t levels, Threshold threshold,
                                           ExtensionMode mode = ExtensionMode::Symmetric) {
  DwtDecomposition d = dwt_decompose(x, wavelet, levels, mode);
  const double t = resolve_threshold(d, threshold);
  if (t < 0.0) fail(ErrorKind::InvalidArgument, "threshold must be non-negative");
  for (auto& level : d.details)
    for (auto& c : level) c = soft_threshold(c, t);
  return dwt_reconstruct(d);
}

}  // namespace gal::dsp
