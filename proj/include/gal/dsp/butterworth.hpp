#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gal/error.hpp"

namespace gal::dsp {

enum class FilterKind { Highpass, Bandpass };

inline std::string_view to_string(FilterKind k) {
  return k == FilterKind::Highpass ? "highpass" : "bandpass";
}

inline FilterKind parse_filter_kind(std::string_view s) {
  if (s == "highpass" || s == "hpf") return FilterKind::Highpass;
  if (s == "bandpass" || s == "bpf") return FilterKind::Bandpass;
  fail(ErrorKind::InvalidArgument, "unknown filter kind '" + std::string(s) + "'");
}

// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2). First-order
// sections carry b2 = a2 = 0.
struct SecondOrderSection {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z_inv) const {
    return (b0 + z_inv * (b1 + z_inv * b2)) / (1.0 + z_inv * (a1 + z_inv * a2));
  }
};

struct ButterworthSpec {
  std::size_t order = 5;
  FilterKind kind = FilterKind::Highpass;
  double cutoff_low_hz = 0.5;
  double cutoff_high_hz = 30.0;  // bandpass only
  double sample_rate = 500.0;
  std::vector<SecondOrderSection> sections;

  // Single-pass (not forward-backward) magnitude response at `freq_hz`.
  double gain(double freq_hz) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    const std::complex<double> z_inv = std::polar(1.0, -w);
    std::complex<double> h = 1.0;
    for (const auto& s : sections) h *= s.response(z_inv);
    return std::abs(h);
  }
};

// Smoothing response 1 / (1 + (lambda*sigma)^order) of the cutoff ratio,
// evaluated directly. The designed filter itself is a standard Butterworth.
inline double cutoff_response(double lambda_sigma, int order = 5) {
  if (lambda_sigma < 0.0) fail(ErrorKind::InvalidArgument, "lambda*sigma must be non-negative");
  return 1.0 / (1.0 + std::pow(lambda_sigma, order));
}

namespace detail {

using cplx = std::complex<double>;

// Conjugate pairs become biquads, real poles are paired two at a time, and a
// leftover real pole becomes a first-order section.
inline std::vector<std::vector<cplx>> group_poles(const std::vector<cplx>& poles) {
  constexpr double tol = 1e-12;
  std::vector<std::vector<cplx>> groups;
  std::vector<cplx> reals;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) <= tol * std::max(1.0, std::abs(p)))
      reals.emplace_back(p.real(), 0.0);
    else if (p.imag() > 0.0)
      groups.push_back({p, std::conj(p)});
  }
  std::sort(reals.begin(), reals.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) groups.push_back({reals[i], reals[i + 1]});
  if (reals.size() % 2 == 1) groups.push_back({reals.back()});
  return groups;
}

}  // namespace detail

// Analog Butterworth prototype -> highpass/bandpass transform -> bilinear
// transform with prewarped cutoffs -> cascade of second-order sections.
inline ButterworthSpec butterworth_design(FilterKind kind, double cutoff_low_hz,
                                          double cutoff_high_hz, std::size_t order,
                                          double sample_rate) {
  using detail::cplx;
  const double nyquist = sample_rate / 2.0;
  if (!(sample_rate > 0.0)) fail(ErrorKind::InvalidCutoff, "sample rate must be positive");
  if (order < 1) fail(ErrorKind::InvalidArgument, "filter order must be >= 1");
  if (!(cutoff_low_hz > 0.0 && cutoff_low_hz < nyquist))
    fail(ErrorKind::InvalidCutoff, "low cutoff " + std::to_string(cutoff_low_hz) +
                                       " Hz outside (0, " + std::to_string(nyquist) + ")");
  if (kind == FilterKind::Bandpass &&
      !(cutoff_high_hz > cutoff_low_hz && cutoff_high_hz < nyquist))
    fail(ErrorKind::InvalidCutoff, "high cutoff " + std::to_string(cutoff_high_hz) +
                                       " Hz must lie in (low cutoff, " + std::to_string(nyquist) +
                                       ")");

  ButterworthSpec spec;
  spec.order = order;
  spec.kind = kind;
  spec.cutoff_low_hz = cutoff_low_hz;
  spec.cutoff_high_hz = kind == FilterKind::Bandpass ? cutoff_high_hz : 0.0;
  spec.sample_rate = sample_rate;

  const double fs2 = 2.0 * sample_rate;
  auto prewarp = [&](double f) { return fs2 * std::tan(std::numbers::pi * f / sample_rate); };

  const auto n = static_cast<double>(order);
  std::vector<cplx> proto;
  for (std::size_t k = 0; k < order; ++k)
    proto.push_back(std::polar(1.0, std::numbers::pi * (2.0 * static_cast<double>(k) + n + 1.0) /
                                        (2.0 * n)));

  std::vector<cplx> analog_poles;
  std::vector<double> digital_zeros;
  double ref_freq_hz = 0.0;
  if (kind == FilterKind::Highpass) {
    const double wc = prewarp(cutoff_low_hz);
    for (const auto& p : proto) analog_poles.push_back(wc / p);
    digital_zeros.assign(order, 1.0);  // s = 0
    ref_freq_hz = nyquist;
  } else {
    const double w1 = prewarp(cutoff_low_hz);
    const double w2 = prewarp(cutoff_high_hz);
    const double bw = w2 - w1;
    const double w0 = std::sqrt(w1 * w2);
    for (const auto& p : proto) {
      const cplx half = p * bw / 2.0;
      const cplx root = std::sqrt(half * half - w0 * w0);
      analog_poles.push_back(half + root);
      analog_poles.push_back(half - root);
    }
    for (std::size_t k = 0; k < order; ++k) {
      digital_zeros.push_back(1.0);   // s = 0
      digital_zeros.push_back(-1.0);  // s = infinity
    }
    ref_freq_hz = std::atan(w0 / fs2) * sample_rate / std::numbers::pi;
  }

  std::vector<cplx> digital_poles;
  for (const auto& p : analog_poles) digital_poles.push_back((fs2 + p) / (fs2 - p));

  std::size_t next_zero = 0;
  for (const auto& group : detail::group_poles(digital_poles)) {
    SecondOrderSection s;
    if (group.size() == 2) {
      s.a1 = -(group[0] + group[1]).real();
      s.a2 = (group[0] * group[1]).real();
      const double z0 = digital_zeros[next_zero++];
      const double z1 = digital_zeros[next_zero++];
      s.b0 = 1.0;
      s.b1 = -(z0 + z1);
      s.b2 = z0 * z1;
    } else {
      s.a1 = -group[0].real();
      s.a2 = 0.0;
      s.b0 = 1.0;
      s.b1 = -digital_zeros[next_zero++];
      s.b2 = 0.0;
    }
    spec.sections.push_back(s);
  }

  const double g = spec.gain(ref_freq_hz);
  auto& first = spec.sections.front();
  first.b0 /= g;
  first.b1 /= g;
  first.b2 /= g;
  return spec;
}

inline ButterworthSpec butterworth_design(FilterKind kind, double cutoff_low_hz, std::size_t order,
                                          double sample_rate) {
  return butterworth_design(kind, cutoff_low_hz, 0.0, order, sample_rate);
}

namespace detail {

struct SectionState {
  double z1 = 0.0, z2 = 0.0;
};

// Steady-state section states for a unit step input (scaled by the running
// cascade gain), so a constant input produces no start-up transient.
inline std::vector<SectionState> step_initial_state(const std::vector<SecondOrderSection>& sos) {
  std::vector<SectionState> zi;
  double scale = 1.0;
  for (const auto& s : sos) {
    const double g = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    SectionState st;
    st.z2 = scale * (s.b2 - s.a2 * g);
    st.z1 = scale * (s.b1 - s.a1 * g) + st.z2;
    zi.push_back(st);
    scale *= g;
  }
  return zi;
}

inline void sos_filter_inplace(const std::vector<SecondOrderSection>& sos, std::vector<double>& x,
                               std::vector<SectionState> state) {
  for (double& v : x) {
    double in = v;
    for (std::size_t k = 0; k < sos.size(); ++k) {
      const auto& s = sos[k];
      auto& st = state[k];
      const double y = s.b0 * in + st.z1;
      st.z1 = s.b1 * in - s.a1 * y + st.z2;
      st.z2 = s.b2 * in - s.a2 * y;
      in = y;
    }
    v = in;
  }
}

inline std::vector<SectionState> scaled(std::vector<SectionState> zi, double by) {
  for (auto& s : zi) {
    s.z1 *= by;
    s.z2 *= by;
  }
  return zi;
}

}  // namespace detail

// Zero-phase forward-backward application (effective order doubles). The
// signal is padded by odd reflection and both passes start from step
// steady state.
inline std::vector<double> butterworth_apply(const ButterworthSpec& spec, std::span<const double> x) {
  if (x.empty()) fail(ErrorKind::EmptyInput, "cannot filter an empty signal");
  if (spec.sections.empty()) fail(ErrorKind::InvalidArgument, "filter has no sections");
  const std::size_t n = x.size();
  std::size_t first_order = 0;
  for (const auto& s : spec.sections)
    if (s.a2 == 0.0 && s.b2 == 0.0) ++first_order;
  const std::size_t taps = 2 * spec.sections.size() + 1 - first_order;
  const std::size_t pad = std::min(3 * taps, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = detail::step_initial_state(spec.sections);
  detail::sos_filter_inplace(spec.sections, ext, detail::scaled(zi, ext.front()));
  std::reverse(ext.begin(), ext.end());
  detail::sos_filter_inplace(spec.sections, ext, detail::scaled(zi, ext.front()));
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace gal::dsp
