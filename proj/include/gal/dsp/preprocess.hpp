#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gal/core/recording.hpp"
#include "gal/dsp/butterworth.hpp"
#include "gal/dsp/wavelet.hpp"
#include "gal/error.hpp"

namespace gal::dsp {

enum class DenoiseMethod { None, Dwt, Butterworth };

inline std::string_view to_string(DenoiseMethod m) {
  switch (m) {
    case DenoiseMethod::None: return "none";
    case DenoiseMethod::Dwt: return "dwt";
    case DenoiseMethod::Butterworth: return "butterworth";
  }
  return "none";
}

inline DenoiseMethod parse_denoise_method(std::string_view s) {
  if (s == "none") return DenoiseMethod::None;
  if (s == "dwt") return DenoiseMethod::Dwt;
  if (s == "butterworth") return DenoiseMethod::Butterworth;
  fail(ErrorKind::InvalidArgument,
       "unknown preprocessing method '" + std::string(s) + "' (none, dwt, butterworth)");
}

struct DenoiseSpec {
  DenoiseMethod method = DenoiseMethod::Dwt;
  WaveletName wavelet = WaveletName::db2;
  std::size_t levels = 4;
  Threshold threshold = Threshold::universal();
  FilterKind filter_kind = FilterKind::Highpass;
  double cutoff_low_hz = 0.5;
  double cutoff_high_hz = 30.0;
  std::size_t filter_order = 5;
};

// Applies the configured denoiser channel by channel.
inline Recording denoise(const Recording& rec, const DenoiseSpec& spec) {
  if (spec.method == DenoiseMethod::None) return rec;
  std::vector<std::vector<double>> out;
  out.reserve(rec.n_channels());

  WaveletSpec wavelet;
  ButterworthSpec filter;
  if (spec.method == DenoiseMethod::Dwt)
    wavelet = WaveletSpec::make(spec.wavelet);
  else
    filter = butterworth_design(spec.filter_kind, spec.cutoff_low_hz, spec.cutoff_high_hz,
                                spec.filter_order, rec.sample_rate());

  for (std::size_t c = 0; c < rec.n_channels(); ++c) {
    try {
      if (spec.method == DenoiseMethod::Dwt)
        out.push_back(wavelet_denoise(rec.channel(c), wavelet, spec.levels, spec.threshold));
      else
        out.push_back(butterworth_apply(filter, rec.channel(c)));
    } catch (const Error& e) {
      throw Error(e.kind(), "channel '" + rec.channels()[c] + "': " + e.message());
    }
  }
  return rec.with_samples(std::move(out));
}

}  // namespace gal::dsp
