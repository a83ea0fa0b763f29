#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "gal/core/recording.hpp"
#include "gal/error.hpp"
#include "gal/random.hpp"

namespace gal {

// Half-sine envelope over `span` samples carrying a sinusoid at `frequency_hz`.
struct EventSignature {
  double frequency_hz = 10.0;
  double amplitude = 1.0;
  std::size_t span = 150;
};

inline std::array<EventSignature, kNumEvents> default_signatures() {
  return {{{4.0, 5.0, 150},
           {7.0, 5.0, 150},
           {10.0, 5.0, 150},
           {13.0, 5.0, 150},
           {16.0, 5.0, 150},
           {19.0, 5.0, 150}}};
}

struct SyntheticSpec {
  std::size_t n_channels = 32;
  std::size_t n_samples = 10000;
  double sample_rate = kDefaultSampleRate;
  std::array<EventSignature, kNumEvents> signatures = default_signatures();
  double noise_std = 1.0;
  // Expected spike artifacts per second and channel; each spike is a
  // three-sample [0.5, 1, 0.5] bump of random sign.
  double spike_rate = 0.0;
  double spike_amplitude = 0.0;
  // Per-channel constant offset drawn from N(0, dc_offset_std).
  double dc_offset_std = 0.0;
  // Samples between the end of one event and the start of the next in a trial,
  // drawn uniformly from [min_gap, max_gap]; trials are separated by rest_gap.
  std::size_t min_gap = 20;
  std::size_t max_gap = 80;
  std::size_t rest_gap = 300;
  std::uint64_t seed = 0;
  std::string subject_id = "synth";
  std::string series_id = "series1";

  void validate() const {
    if (n_channels == 0 || n_samples == 0)
      fail(ErrorKind::InvalidArgument, "synthetic spec needs positive channel and sample counts");
    if (!(sample_rate > 0.0)) fail(ErrorKind::InvalidArgument, "sample rate must be positive");
    if (noise_std < 0.0 || spike_rate < 0.0 || dc_offset_std < 0.0)
      fail(ErrorKind::InvalidArgument, "noise parameters must be non-negative");
    if (min_gap > max_gap) fail(ErrorKind::InvalidArgument, "min_gap exceeds max_gap");
    for (const auto& s : signatures)
      if (s.span == 0 || !(s.frequency_hz > 0.0))
        fail(ErrorKind::InvalidArgument, "event signatures need positive span and frequency");
  }
};

struct EventOccurrence {
  std::size_t event = 0;
  std::size_t start = 0;  // first labeled sample
  std::size_t span = 0;
};

struct SyntheticSeries {
  Recording recording;
  EventLabels labels;
  std::vector<EventOccurrence> occurrences;
  // Injected event waveform alone (identical on every channel).
  std::vector<double> clean;
};

inline double signature_value(const EventSignature& sig, std::size_t k, double sample_rate) {
  const double envelope = std::sin(std::numbers::pi * (static_cast<double>(k) + 0.5) /
                                   static_cast<double>(sig.span));
  const double carrier =
      std::sin(2.0 * std::numbers::pi * sig.frequency_hz * static_cast<double>(k) / sample_rate);
  return sig.amplitude * envelope * carrier;
}

inline SyntheticSeries synthesize(const SyntheticSpec& spec) {
  spec.validate();
  Rng layout_rng = substream(spec.seed, "synth.layout");
  Rng noise_rng = substream(spec.seed, "synth.noise");
  Rng spike_rng = substream(spec.seed, "synth.spikes");
  Rng offset_rng = substream(spec.seed, "synth.offset");

  const std::size_t n = spec.n_samples;
  SyntheticSeries out;
  out.clean.assign(n, 0.0);
  std::vector<std::vector<std::uint8_t>> flags(kNumEvents, std::vector<std::uint8_t>(n, 0));

  auto draw_gap = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(layout_rng);
  };

  // Trials of the six events in GAL order, back to back until the series ends.
  std::size_t cursor = draw_gap(spec.min_gap, spec.max_gap);
  bool done = false;
  while (!done) {
    for (std::size_t e = 0; e < kNumEvents; ++e) {
      const auto& sig = spec.signatures[e];
      if (cursor + sig.span > n) {
        done = true;
        break;
      }
      for (std::size_t k = 0; k < sig.span; ++k) {
        out.clean[cursor + k] += signature_value(sig, k, spec.sample_rate);
        flags[e][cursor + k] = 1;
      }
      out.occurrences.push_back({e, cursor, sig.span});
      cursor += sig.span + draw_gap(spec.min_gap, spec.max_gap);
    }
    cursor += spec.rest_gap;
    if (cursor >= n) done = true;
  }

  std::vector<std::vector<double>> samples(spec.n_channels, out.clean);
  const double spike_p = spec.spike_rate / spec.sample_rate;
  std::bernoulli_distribution spike_draw(std::min(1.0, spike_p));
  for (auto& row : samples) {
    const double offset = spec.dc_offset_std > 0.0 ? normal(offset_rng, 0.0, spec.dc_offset_std) : 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      row[t] += offset;
      if (spec.noise_std > 0.0) row[t] += normal(noise_rng, 0.0, spec.noise_std);
    }
    if (spike_p > 0.0 && spec.spike_amplitude != 0.0) {
      for (std::size_t t = 0; t < n; ++t) {
        if (!spike_draw(spike_rng)) continue;
        const double a = (spike_rng() & 1u) ? spec.spike_amplitude : -spec.spike_amplitude;
        row[t] += a;
        if (t > 0) row[t - 1] += 0.5 * a;
        if (t + 1 < n) row[t + 1] += 0.5 * a;
      }
    }
  }

  std::vector<std::string> names;
  names.reserve(spec.n_channels);
  for (std::size_t c = 0; c < spec.n_channels; ++c) names.push_back("Ch" + std::to_string(c + 1));

  out.recording = Recording(std::move(names), std::move(samples), spec.sample_rate,
                            spec.subject_id, spec.series_id);
  out.labels = EventLabels(std::move(flags));
  return out;
}

}  // namespace gal
