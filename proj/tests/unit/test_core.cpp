#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include <gtest/gtest.h>

#include "gal/core/csv_io.hpp"
#include "gal/core/labels.hpp"
#include "gal/core/recording.hpp"
#include "gal/core/synth.hpp"

using namespace gal;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Io;
}

std::string events_header() {
  return "id,HandStart,FirstDigitTouch,BothStartLoadPhase,LiftOff,Replace,BothRelease\n";
}

std::filesystem::path temp_dir() {
  auto d = std::filesystem::temp_directory_path() / ("gal_core_" + std::to_string(::getpid()));
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST(DataCsv, SingleChannel) {
  auto rec = parse_data_csv("id,O1\ns1_0,1.5\ns1_1,-2.0\n");
  ASSERT_EQ(rec.channels(), std::vector<std::string>{"O1"});
  ASSERT_EQ(rec.n_samples(), 2u);
  EXPECT_EQ(rec.channel(0)[0], 1.5);
  EXPECT_EQ(rec.channel(0)[1], -2.0);
  EXPECT_EQ(rec.sample_rate(), 500.0);
}

TEST(DataCsv, HeaderWithoutChannels) {
  EXPECT_EQ(kind_of([] { parse_data_csv("id\ns_0\n"); }), ErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of([] { parse_data_csv("time,O1\n0,1\n"); }), ErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of([] { parse_data_csv(""); }), ErrorKind::MalformedHeader);
}

TEST(DataCsv, RaggedRowReportsLine) {
  try {
    parse_data_csv("id,A,B\nx_0,1,2\nx_1,3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RaggedRow);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(DataCsv, NonNumericAndMissingCells) {
  EXPECT_EQ(kind_of([] { parse_data_csv("id,A\nx_0,abc\n"); }), ErrorKind::NonNumericCell);
  EXPECT_EQ(kind_of([] { parse_data_csv("id,A,B\nx_0,,1\n"); }), ErrorKind::NonNumericCell);
}

TEST(DataCsv, CrlfLineEndings) {
  auto rec = parse_data_csv("id,A,B\r\nx_0,1,2\r\nx_1,3,4\r\n");
  ASSERT_EQ(rec.n_samples(), 2u);
  EXPECT_EQ(rec.channel(1)[1], 4.0);
}

// 32 channels of full-precision values: every parsed double must be
// bit-identical to an independent strtod parse of the same text.
TEST(DataCsv, ThirtyTwoChannelsBitExact) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d(0.0, 40.0);
  const std::size_t n = 200;
  std::string text = "id";
  for (int c = 0; c < 32; ++c) text += ",Ch" + std::to_string(c + 1);
  text += "\n";
  std::vector<std::vector<std::string>> cells(n);
  for (std::size_t t = 0; t < n; ++t) {
    text += "subj1_series1_" + std::to_string(t);
    for (int c = 0; c < 32; ++c) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", d(rng));
      cells[t].push_back(buf);
      text += ",";
      text += buf;
    }
    text += "\n";
  }
  auto rec = parse_data_csv(text);
  ASSERT_EQ(rec.n_channels(), 32u);
  ASSERT_EQ(rec.n_samples(), n);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t c = 0; c < 32; ++c) {
      const double expect = std::strtod(cells[t][c].c_str(), nullptr);
      const double got = rec.channel(c)[t];
      EXPECT_EQ(std::memcmp(&expect, &got, sizeof(double)), 0) << cells[t][c];
    }
}

TEST(DataCsv, RoundTripIsExact) {
  SyntheticSpec spec;
  spec.n_channels = 4;
  spec.n_samples = 500;
  spec.seed = 3;
  auto s = synthesize(spec);
  auto back = parse_data_csv(format_data_csv(s.recording));
  EXPECT_EQ(back.samples(), s.recording.samples());
  EXPECT_EQ(back.channels(), s.recording.channels());
  auto labels = parse_events_csv(format_events_csv(s.recording, s.labels), s.recording.n_samples());
  EXPECT_EQ(labels.flags(), s.labels.flags());
}

TEST(DataCsv, LoadFromFileCarriesIdsAndPath) {
  auto dir = temp_dir();
  auto p = dir / "subj3_series7_data.csv";
  csv::write_atomic(p, "id,A\nsubj3_series7_0,1\nsubj3_series7_1,2\n");
  auto rec = load_data_csv(p);
  EXPECT_EQ(rec.subject_id(), "subj3");
  EXPECT_EQ(rec.series_id(), "series7");
  auto bad = dir / "subj3_series8_data.csv";
  csv::write_atomic(bad, "id,A\nx,oops\n");
  try {
    load_data_csv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonNumericCell);
    EXPECT_NE(std::string(e.what()).find("subj3_series8_data.csv"), std::string::npos);
  }
  EXPECT_EQ(kind_of([&] { load_data_csv(dir / "missing_data.csv"); }), ErrorKind::Io);
  std::filesystem::remove_all(dir);
}

TEST(EventsCsv, AllZeros) {
  auto l = parse_events_csv(events_header() + "a,0,0,0,0,0,0\nb,0,0,0,0,0,0\n", 2);
  ASSERT_EQ(l.n_samples(), 2u);
  for (std::size_t e = 0; e < kNumEvents; ++e)
    for (std::size_t t = 0; t < 2; ++t) EXPECT_FALSE(l.active(e, t));
}

TEST(EventsCsv, Errors) {
  EXPECT_EQ(kind_of([] {
              parse_events_csv("id,HandStart,FirstDigitTouch,BothStartLoadPhase,LiftOff,Replace\na,0,0,0,0,0\n", 1);
            }),
            ErrorKind::WrongEventColumns);
  EXPECT_EQ(kind_of([] { parse_events_csv(events_header() + "a,0,0,0,0,0,0\n", 2); }),
            ErrorKind::LengthMismatch);
  EXPECT_EQ(kind_of([] { parse_events_csv(events_header() + "a,0,2,0,0,0,0\n", 1); }),
            ErrorKind::NonBinaryCell);
  EXPECT_EQ(kind_of([] { parse_events_csv(events_header() + "a,0,0.5,0,0,0,0\n", 1); }),
            ErrorKind::NonBinaryCell);
}

TEST(EventsCsv, HandStartSpan) {
  std::string text = events_header();
  for (int t = 0; t < 40; ++t)
    text += "s_" + std::to_string(t) + (t >= 10 && t <= 20 ? ",1" : ",0") + ",0,0,0,0,0\n";
  auto l = parse_events_csv(text, 40);
  for (std::size_t t = 0; t < 40; ++t) {
    EXPECT_EQ(l.active(0, t), t >= 10 && t <= 20) << t;
    for (std::size_t e = 1; e < kNumEvents; ++e) EXPECT_FALSE(l.active(e, t));
  }
}

TEST(Recording, Invariants) {
  EXPECT_EQ(kind_of([] { Recording({"A"}, {{}}, 500.0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { Recording({"A", "B"}, {{1.0}}, 500.0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { Recording({"A", "B"}, {{1.0}, {1.0, 2.0}}, 500.0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { Recording({"A"}, {{1.0}}, 0.0); }), ErrorKind::InvalidArgument);
}

TEST(Synth, ZeroNoiseSingleOccurrence) {
  SyntheticSpec spec;
  spec.n_channels = 3;
  spec.noise_std = 0.0;
  spec.min_gap = spec.max_gap = 40;
  spec.n_samples = 40 + 150 + 10;  // room for the HS burst only
  auto s = synthesize(spec);
  ASSERT_EQ(s.occurrences.size(), 1u);
  EXPECT_EQ(s.occurrences[0].event, 0u);
  EXPECT_EQ(s.occurrences[0].start, 40u);
  const auto& sig = spec.signatures[0];
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < spec.n_samples; ++t) {
      const bool in = t >= 40 && t < 190;
      const double expect = in ? signature_value(sig, t - 40, spec.sample_rate) : 0.0;
      EXPECT_EQ(s.recording.channel(c)[t], expect);
      EXPECT_EQ(s.labels.active(0, t), in);
    }
}

TEST(Synth, LabelsMarkInjectedSpans) {
  SyntheticSpec spec;
  spec.n_channels = 2;
  spec.n_samples = 6000;
  spec.seed = 11;
  auto s = synthesize(spec);
  std::vector<std::vector<std::uint8_t>> expect(kNumEvents, std::vector<std::uint8_t>(spec.n_samples, 0));
  for (const auto& o : s.occurrences)
    for (std::size_t k = 0; k < o.span; ++k) expect[o.event][o.start + k] = 1;
  EXPECT_EQ(s.labels.flags(), expect);
  // every event occurs, in trial order
  for (std::size_t i = 0; i < s.occurrences.size(); ++i) EXPECT_EQ(s.occurrences[i].event, i % kNumEvents);
  EXPECT_GE(s.occurrences.size(), 12u);
}

TEST(Synth, Deterministic) {
  SyntheticSpec spec;
  spec.n_channels = 4;
  spec.n_samples = 3000;
  spec.spike_rate = 2.0;
  spec.spike_amplitude = 30.0;
  spec.dc_offset_std = 5.0;
  spec.seed = 99;
  auto a = synthesize(spec);
  auto b = synthesize(spec);
  EXPECT_EQ(a.recording.samples(), b.recording.samples());
  EXPECT_EQ(a.labels.flags(), b.labels.flags());
  spec.seed = 100;
  auto c = synthesize(spec);
  EXPECT_NE(a.recording.samples(), c.recording.samples());
}

// Noise sd 1, amplitude 5: the residual recording - clean must be the pure
// noise (sd ~ 1), and on event spans the injected power gives a
// predictable per-sample SNR.
TEST(Synth, SnrFromBookkeeping) {
  SyntheticSpec spec;
  spec.n_channels = 8;
  spec.n_samples = 20000;
  spec.seed = 5;
  auto s = synthesize(spec);
  double noise_sq = 0.0, sig_sq = 0.0;
  std::size_t n_noise = 0, n_sig = 0;
  for (std::size_t c = 0; c < spec.n_channels; ++c)
    for (std::size_t t = 0; t < spec.n_samples; ++t) {
      const double r = s.recording.channel(c)[t] - s.clean[t];
      noise_sq += r * r;
      ++n_noise;
    }
  for (const auto& o : s.occurrences)
    for (std::size_t k = 0; k < o.span; ++k) {
      sig_sq += s.clean[o.start + k] * s.clean[o.start + k];
      ++n_sig;
    }
  const double noise_var = noise_sq / static_cast<double>(n_noise);
  EXPECT_NEAR(noise_var, 1.0, 0.03);
  // half-sine envelope times sine carrier: mean power amp^2 / 4
  const double snr = (sig_sq / static_cast<double>(n_sig)) / noise_var;
  EXPECT_NEAR(snr, 25.0 / 4.0, 0.4);
}

TEST(Synth, SpikesAddLargeExcursions) {
  SyntheticSpec spec;
  spec.n_channels = 2;
  spec.n_samples = 5000;
  spec.noise_std = 0.0;
  spec.spike_rate = 5.0;
  spec.spike_amplitude = 40.0;
  auto s = synthesize(spec);
  std::size_t big = 0;
  for (std::size_t t = 0; t < spec.n_samples; ++t)
    if (std::abs(s.recording.channel(0)[t] - s.clean[t]) >= 39.0) ++big;
  // ~ 5/s * 10 s = 50 spikes expected
  EXPECT_GT(big, 25u);
  EXPECT_LT(big, 90u);
}

TEST(Synth, InvalidSpec) {
  SyntheticSpec spec;
  spec.n_channels = 0;
  EXPECT_EQ(kind_of([&] { synthesize(spec); }), ErrorKind::InvalidArgument);
}

TEST(LabelWindows, Basics) {
  auto l = EventLabels::zeros(200);
  std::vector<std::size_t> ends = {0, 50, 199};
  for (const auto& v : label_windows(l, ends, 10))
    for (auto x : v) EXPECT_EQ(x, 0);

  auto flags = l.flags();
  flags[2][100] = 1;
  EventLabels one(flags);
  std::vector<std::size_t> at = {100};
  EXPECT_EQ(label_windows(one, at, 0)[0][2], 1);
  std::vector<std::size_t> e90 = {90};
  EXPECT_EQ(label_windows(one, e90, 15)[0][2], 1);
  EXPECT_EQ(label_windows(one, e90, 5)[0][2], 0);
  EXPECT_EQ(label_windows(one, e90, 10)[0][2], 1);  // boundary inclusive
  EXPECT_EQ(label_windows(one, e90, 9)[0][2], 0);
  std::vector<std::size_t> oob = {200};
  EXPECT_EQ(kind_of([&] { label_windows(one, oob, 0); }), ErrorKind::IndexOutOfRange);
}

TEST(LabelWindows, MatchesBruteForceAndIsLocal) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 300;
    std::vector<std::vector<std::uint8_t>> flags(kNumEvents, std::vector<std::uint8_t>(n));
    for (auto& row : flags)
      for (auto& v : row) v = (rng() % 17 == 0) ? 1 : 0;
    EventLabels l(flags);
    const std::size_t tol = rng() % 30;
    std::vector<std::size_t> ends;
    for (std::size_t e = 0; e < n; e += 7) ends.push_back(e);
    auto got = label_windows(l, ends, tol);
    for (std::size_t i = 0; i < ends.size(); ++i) {
      const long lo = static_cast<long>(ends[i]) - static_cast<long>(tol);
      const long hi = static_cast<long>(ends[i]) + static_cast<long>(tol);
      for (std::size_t e = 0; e < kNumEvents; ++e) {
        std::uint8_t any = 0;
        for (long t = std::max(0L, lo); t <= std::min<long>(n - 1, hi); ++t) any |= flags[e][t];
        ASSERT_EQ(got[i][e], any);
      }
      // flipping labels outside the band leaves the target unchanged
      auto perturbed = flags;
      for (std::size_t e = 0; e < kNumEvents; ++e)
        for (long t = 0; t < static_cast<long>(n); ++t)
          if (t < lo || t > hi) perturbed[e][t] ^= 1;
      std::vector<std::size_t> one = {ends[i]};
      EXPECT_EQ(label_windows(EventLabels(perturbed), one, tol)[0], got[i]);
    }
  }
}

TEST(LabelWindows, ToleranceFromSeconds) {
  EXPECT_EQ(tolerance_samples(0.150, 500.0), 75u);
  EXPECT_EQ(tolerance_samples(0.030, 500.0), 15u);
  EXPECT_EQ(kDefaultLabelTolerance, 75u);
}

TEST(Events, TableOrder) {
  EXPECT_EQ(kEventNames[0], "HandStart");
  EXPECT_EQ(kEventAbbrev[0], "HS");
  EXPECT_EQ(kEventAbbrev[5], "BR");
  EXPECT_EQ(kEventNames[3], "LiftOff");
}
