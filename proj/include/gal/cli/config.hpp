#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gal/core/csv_io.hpp"
#include "gal/core/synth.hpp"
#include "gal/dsp/preprocess.hpp"
#include "gal/error.hpp"
#include "gal/nn/model.hpp"
#include "gal/windowing.hpp"

namespace gal::cli {

enum class DataSource { Synthetic, Files };

struct SynthConfig {
  std::size_t subjects = 1;
  std::size_t series = 4;  // per subject
  SyntheticSpec spec;      // seed, subject_id and series_id are filled per series
};

struct ExperimentConfig {
  DataSource source = DataSource::Synthetic;
  std::filesystem::path data_dir;
  double sample_rate = kDefaultSampleRate;
  SynthConfig synth;

  dsp::DenoiseSpec preprocess;
  bool standardize = true;

  WindowSpec window;
  std::size_t eval_stride = 32;

  nn::ModelConfig model;  // input shape is taken from the data and window
  HoldoutRule split;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
};

namespace detail {

inline std::string fmt(double v) { return csv::format_double(v); }
inline std::string fmt(std::size_t v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }

inline double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  if (!csv::parse_double(v, out) || !std::isfinite(out))
    fail(ErrorKind::Config, "'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

inline std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    fail(ErrorKind::Config,
         "'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

inline std::size_t to_size(std::string_view key, std::string_view v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

inline bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::Config, "'" + std::string(key) + "' expects true/false, got '" + std::string(v) + "'");
}

template <typename Fn>
auto enum_value(std::string_view key, Fn&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, "'" + std::string(key) + "': " + e.message());
  }
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(csv::trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// "16:3:2:1,32:3:2:1" -> channels:kernel:stride:padding per block
inline std::vector<nn::ConvBlockConfig> parse_blocks(std::string_view key, std::string_view v) {
  std::vector<nn::ConvBlockConfig> out;
  if (v.empty() || v == "none") return out;
  for (auto item : split(v, ',')) {
    auto f = split(item, ':');
    if (f.size() != 4)
      fail(ErrorKind::Config, "'" + std::string(key) +
                                  "' blocks are channels:kernel:stride:padding, got '" +
                                  std::string(item) + "'");
    out.push_back({to_size(key, f[0]), to_size(key, f[1]), to_size(key, f[2]), to_size(key, f[3])});
  }
  return out;
}

inline std::string format_blocks(const std::vector<nn::ConvBlockConfig>& blocks) {
  if (blocks.empty()) return "none";
  std::string out;
  for (const auto& b : blocks) {
    if (!out.empty()) out += ',';
    out += std::to_string(b.channels) + ":" + std::to_string(b.kernel) + ":" +
           std::to_string(b.stride) + ":" + std::to_string(b.padding);
  }
  return out;
}

inline std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  if (v.empty() || v == "none") return out;
  for (auto item : split(v, ',')) out.push_back(to_size(key, item));
  return out;
}

inline std::string format_sizes(const std::vector<std::size_t>& v) {
  if (v.empty()) return "none";
  std::string out;
  for (auto x : v) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  }
  return out;
}

}  // namespace detail

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

// Every accepted key, in the order the resolved config is written.
inline const std::vector<ConfigKey>& config_keys() {
  using C = ExperimentConfig;
  using namespace detail;
  static const std::vector<ConfigKey> keys = {
      {"seed", "experiment seed; every random stream derives from it",
       [](const C& c) { return std::to_string(c.seed); },
       [](C& c, std::string_view v) { c.seed = to_u64("seed", v); }},
      {"data.source", "synthetic | files",
       [](const C& c) { return std::string(c.source == DataSource::Synthetic ? "synthetic" : "files"); },
       [](C& c, std::string_view v) {
         if (v == "synthetic") c.source = DataSource::Synthetic;
         else if (v == "files") c.source = DataSource::Files;
         else fail(ErrorKind::Config, "'data.source' must be synthetic or files, got '" + std::string(v) + "'");
       }},
      {"data.dir", "directory of <subject>_<series>_data.csv / _events.csv pairs",
       [](const C& c) { return c.data_dir.string(); },
       [](C& c, std::string_view v) { c.data_dir = std::string(v); }},
      {"data.sample_rate", "Hz, applied to loaded files",
       [](const C& c) { return fmt(c.sample_rate); },
       [](C& c, std::string_view v) { c.sample_rate = to_double("data.sample_rate", v); }},

      {"synth.subjects", "synthetic subjects",
       [](const C& c) { return fmt(c.synth.subjects); },
       [](C& c, std::string_view v) { c.synth.subjects = to_size("synth.subjects", v); }},
      {"synth.series", "synthetic series per subject",
       [](const C& c) { return fmt(c.synth.series); },
       [](C& c, std::string_view v) { c.synth.series = to_size("synth.series", v); }},
      {"synth.channels", "", [](const C& c) { return fmt(c.synth.spec.n_channels); },
       [](C& c, std::string_view v) { c.synth.spec.n_channels = to_size("synth.channels", v); }},
      {"synth.samples", "samples per series", [](const C& c) { return fmt(c.synth.spec.n_samples); },
       [](C& c, std::string_view v) { c.synth.spec.n_samples = to_size("synth.samples", v); }},
      {"synth.sample_rate", "Hz", [](const C& c) { return fmt(c.synth.spec.sample_rate); },
       [](C& c, std::string_view v) { c.synth.spec.sample_rate = to_double("synth.sample_rate", v); }},
      {"synth.amplitude", "burst amplitude, all events",
       [](const C& c) { return fmt(c.synth.spec.signatures[0].amplitude); },
       [](C& c, std::string_view v) {
         const double a = to_double("synth.amplitude", v);
         for (auto& s : c.synth.spec.signatures) s.amplitude = a;
       }},
      {"synth.span", "burst length in samples, all events",
       [](const C& c) { return fmt(c.synth.spec.signatures[0].span); },
       [](C& c, std::string_view v) {
         const std::size_t n = to_size("synth.span", v);
         for (auto& s : c.synth.spec.signatures) s.span = n;
       }},
      {"synth.frequencies", "six burst frequencies in Hz, comma separated",
       [](const C& c) {
         std::string out;
         for (const auto& s : c.synth.spec.signatures) out += (out.empty() ? "" : ",") + fmt(s.frequency_hz);
         return out;
       },
       [](C& c, std::string_view v) {
         auto parts = split(v, ',');
         if (parts.size() != kNumEvents)
           fail(ErrorKind::Config, "'synth.frequencies' needs six values");
         for (std::size_t e = 0; e < kNumEvents; ++e)
           c.synth.spec.signatures[e].frequency_hz = to_double("synth.frequencies", parts[e]);
       }},
      {"synth.noise_std", "white noise sd", [](const C& c) { return fmt(c.synth.spec.noise_std); },
       [](C& c, std::string_view v) { c.synth.spec.noise_std = to_double("synth.noise_std", v); }},
      {"synth.spike_rate", "spikes per second per channel",
       [](const C& c) { return fmt(c.synth.spec.spike_rate); },
       [](C& c, std::string_view v) { c.synth.spec.spike_rate = to_double("synth.spike_rate", v); }},
      {"synth.spike_amplitude", "", [](const C& c) { return fmt(c.synth.spec.spike_amplitude); },
       [](C& c, std::string_view v) { c.synth.spec.spike_amplitude = to_double("synth.spike_amplitude", v); }},
      {"synth.dc_offset_std", "per-channel constant offset sd",
       [](const C& c) { return fmt(c.synth.spec.dc_offset_std); },
       [](C& c, std::string_view v) { c.synth.spec.dc_offset_std = to_double("synth.dc_offset_std", v); }},
      {"synth.min_gap", "", [](const C& c) { return fmt(c.synth.spec.min_gap); },
       [](C& c, std::string_view v) { c.synth.spec.min_gap = to_size("synth.min_gap", v); }},
      {"synth.max_gap", "", [](const C& c) { return fmt(c.synth.spec.max_gap); },
       [](C& c, std::string_view v) { c.synth.spec.max_gap = to_size("synth.max_gap", v); }},
      {"synth.rest_gap", "samples between trials", [](const C& c) { return fmt(c.synth.spec.rest_gap); },
       [](C& c, std::string_view v) { c.synth.spec.rest_gap = to_size("synth.rest_gap", v); }},

      {"preprocess.method", "none | dwt | butterworth",
       [](const C& c) { return std::string(dsp::to_string(c.preprocess.method)); },
       [](C& c, std::string_view v) {
         c.preprocess.method = enum_value("preprocess.method", [&] { return dsp::parse_denoise_method(v); });
       }},
      {"preprocess.wavelet", "db1 | db2",
       [](const C& c) { return std::string(dsp::to_string(c.preprocess.wavelet)); },
       [](C& c, std::string_view v) {
         c.preprocess.wavelet = enum_value("preprocess.wavelet", [&] { return dsp::parse_wavelet(v); });
       }},
      {"preprocess.levels", "DWT levels", [](const C& c) { return fmt(c.preprocess.levels); },
       [](C& c, std::string_view v) { c.preprocess.levels = to_size("preprocess.levels", v); }},
      {"preprocess.threshold", "universal | <number>",
       [](const C& c) {
         return c.preprocess.threshold.kind == dsp::Threshold::Kind::Universal ? std::string("universal")
                                                                         : fmt(c.preprocess.threshold.value);
       },
       [](C& c, std::string_view v) {
         if (v == "universal") c.preprocess.threshold = dsp::Threshold::universal();
         else c.preprocess.threshold = dsp::Threshold::fixed(to_double("preprocess.threshold", v));
       }},
      {"preprocess.butter_kind", "highpass | bandpass",
       [](const C& c) { return std::string(dsp::to_string(c.preprocess.filter_kind)); },
       [](C& c, std::string_view v) {
         c.preprocess.filter_kind = enum_value("preprocess.butter_kind", [&] { return dsp::parse_filter_kind(v); });
       }},
      {"preprocess.butter_low_hz", "", [](const C& c) { return fmt(c.preprocess.cutoff_low_hz); },
       [](C& c, std::string_view v) { c.preprocess.cutoff_low_hz = to_double("preprocess.butter_low_hz", v); }},
      {"preprocess.butter_high_hz", "bandpass only", [](const C& c) { return fmt(c.preprocess.cutoff_high_hz); },
       [](C& c, std::string_view v) { c.preprocess.cutoff_high_hz = to_double("preprocess.butter_high_hz", v); }},
      {"preprocess.butter_order", "", [](const C& c) { return fmt(c.preprocess.filter_order); },
       [](C& c, std::string_view v) { c.preprocess.filter_order = to_size("preprocess.butter_order", v); }},
      {"preprocess.standardize", "fit per-channel mean/std on the training split",
       [](const C& c) { return fmt(c.standardize); },
       [](C& c, std::string_view v) { c.standardize = to_bool("preprocess.standardize", v); }},

      {"window.length", "samples per window", [](const C& c) { return fmt(c.window.length); },
       [](C& c, std::string_view v) { c.window.length = to_size("window.length", v); }},
      {"window.stride", "training window stride", [](const C& c) { return fmt(c.window.stride); },
       [](C& c, std::string_view v) { c.window.stride = to_size("window.stride", v); }},
      {"window.eval_stride", "validation / evaluation window stride",
       [](const C& c) { return fmt(c.eval_stride); },
       [](C& c, std::string_view v) { c.eval_stride = to_size("window.eval_stride", v); }},
      {"window.label_tolerance", "samples either side of the window end",
       [](const C& c) { return fmt(c.window.label_tolerance); },
       [](C& c, std::string_view v) { c.window.label_tolerance = to_size("window.label_tolerance", v); }},

      {"model.architecture", "cnn | lstm",
       [](const C& c) { return std::string(nn::to_string(c.model.architecture)); },
       [](C& c, std::string_view v) {
         c.model.architecture = enum_value("model.architecture", [&] { return nn::parse_architecture(v); });
       }},
      {"model.conv_blocks", "channels:kernel:stride:padding, comma separated",
       [](const C& c) { return format_blocks(c.model.conv_blocks); },
       [](C& c, std::string_view v) { c.model.conv_blocks = parse_blocks("model.conv_blocks", v); }},
      {"model.fc_hidden", "hidden dense widths, comma separated",
       [](const C& c) { return format_sizes(c.model.fc_hidden); },
       [](C& c, std::string_view v) { c.model.fc_hidden = parse_sizes("model.fc_hidden", v); }},
      {"model.lstm_hidden", "", [](const C& c) { return fmt(c.model.lstm_hidden); },
       [](C& c, std::string_view v) { c.model.lstm_hidden = to_size("model.lstm_hidden", v); }},
      {"model.lstm_layers", "", [](const C& c) { return fmt(c.model.lstm_layers); },
       [](C& c, std::string_view v) { c.model.lstm_layers = to_size("model.lstm_layers", v); }},
      {"model.dropout", "between LSTM stages", [](const C& c) { return fmt(c.model.dropout); },
       [](C& c, std::string_view v) { c.model.dropout = to_double("model.dropout", v); }},
      {"model.bn_epsilon", "", [](const C& c) { return fmt(c.model.bn_epsilon); },
       [](C& c, std::string_view v) { c.model.bn_epsilon = to_double("model.bn_epsilon", v); }},
      {"model.bn_momentum", "", [](const C& c) { return fmt(c.model.bn_momentum); },
       [](C& c, std::string_view v) { c.model.bn_momentum = to_double("model.bn_momentum", v); }},

      {"train.optimizer", "adam | sgd",
       [](const C& c) { return std::string(nn::to_string(c.model.optimizer)); },
       [](C& c, std::string_view v) {
         c.model.optimizer = enum_value("train.optimizer", [&] { return nn::parse_optimizer(v); });
       }},
      {"train.learning_rate", "", [](const C& c) { return fmt(c.model.learning_rate); },
       [](C& c, std::string_view v) { c.model.learning_rate = to_double("train.learning_rate", v); }},
      {"train.lr_decay", "learning rate multiplier per epoch", [](const C& c) { return fmt(c.model.lr_decay); },
       [](C& c, std::string_view v) { c.model.lr_decay = to_double("train.lr_decay", v); }},
      {"train.momentum", "sgd only", [](const C& c) { return fmt(c.model.momentum); },
       [](C& c, std::string_view v) { c.model.momentum = to_double("train.momentum", v); }},
      {"train.adam_beta1", "", [](const C& c) { return fmt(c.model.adam_beta1); },
       [](C& c, std::string_view v) { c.model.adam_beta1 = to_double("train.adam_beta1", v); }},
      {"train.adam_beta2", "", [](const C& c) { return fmt(c.model.adam_beta2); },
       [](C& c, std::string_view v) { c.model.adam_beta2 = to_double("train.adam_beta2", v); }},
      {"train.adam_epsilon", "", [](const C& c) { return fmt(c.model.adam_epsilon); },
       [](C& c, std::string_view v) { c.model.adam_epsilon = to_double("train.adam_epsilon", v); }},
      {"train.batch_size", "", [](const C& c) { return fmt(c.model.batch_size); },
       [](C& c, std::string_view v) { c.model.batch_size = to_size("train.batch_size", v); }},
      {"train.epochs", "", [](const C& c) { return fmt(c.model.epochs); },
       [](C& c, std::string_view v) { c.model.epochs = to_size("train.epochs", v); }},
      {"train.grad_clip", "global gradient-norm clip, 0 = off", [](const C& c) { return fmt(c.model.grad_clip); },
       [](C& c, std::string_view v) { c.model.grad_clip = to_double("train.grad_clip", v); }},

      {"split.holdout", "series per subject held out for validation / evaluation",
       [](const C& c) { return fmt(c.split.holdout_per_subject); },
       [](C& c, std::string_view v) { c.split.holdout_per_subject = to_size("split.holdout", v); }},
      {"output.dir", "", [](const C& c) { return c.output_dir.string(); },
       [](C& c, std::string_view v) { c.output_dir = std::string(v); }},
  };
  return keys;
}

inline void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& k : config_keys())
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  fail(ErrorKind::Config, "unknown key '" + std::string(key) + "'");
}

inline void validate(const ExperimentConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::Config, msg);
  };
  if (c.source == DataSource::Files) check(!c.data_dir.empty(), "data.source = files needs data.dir");
  check(c.sample_rate > 0.0, "data.sample_rate must be positive");
  check(c.synth.subjects >= 1 && c.synth.series >= 1, "synth.subjects and synth.series must be >= 1");
  check(c.window.length >= 1 && c.window.stride >= 1 && c.eval_stride >= 1,
        "window length and strides must be >= 1");
  check(c.preprocess.levels >= 1, "preprocess.levels must be >= 1");
  check(c.preprocess.filter_order >= 1, "preprocess.butter_order must be >= 1");
  try {
    c.synth.spec.validate();
    auto m = c.model;
    m.input_channels = 1;
    m.input_length = c.window.length;
    m.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.message());
  }
}

// Lines are `key = value`; '#' starts a comment; blank lines are ignored.
inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> seen;
  auto lines = csv::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = csv::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Config, where + ": expected 'key = value'");
    std::string key(csv::trim(line.substr(0, eq)));
    auto value = csv::trim(line.substr(eq + 1));
    if (auto [it, fresh] = seen.emplace(key, i + 1); !fresh)
      fail(ErrorKind::Config, where + ": '" + key + "' already set on line " + std::to_string(it->second));
    with_context(where, [&] { set_config_value(cfg, key, value); });
  }
  validate(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.message());
  }
  return with_context(path.string(), [&] { return parse_config(text); });
}

// Every key with its effective value; parsing this text yields the same config.
inline std::string resolved_config(const ExperimentConfig& cfg) {
  std::string out = "# resolved configuration (all defaults materialized)\n";
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

}  // namespace gal::cli
