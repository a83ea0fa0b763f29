#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gal/cli/config.hpp"
#include "gal/core/csv_io.hpp"
#include "gal/core/labels.hpp"
#include "gal/core/synth.hpp"
#include "gal/dsp/preprocess.hpp"
#include "gal/dsp/standardize.hpp"
#include "gal/error.hpp"
#include "gal/eval/report.hpp"
#include "gal/nn/checkpoint.hpp"
#include "gal/nn/train.hpp"
#include "gal/windowing.hpp"

namespace gal::cli {

namespace fs = std::filesystem;

struct Series {
  std::shared_ptr<const Recording> recording;
  EventLabels labels;
};

using Dataset = std::map<SeriesKey, Series>;

// Series s of subject j gets its own generator seed, so adding series never
// changes the existing ones.
inline Dataset synthesize_dataset(const ExperimentConfig& cfg) {
  Dataset out;
  for (std::size_t j = 1; j <= cfg.synth.subjects; ++j) {
    for (std::size_t s = 1; s <= cfg.synth.series; ++s) {
      SyntheticSpec spec = cfg.synth.spec;
      spec.seed = substream(cfg.seed, "synth", (j << 20) | s)();
      spec.subject_id = "subj" + std::to_string(j);
      spec.series_id = "series" + std::to_string(s);
      auto series = synthesize(spec);
      out.emplace(SeriesKey{spec.subject_id, spec.series_id},
                  Series{std::make_shared<const Recording>(std::move(series.recording)),
                         std::move(series.labels)});
    }
  }
  return out;
}

// Every <subject>_<series>_data.csv in `dir` with its matching _events.csv.
inline Dataset load_dataset(const fs::path& dir, double sample_rate) {
  if (!fs::is_directory(dir)) fail(ErrorKind::Io, "data directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with("_data.csv")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::Io, "no *_data.csv files in '" + dir.string() + "'");
  Dataset out;
  for (const auto& data_path : files) {
    auto events_path = data_path;
    auto name = data_path.filename().string();
    events_path.replace_filename(name.substr(0, name.size() - 9) + "_events.csv");
    if (!fs::exists(events_path))
      fail(ErrorKind::Io, "missing events file '" + events_path.string() + "'");
    auto rec = std::make_shared<const Recording>(load_data_csv(data_path, sample_rate));
    auto labels = load_events_csv(events_path, *rec);
    out.emplace(SeriesKey{rec->subject_id(), rec->series_id()}, Series{rec, std::move(labels)});
  }
  return out;
}

inline Dataset acquire(const ExperimentConfig& cfg) {
  return with_context("stage data", [&] {
    return cfg.source == DataSource::Synthetic ? synthesize_dataset(cfg)
                                               : load_dataset(cfg.data_dir, cfg.sample_rate);
  });
}

inline Dataset denoise_all(const Dataset& in, const dsp::DenoiseSpec& spec) {
  return with_context("stage preprocess", [&] {
    Dataset out;
    for (const auto& [key, s] : in) {
      auto rec = with_context(key.subject + "/" + key.series, [&] {
        return std::make_shared<const Recording>(dsp::denoise(*s.recording, spec));
      });
      out.emplace(key, Series{rec, s.labels});
    }
    return out;
  });
}

struct Prepared {
  Dataset train;
  Dataset test;
  std::optional<dsp::StandardizationStats> stats;
  std::size_t channels = 0;
};

// data -> denoise -> split -> standardize. Statistics are fitted on the
// training split unless `fixed_stats` (from a checkpoint) is given.
inline Prepared prepare(const ExperimentConfig& cfg,
                        const std::optional<dsp::StandardizationStats>& fixed_stats = std::nullopt) {
  Dataset all = denoise_all(acquire(cfg), cfg.preprocess);
  Prepared p;
  auto split = with_context("stage split", [&] { return split_by_series(all, cfg.split); });
  p.train = std::move(split.train);
  p.test = std::move(split.test);
  if (p.test.empty()) fail(ErrorKind::InsufficientSeries, "stage split: no held-out series (split.holdout = 0)");
  p.channels = all.begin()->second.recording->n_channels();
  for (const auto& [key, s] : all)
    if (s.recording->channels() != all.begin()->second.recording->channels())
      fail(ErrorKind::ChannelMismatch, "stage data: series " + key.subject + "/" + key.series +
                                           " has a different channel list");
  if (!cfg.standardize) return p;
  with_context("stage standardize", [&] {
    if (fixed_stats) {
      // stored statistics only come from a checkpoint
      if (fixed_stats->channels != all.begin()->second.recording->channels())
        fail(ErrorKind::CheckpointMismatch,
             "checkpoint standardizer covers " + std::to_string(fixed_stats->channels.size()) +
                 " channels that differ from the data's " + std::to_string(p.channels));
      p.stats = fixed_stats;
    } else {
      std::vector<Recording> recs;
      for (const auto& [_, s] : p.train) recs.push_back(*s.recording);
      p.stats = dsp::fit_standardizer(recs);
    }
    for (auto* part : {&p.train, &p.test})
      for (auto& [_, s] : *part)
        s.recording = std::make_shared<const Recording>(dsp::standardize(*s.recording, *p.stats));
  });
  return p;
}

inline WindowBatch windows(const Dataset& data, WindowSpec spec, std::size_t stride) {
  return with_context("stage windowing", [&] {
    spec.stride = stride;
    WindowBatch out;
    bool first = true;
    for (const auto& [key, s] : data) {
      auto b = with_context(key.subject + "/" + key.series,
                            [&] { return make_windows(s.recording, s.labels, spec); });
      if (first) {
        out = std::move(b);
        first = false;
      } else {
        out.append(b);
      }
    }
    return out;
  });
}

inline nn::ModelConfig model_config_for(const ExperimentConfig& cfg, std::size_t channels) {
  nn::ModelConfig m = cfg.model;
  m.input_channels = channels;
  m.input_length = cfg.window.length;
  m.seed = cfg.seed;
  return m;
}

struct TrainRun {
  nn::TrainResult result;
  Prepared data;
  WindowBatch train_windows;
  WindowBatch val_windows;
  nn::ModelConfig model;
};

// Held-out series serve as the validation set during training.
inline TrainRun run_train(const ExperimentConfig& cfg, const nn::TrainOptions& opts = {}) {
  TrainRun run;
  run.data = prepare(cfg);
  run.train_windows = windows(run.data.train, cfg.window, cfg.window.stride);
  run.val_windows = windows(run.data.test, cfg.window, cfg.eval_stride);
  run.model = model_config_for(cfg, run.data.channels);
  run.result = with_context("stage train", [&] {
    return nn::train(run.model, run.train_windows, run.val_windows, opts);
  });
  return run;
}

inline eval::EvalReport run_eval(const ExperimentConfig& cfg, nn::Checkpoint& ck) {
  const auto& mc = ck.model->config();
  if (mc.input_length != cfg.window.length)
    fail(ErrorKind::CheckpointMismatch, "checkpoint window length " + std::to_string(mc.input_length) +
                                            " differs from config window.length " +
                                            std::to_string(cfg.window.length));
  if (cfg.standardize != ck.standardizer.has_value())
    fail(ErrorKind::CheckpointMismatch, cfg.standardize
                                            ? "config standardizes but checkpoint has no statistics"
                                            : "checkpoint carries statistics but config disables standardization");
  Prepared data = prepare(cfg, ck.standardizer);
  if (data.channels != mc.input_channels)
    fail(ErrorKind::CheckpointMismatch, "checkpoint expects " + std::to_string(mc.input_channels) +
                                            " channels, data has " + std::to_string(data.channels));
  if (ck.standardizer) {
    const auto& chans = data.test.begin()->second.recording->channels();
    if (chans != ck.standardizer->channels)
      fail(ErrorKind::CheckpointMismatch, "checkpoint channel names differ from the data");
  }
  WindowBatch test = windows(data.test, cfg.window, cfg.eval_stride);
  return with_context("stage eval", [&] {
    auto scores = nn::predict(*ck.model, test);
    auto report = eval::evaluate(scores, test.targets(), cfg.eval_stride);
    report.label = std::string(dsp::to_string(cfg.preprocess.method)) +
                   (cfg.standardize ? "+std" : "") + " / " + std::string(nn::to_string(mc.architecture));
    return report;
  });
}

inline void write_text(const fs::path& path, const std::string& text) {
  with_context("stage output", [&] {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    csv::write_atomic(path, text);
  });
}

// ---- commands --------------------------------------------------------------

inline void cmd_synth(const ExperimentConfig& cfg) {
  Dataset data = acquire(cfg);
  for (const auto& [key, s] : data) {
    const auto stem = cfg.output_dir / (key.subject + "_" + key.series);
    write_text(stem.string() + "_data.csv", format_data_csv(*s.recording));
    write_text(stem.string() + "_events.csv", format_events_csv(*s.recording, s.labels));
  }
  write_text(cfg.output_dir / "resolved_config.txt", resolved_config(cfg));
  std::printf("wrote %zu series to %s\n", data.size(), cfg.output_dir.string().c_str());
}

struct ChannelSummary {
  std::string channel;
  double var_before = 0.0, var_after = 0.0;
  double maxdev_before = 0.0, maxdev_after = 0.0;  // max |x - channel mean|
};

inline ChannelSummary summarize_channel(const std::string& name, std::span<const double> before,
                                        std::span<const double> after) {
  auto stats = [](std::span<const double> x, double& var, double& maxdev) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    var = 0.0;
    maxdev = 0.0;
    for (double v : x) {
      var += (v - mean) * (v - mean);
      maxdev = std::max(maxdev, std::abs(v - mean));
    }
    var /= static_cast<double>(x.size());
  };
  ChannelSummary s{name};
  stats(before, s.var_before, s.maxdev_before);
  stats(after, s.var_after, s.maxdev_after);
  return s;
}

inline std::vector<ChannelSummary> cmd_denoise(const ExperimentConfig& cfg, const fs::path& input) {
  auto rec = with_context("stage data", [&] { return load_data_csv(input, cfg.sample_rate); });
  auto out = with_context("stage preprocess", [&] {
    return with_context(input.string(), [&] { return dsp::denoise(rec, cfg.preprocess); });
  });
  write_text(cfg.output_dir / input.filename(), format_data_csv(out));

  std::vector<ChannelSummary> summary;
  std::string csv_text = "channel,var_before,var_after,max_abs_dev_before,max_abs_dev_after\n";
  std::printf("%-10s %14s %14s %14s %14s\n", "channel", "var_before", "var_after", "maxdev_before",
              "maxdev_after");
  for (std::size_t c = 0; c < rec.n_channels(); ++c) {
    auto s = summarize_channel(rec.channels()[c], rec.channel(c), out.channel(c));
    std::printf("%-10s %14.6g %14.6g %14.6g %14.6g\n", s.channel.c_str(), s.var_before, s.var_after,
                s.maxdev_before, s.maxdev_after);
    csv_text += s.channel + "," + csv::format_double(s.var_before) + "," +
                csv::format_double(s.var_after) + "," + csv::format_double(s.maxdev_before) + "," +
                csv::format_double(s.maxdev_after) + "\n";
    summary.push_back(std::move(s));
  }
  write_text(cfg.output_dir / (input.stem().string() + "_denoise_summary.csv"), csv_text);
  write_text(cfg.output_dir / "resolved_config.txt", resolved_config(cfg));
  return summary;
}

inline TrainRun cmd_train(const ExperimentConfig& cfg, bool verbose = true) {
  write_text(cfg.output_dir / "resolved_config.txt", resolved_config(cfg));
  nn::TrainOptions opts;
  std::size_t epochs = cfg.model.epochs;
  if (verbose)
    opts.on_epoch = [epochs](const nn::EpochMetrics& m) {
      std::fprintf(stderr, "epoch %s/%zu  train_loss %.5f  val_loss %.5f  val_auc %.4f\n",
                   m.epoch.c_str(), epochs, m.train_loss, m.val_loss, m.val_average_auc);
    };
  TrainRun run = run_train(cfg, opts);
  nn::save_checkpoint((cfg.output_dir / "checkpoint.json").string(), *run.result.model,
                      cfg.window, run.data.stats, cfg.seed);
  write_text(cfg.output_dir / "trace.csv", nn::format_trace_csv(run.result.trace));
  const auto& best = run.result.trace.back();
  std::printf("best epoch %zu: validation average AUC %.4f (%zu train / %zu validation windows)\n",
              run.result.best_epoch, best.val_average_auc, run.train_windows.size(),
              run.val_windows.size());
  return run;
}

inline eval::EvalReport cmd_eval(const ExperimentConfig& cfg, const fs::path& checkpoint) {
  auto ck = with_context("stage checkpoint", [&] { return nn::load_checkpoint(checkpoint.string()); });
  auto report = run_eval(cfg, ck);
  write_text(cfg.output_dir / "report.json", eval::to_json(report).dump(2) + "\n");
  const std::string table = eval::format_table(report);
  write_text(cfg.output_dir / "report.txt", table);
  for (std::size_t e = 0; e < kNumEvents; ++e)
    if (report.curves[e])
      write_text(cfg.output_dir / ("roc_" + std::string(kEventAbbrev[e]) + ".csv"),
                 eval::format_roc_csv(e, *report.curves[e]));
  write_text(cfg.output_dir / "resolved_config.txt", resolved_config(cfg));
  std::fputs(table.c_str(), stdout);
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return report;
}

// Combines saved report.json files into one table; labels default to the
// file's parent directory name.
inline std::string cmd_report(const std::vector<fs::path>& files) {
  std::vector<eval::EvalReport> reports;
  for (const auto& f : files) {
    auto r = with_context(f.string(), [&] {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(csv::read_file(f));
      } catch (const nlohmann::json::exception& ex) {
        fail(ErrorKind::InvalidArgument, std::string("not JSON: ") + ex.what());
      }
      return eval::report_from_json(j);
    });
    const auto dir = f.parent_path().filename().string();
    r.label = dir.empty() ? r.label : dir + (r.label.empty() ? "" : " (" + r.label + ")");
    reports.push_back(std::move(r));
  }
  return eval::format_table(reports);
}

}  // namespace gal::cli
