#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gal/cli/config.hpp"
#include "gal/cli/pipeline.hpp"

using namespace gal;
using namespace gal::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("gal_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Small enough to train in well under a second.
const char* kTinyConfig = R"(# tiny synthetic experiment
seed = 5
synth.subjects = 1
synth.series = 3
synth.channels = 4
synth.samples = 3000
synth.span = 100
synth.rest_gap = 150
window.length = 32
window.stride = 8
window.eval_stride = 8
window.label_tolerance = 20
preprocess.method = none
split.holdout = 1
model.conv_blocks = 4:3:2:1
model.fc_hidden = 8
train.batch_size = 32
train.epochs = 2
)";

ExperimentConfig tiny(const fs::path& out) {
  auto cfg = parse_config(kTinyConfig);
  cfg.output_dir = out;
  return cfg;
}

struct RunResult {
  int code = -1;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  const auto err_path = fs::temp_directory_path() / ("gal_cli_err_" + std::to_string(::getpid()));
  const std::string cmd = std::string(GALEEG_BIN) + " " + args + " >/dev/null 2>" + err_path.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = csv::read_file(err_path);
  fs::remove(err_path);
  return r;
}

void write_file(const fs::path& p, const std::string& text) { csv::write_atomic(p, text); }

}  // namespace

// ---------------------------------------------------------------------------
// config

TEST(Config, DefaultsAndComments) {
  auto cfg = parse_config("# nothing\n\n  seed = 9  # trailing\n");
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.window.length, 256u);
  EXPECT_EQ(cfg.model.epochs, 20u);
  EXPECT_EQ(cfg.model.batch_size, 64u);
  EXPECT_EQ(cfg.model.optimizer, nn::OptimizerKind::Adam);
}

TEST(Config, UnknownKeyIsError) {
  try {
    parse_config("seed = 1\nwindow.lenght = 10\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("window.lenght"), std::string::npos);
  }
}

TEST(Config, MalformedLinesAndValues) {
  for (const char* text : {"seed\n", "seed = x\n", "seed = 1\nseed = 2\n", "train.epochs = -1\n",
                           "model.dropout = 1.5\n", "preprocess.method = fourier\n",
                           "model.conv_blocks = 4:3\n", "data.source = files\n",
                           "synth.frequencies = 1,2,3\n", "window.length = 0\n"}) {
    try {
      parse_config(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Config) << text << " -> " << e.what();
    }
  }
}

TEST(Config, ResolvedRoundTrip) {
  auto cfg = parse_config(std::string(kTinyConfig) +
                          "preprocess.threshold = 0.25\nmodel.architecture = lstm\n"
                          "synth.frequencies = 3,5,7,9,11,13.5\ntrain.optimizer = sgd\n");
  const auto text = resolved_config(cfg);
  const auto again = resolved_config(parse_config(text));
  EXPECT_EQ(text, again);
  // every key is echoed
  for (const auto& k : config_keys()) EXPECT_NE(text.find("\n" + k.name + " = "), std::string::npos) << k.name;
}

TEST(Config, LoadMissingFile) {
  try {
    load_config("/nonexistent/galeeg.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

// ---------------------------------------------------------------------------
// pipeline

TEST(Pipeline, SynthWritesLoadableFiles) {
  auto dir = scratch("synth");
  auto cfg = tiny(dir);
  cmd_synth(cfg);
  auto loaded = load_dataset(dir, 500.0);
  auto direct = synthesize_dataset(cfg);
  ASSERT_EQ(loaded.size(), 3u);
  for (const auto& [key, s] : direct) {
    const auto& l = loaded.at(key);
    EXPECT_EQ(l.recording->samples(), s.recording->samples());
    EXPECT_EQ(l.labels.flags(), s.labels.flags());
  }
  EXPECT_TRUE(fs::exists(dir / "resolved_config.txt"));
}

TEST(Pipeline, MissingDataDirIsStageAnnotated) {
  auto cfg = tiny(scratch("missing"));
  cfg.source = DataSource::Files;
  cfg.data_dir = "/nonexistent/gal";
  try {
    run_train(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find("stage data"), std::string::npos);
  }
}

TEST(Pipeline, StandardizationFitOnTrainOnly) {
  auto cfg = tiny(scratch("std"));
  cfg.synth.spec.dc_offset_std = 5.0;
  auto p = prepare(cfg);
  ASSERT_TRUE(p.stats);
  std::vector<Recording> train;
  for (const auto& [_, s] : synthesize_dataset(cfg))
    if (s.recording->series_id() != "series3") train.push_back(*s.recording);
  auto expect = dsp::fit_standardizer(train);
  EXPECT_EQ(p.stats->mean, expect.mean);
  EXPECT_EQ(p.stats->std, expect.std);
  EXPECT_EQ(p.test.size(), 1u);
  EXPECT_EQ(p.test.begin()->first.series, "series3");
}

TEST(Pipeline, DenoiseNoneIsIdentity) {
  auto dir = scratch("denoise_none");
  auto cfg = tiny(dir / "out");
  cmd_synth([&] { auto c = cfg; c.output_dir = dir; return c; }());
  const auto input = dir / "subj1_series1_data.csv";
  auto summary = cmd_denoise(cfg, input);
  auto a = load_data_csv(input), b = load_data_csv(dir / "out" / "subj1_series1_data.csv");
  EXPECT_EQ(a.samples(), b.samples());
  EXPECT_EQ(a.channels(), b.channels());
  for (const auto& s : summary) EXPECT_EQ(s.var_before, s.var_after);
  EXPECT_TRUE(fs::exists(dir / "out" / "subj1_series1_data_denoise_summary.csv"));
}

TEST(Pipeline, DenoiseDwtReducesSpikes) {
  auto dir = scratch("denoise_dwt");
  auto cfg = tiny(dir / "out");
  cfg.synth.spec.spike_rate = 5.0;
  cfg.synth.spec.spike_amplitude = 40.0;
  cmd_synth([&] { auto c = cfg; c.output_dir = dir; return c; }());
  cfg.preprocess.method = dsp::DenoiseMethod::Dwt;
  cfg.preprocess.wavelet = dsp::WaveletName::db2;
  cfg.preprocess.levels = 4;
  auto summary = cmd_denoise(cfg, dir / "subj1_series1_data.csv");
  ASSERT_EQ(summary.size(), 4u);
  for (const auto& s : summary) EXPECT_LT(s.maxdev_after, s.maxdev_before) << s.channel;
}

TEST(Pipeline, DenoiseHighpassRemovesOffset) {
  auto dir = scratch("denoise_hp");
  std::vector<std::vector<double>> x(2, std::vector<double>(20000));
  for (std::size_t t = 0; t < 20000; ++t) {
    x[0][t] = 40.0 + std::sin(0.2 * t);
    x[1][t] = -12.0 + std::cos(0.15 * t);
  }
  Recording rec({"A", "B"}, x, 500.0, "subj1", "series1");
  write_file(dir / "subj1_series1_data.csv", format_data_csv(rec));
  auto cfg = tiny(dir / "out");
  cfg.preprocess.method = dsp::DenoiseMethod::Butterworth;
  cfg.preprocess.filter_kind = dsp::FilterKind::Highpass;
  cfg.preprocess.cutoff_low_hz = 0.5;
  cmd_denoise(cfg, dir / "subj1_series1_data.csv");
  auto out = load_data_csv(dir / "out" / "subj1_series1_data.csv");
  for (std::size_t c = 0; c < 2; ++c) {
    double m = 0;
    for (std::size_t t = 5000; t < 15000; ++t) m += out.channel(c)[t];
    EXPECT_NEAR(m / 10000, 0.0, 0.01);
  }
}

TEST(Pipeline, TrainTwiceIsByteIdentical) {
  auto a = scratch("train_a"), b = scratch("train_b");
  cmd_train(tiny(a), false);
  cmd_train(tiny(b), false);
  EXPECT_EQ(csv::read_file(a / "trace.csv"), csv::read_file(b / "trace.csv"));
  EXPECT_EQ(csv::read_file(a / "checkpoint.json"), csv::read_file(b / "checkpoint.json"));
}

TEST(Pipeline, EvalMatchesFinalTraceRow) {
  auto dir = scratch("train_eval");
  auto cfg = tiny(dir);
  auto run = cmd_train(cfg, false);
  auto report = cmd_eval(cfg, dir / "checkpoint.json");
  const auto& best = run.result.trace.back();
  ASSERT_EQ(best.epoch, "best");
  EXPECT_NEAR(report.average_auc, best.val_average_auc, 1e-9);
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    ASSERT_EQ(report.auc[e].has_value(), best.val_auc[e].has_value());
    if (report.auc[e]) {
      EXPECT_NEAR(*report.auc[e], *best.val_auc[e], 1e-9);
    }
  }
  for (const char* f : {"report.json", "report.txt", "roc_HS.csv", "roc_BR.csv", "resolved_config.txt"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  auto j = nlohmann::json::parse(csv::read_file(dir / "report.json"));
  const std::vector<std::string> order{"HS", "FDT", "BSP", "LO", "R", "BR"};
  for (std::size_t e = 0; e < kNumEvents; ++e) EXPECT_EQ(j["events"][e]["abbrev"], order[e]);
}

TEST(Pipeline, UntrainedModelNearChance) {
  auto cfg = tiny(scratch("untrained"));
  cfg.synth.series = 4;
  cfg.synth.spec.n_samples = 6000;
  cfg.model.epochs = 0;
  auto run = run_train(cfg);
  auto report = eval::evaluate(nn::predict(*run.result.model, run.val_windows), run.val_windows.targets());
  EXPECT_NEAR(report.average_auc, 0.5, 0.1);
}

TEST(Pipeline, CheckpointMismatch) {
  auto dir = scratch("mismatch");
  auto cfg = tiny(dir);
  cmd_train(cfg, false);
  auto other = cfg;
  other.window.length = 16;
  try {
    cmd_eval(other, dir / "checkpoint.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CheckpointMismatch);
  }
  other = cfg;
  other.synth.spec.n_channels = 5;
  try {
    cmd_eval(other, dir / "checkpoint.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CheckpointMismatch);
  }
}

TEST(Pipeline, ReportTable) {
  auto dir = scratch("report");
  auto cfg = tiny(dir / "runA");
  cmd_train(cfg, false);
  cmd_eval(cfg, dir / "runA" / "checkpoint.json");
  const auto table = cmd_report({dir / "runA" / "report.json"});
  EXPECT_NE(table.find("runA"), std::string::npos);
  EXPECT_NE(table.find("Average"), std::string::npos);
}

// ---------------------------------------------------------------------------
// binary

TEST(Binary, ExitCodes) {
  auto dir = scratch("bin");
  EXPECT_EQ(run_cli("keys").code, 0);
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);

  write_file(dir / "bad.cfg", "seed = 1\nnot.a.key = 3\n");
  auto bad = run_cli("--config " + (dir / "bad.cfg").string() + " train");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("not.a.key"), std::string::npos);

  write_file(dir / "missing.cfg", "data.source = files\ndata.dir = /nonexistent/gal\n");
  auto missing = run_cli("--config " + (dir / "missing.cfg").string() + " --out " +
                         (dir / "o").string() + " train");
  EXPECT_EQ(missing.code, 3);
  EXPECT_NE(missing.err.find("stage data"), std::string::npos);

  auto no_ck = run_cli("--out " + (dir / "o").string() + " eval --checkpoint " +
                       (dir / "none.json").string());
  EXPECT_NE(no_ck.code, 0);
}

TEST(Binary, ResolvedConfigReproducesRun) {
  auto dir = scratch("bin_repro");
  write_file(dir / "tiny.cfg", kTinyConfig);
  ASSERT_EQ(run_cli("--config " + (dir / "tiny.cfg").string() + " --out " + (dir / "a").string() +
                    " train").code,
            0);
  ASSERT_EQ(run_cli("--config " + (dir / "a" / "resolved_config.txt").string() + " --out " +
                    (dir / "b").string() + " train").code,
            0);
  EXPECT_EQ(csv::read_file(dir / "a" / "checkpoint.json"), csv::read_file(dir / "b" / "checkpoint.json"));
  EXPECT_EQ(csv::read_file(dir / "a" / "trace.csv"), csv::read_file(dir / "b" / "trace.csv"));

  ASSERT_EQ(run_cli("--config " + (dir / "tiny.cfg").string() + " --out " + (dir / "a").string() +
                    " eval --checkpoint " + (dir / "a" / "checkpoint.json").string()).code,
            0);
  EXPECT_TRUE(fs::exists(dir / "a" / "report.json"));
}

TEST(Binary, SeedFlagOverridesConfig) {
  auto dir = scratch("bin_seed");
  write_file(dir / "tiny.cfg", kTinyConfig);
  ASSERT_EQ(run_cli("--config " + (dir / "tiny.cfg").string() + " --seed 17 --out " +
                    (dir / "s").string() + " synth").code,
            0);
  auto resolved = parse_config(csv::read_file(dir / "s" / "resolved_config.txt"));
  EXPECT_EQ(resolved.seed, 17u);
}
