// galeeg: synth | denoise | train | eval | report
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gal/cli/config.hpp"
#include "gal/cli/pipeline.hpp"
#include "gal/error.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfigError = 2, kDataError = 3, kRuntimeError = 4 };

int exit_code_for(gal::ErrorKind kind) {
  using gal::ErrorKind;
  switch (kind) {
    case ErrorKind::Config:
      return kConfigError;
    case ErrorKind::MalformedHeader:
    case ErrorKind::RaggedRow:
    case ErrorKind::NonNumericCell:
    case ErrorKind::LengthMismatch:
    case ErrorKind::NonBinaryCell:
    case ErrorKind::WrongEventColumns:
    case ErrorKind::Io:
    case ErrorKind::RecordingTooShort:
    case ErrorKind::InsufficientSeries:
    case ErrorKind::ChannelMismatch:
    case ErrorKind::DegenerateChannel:
    case ErrorKind::CheckpointMismatch:
      return kDataError;
    default:
      return kRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grasp-and-lift EEG event detection pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "experiment config (key = value)");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV pairs");
  auto* denoise = app.add_subcommand("denoise", "denoise one data CSV with the configured method");
  std::string input;
  denoise->add_option("--input", input, "data CSV")->required();
  auto* train = app.add_subcommand("train", "train a model; writes checkpoint, trace and resolved config");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the held-out series");
  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "checkpoint.json from train")->required();
  auto* report = app.add_subcommand("report", "tabulate report.json files");
  std::vector<std::string> reports;
  report->add_option("reports", reports, "report.json files")->required();
  auto* keys = app.add_subcommand("keys", "list config keys with their defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (keys->parsed()) {
      gal::cli::ExperimentConfig defaults;
      for (const auto& k : gal::cli::config_keys())
        std::printf("%-26s %-22s %s\n", k.name.c_str(), k.get(defaults).c_str(), k.help.c_str());
      return kOk;
    }

    gal::cli::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = gal::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (synth->parsed()) gal::cli::cmd_synth(cfg);
    else if (denoise->parsed()) gal::cli::cmd_denoise(cfg, input);
    else if (train->parsed()) gal::cli::cmd_train(cfg);
    else if (eval->parsed()) gal::cli::cmd_eval(cfg, checkpoint);
    else if (report->parsed()) {
      std::vector<std::filesystem::path> paths(reports.begin(), reports.end());
      const auto table = gal::cli::cmd_report(paths);
      std::fputs(table.c_str(), stdout);
      if (!out_dir.empty()) gal::cli::write_text(cfg.output_dir / "report_table.txt", table);
    }
    return kOk;
  } catch (const gal::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
}
