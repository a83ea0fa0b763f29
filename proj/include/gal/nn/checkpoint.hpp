#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gal/core/csv_io.hpp"
#include "gal/dsp/standardize.hpp"
#include "gal/error.hpp"
#include "gal/nn/model.hpp"
#include "gal/windowing.hpp"

namespace gal::nn {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointFormat = "galeeg-checkpoint";

// Everything needed to rerun inference: the model, the window shape it was
// trained on, and the standardization fitted on the training split.
struct Checkpoint {
  std::unique_ptr<Model> model;
  WindowSpec window;
  std::optional<dsp::StandardizationStats> standardizer;
  std::uint64_t seed = 0;
};

inline nlohmann::json to_json(const ModelConfig& c) {
  nlohmann::json j;
  j["architecture"] = std::string(to_string(c.architecture));
  j["input_channels"] = c.input_channels;
  j["input_length"] = c.input_length;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : c.conv_blocks)
    blocks.push_back({{"channels", b.channels}, {"kernel", b.kernel}, {"stride", b.stride},
                      {"padding", b.padding}});
  j["conv_blocks"] = blocks;
  j["fc_hidden"] = c.fc_hidden;
  j["lstm_hidden"] = c.lstm_hidden;
  j["lstm_layers"] = c.lstm_layers;
  j["dropout"] = c.dropout;
  j["optimizer"] = std::string(to_string(c.optimizer));
  j["learning_rate"] = c.learning_rate;
  j["momentum"] = c.momentum;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["lr_decay"] = c.lr_decay;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["grad_clip"] = c.grad_clip;
  j["bn_epsilon"] = c.bn_epsilon;
  j["bn_momentum"] = c.bn_momentum;
  j["seed"] = c.seed;
  return j;
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.architecture = parse_architecture(j.at("architecture").get<std::string>());
  c.input_channels = j.at("input_channels").get<std::size_t>();
  c.input_length = j.at("input_length").get<std::size_t>();
  c.conv_blocks.clear();
  for (const auto& b : j.at("conv_blocks"))
    c.conv_blocks.push_back({b.at("channels").get<std::size_t>(), b.at("kernel").get<std::size_t>(),
                             b.at("stride").get<std::size_t>(), b.at("padding").get<std::size_t>()});
  c.fc_hidden = j.at("fc_hidden").get<std::vector<std::size_t>>();
  c.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
  c.lstm_layers = j.at("lstm_layers").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  c.learning_rate = j.at("learning_rate").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.lr_decay = j.at("lr_decay").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.grad_clip = j.at("grad_clip").get<double>();
  c.bn_epsilon = j.at("bn_epsilon").get<double>();
  c.bn_momentum = j.at("bn_momentum").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

namespace detail {
inline nlohmann::json tensor_json(const Tensor& t) {
  return {{"shape", t.shape()}, {"data", t.vec()}};
}

inline void load_tensor(const nlohmann::json& tensors, const std::string& name, Tensor& dst) {
  if (!tensors.contains(name)) fail(ErrorKind::CheckpointMismatch, "checkpoint lacks tensor '" + name + "'");
  const auto& t = tensors.at(name);
  auto shape = t.at("shape").get<Shape>();
  if (shape != dst.shape())
    fail(ErrorKind::CheckpointMismatch, "tensor '" + name + "' has shape " + shape_str(shape) +
                                            ", model expects " + shape_str(dst.shape()));
  auto data = t.at("data").get<std::vector<double>>();
  if (data.size() != dst.size())
    fail(ErrorKind::CheckpointMismatch, "tensor '" + name + "' data length disagrees with shape");
  dst = Tensor(std::move(shape), std::move(data));
}
}  // namespace detail

inline std::string serialize_checkpoint(Model& model, const WindowSpec& window,
                                        const std::optional<dsp::StandardizationStats>& stats,
                                        std::uint64_t seed) {
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["seed"] = seed;
  j["model"] = to_json(model.config());
  j["window"] = {{"length", window.length},
                 {"stride", window.stride},
                 {"label_tolerance", window.label_tolerance}};
  if (stats)
    j["standardizer"] = {{"channels", stats->channels}, {"mean", stats->mean}, {"std", stats->std}};
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& p : model.parameters()) tensors[p.name] = detail::tensor_json(*p.value);
  for (const auto& b : model.buffers()) tensors[b.name] = detail::tensor_json(*b.value);
  j["tensors"] = tensors;
  return j.dump(1) + "\n";
}

inline Checkpoint parse_checkpoint(const std::string& text) {
  Checkpoint ck;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != kCheckpointFormat)
      fail(ErrorKind::CheckpointMismatch, "not a checkpoint file");
    if (j.at("version").get<int>() != kCheckpointVersion)
      fail(ErrorKind::CheckpointMismatch, "unsupported checkpoint version " + j.at("version").dump());
    ck.seed = j.at("seed").get<std::uint64_t>();
    const auto& w = j.at("window");
    ck.window.length = w.at("length").get<std::size_t>();
    ck.window.stride = w.at("stride").get<std::size_t>();
    ck.window.label_tolerance = w.at("label_tolerance").get<std::size_t>();
    if (j.contains("standardizer")) {
      const auto& s = j.at("standardizer");
      dsp::StandardizationStats st;
      st.channels = s.at("channels").get<std::vector<std::string>>();
      st.mean = s.at("mean").get<std::vector<double>>();
      st.std = s.at("std").get<std::vector<double>>();
      if (st.mean.size() != st.channels.size() || st.std.size() != st.channels.size())
        fail(ErrorKind::CheckpointMismatch, "standardizer arrays disagree with channel count");
      ck.standardizer = std::move(st);
    }
    auto cfg = model_config_from_json(j.at("model"));
    cfg.validate();
    ck.model = make_model(cfg);
    const auto& tensors = j.at("tensors");
    for (auto& p : ck.model->parameters()) detail::load_tensor(tensors, p.name, *p.value);
    for (auto& b : ck.model->buffers()) detail::load_tensor(tensors, b.name, *b.value);
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::CheckpointMismatch, std::string("malformed checkpoint: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.kind() == ErrorKind::CheckpointMismatch) throw;
    fail(ErrorKind::CheckpointMismatch, ex.what());
  }
  return ck;
}

inline void save_checkpoint(const std::string& path, Model& model, const WindowSpec& window,
                            const std::optional<dsp::StandardizationStats>& stats, std::uint64_t seed) {
  csv::write_atomic(path, serialize_checkpoint(model, window, stats, seed));
}

inline Checkpoint load_checkpoint(const std::string& path) {
  return parse_checkpoint(csv::read_file(path));
}

}  // namespace gal::nn
