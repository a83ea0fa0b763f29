#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gal/core/recording.hpp"
#include "gal/error.hpp"
#include "gal/nn/layers.hpp"
#include "gal/nn/lstm.hpp"
#include "gal/nn/tensor.hpp"
#include "gal/random.hpp"

namespace gal::nn {

enum class Architecture { Cnn, Lstm };
enum class OptimizerKind { Adam, SgdMomentum };

inline std::string_view to_string(Architecture a) { return a == Architecture::Cnn ? "cnn" : "lstm"; }
inline std::string_view to_string(OptimizerKind o) {
  return o == OptimizerKind::Adam ? "adam" : "sgd";
}

inline Architecture parse_architecture(std::string_view s) {
  if (s == "cnn") return Architecture::Cnn;
  if (s == "lstm") return Architecture::Lstm;
  fail(ErrorKind::InvalidArgument, "unknown architecture '" + std::string(s) + "' (cnn, lstm)");
}

inline OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "sgd") return OptimizerKind::SgdMomentum;
  fail(ErrorKind::InvalidArgument, "unknown optimizer '" + std::string(s) + "' (adam, sgd)");
}

struct ConvBlockConfig {
  std::size_t channels = 16;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 1;
  friend bool operator==(const ConvBlockConfig&, const ConvBlockConfig&) = default;
};

struct ModelConfig {
  Architecture architecture = Architecture::Cnn;
  // Window shape the model consumes: EEG channels x samples.
  std::size_t input_channels = 32;
  std::size_t input_length = 256;

  std::vector<ConvBlockConfig> conv_blocks = {{16, 3, 2, 1}, {32, 3, 2, 1}};
  std::vector<std::size_t> fc_hidden = {64};

  std::size_t lstm_hidden = 64;
  std::size_t lstm_layers = 4;
  double dropout = 0.3;

  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double momentum = 0.9;  // sgd
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double lr_decay = 1.0;  // multiplicative per-epoch schedule
  std::size_t batch_size = 64;
  std::size_t epochs = 20;
  double grad_clip = 0.0;  // global-norm clip, 0 disables

  double bn_epsilon = 1e-5;
  double bn_momentum = 0.1;

  std::uint64_t seed = 0;

  void validate() const {
    if (input_channels == 0 || input_length == 0)
      fail(ErrorKind::InvalidArgument, "model input shape must be positive");
    if (dropout < 0.0 || dropout >= 1.0)
      fail(ErrorKind::InvalidArgument, "dropout must lie in [0, 1)");
    if (!(learning_rate >= 0.0)) fail(ErrorKind::InvalidArgument, "learning rate must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0) fail(ErrorKind::InvalidArgument, "momentum must lie in [0, 1)");
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
      fail(ErrorKind::InvalidArgument, "adam decay rates must lie in [0, 1)");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0))
      fail(ErrorKind::InvalidArgument, "lr_decay must lie in (0, 1]");
    if (batch_size == 0) fail(ErrorKind::InvalidArgument, "batch size must be >= 1");
    if (grad_clip < 0.0) fail(ErrorKind::InvalidArgument, "grad_clip must be >= 0");
    if (architecture == Architecture::Cnn && conv_blocks.empty())
      fail(ErrorKind::InvalidArgument, "cnn needs at least one conv block");
    if (architecture == Architecture::Lstm && (lstm_layers == 0 || lstm_hidden == 0))
      fail(ErrorKind::InvalidArgument, "lstm needs at least one layer and hidden unit");
  }
};

// Maps N x C x T windows to N x 6 event scores in (0, 1).
class Model {
 public:
  virtual ~Model() = default;

  // `rng` drives dropout in train mode; unused otherwise.
  virtual Tensor forward(const Tensor& input, Mode mode, Rng* rng = nullptr) = 0;

  // Gradient w.r.t. the pre-sigmoid logits of the last forward call.
  virtual void backward_logits(const Tensor& grad_logits) = 0;

  virtual std::vector<ParamRef> parameters() = 0;
  virtual std::vector<BufferRef> buffers() = 0;
  virtual const ModelConfig& config() const = 0;
  virtual std::unique_ptr<Model> clone() const = 0;

  // Gradient w.r.t. the scores of the last forward call.
  void backward(const Tensor& grad_scores) {
    backward_logits(sigmoid_backward(last_scores_, grad_scores));
  }

  void zero_grad() {
    for (auto& p : parameters()) p.grad->fill(0.0);
  }

  std::size_t parameter_count() {
    std::size_t n = 0;
    for (auto& p : parameters()) n += p.value->size();
    return n;
  }

  const Tensor& last_scores() const { return last_scores_; }

 protected:
  Tensor finish(Tensor logits) {
    last_scores_ = sigmoid_forward(logits);
    last_scores_.require_finite("model scores");
    return last_scores_;
  }

  void check_input(const Tensor& input) const {
    const auto& cfg = config();
    if (input.rank() != 3 || input.dim(1) != cfg.input_channels ||
        input.dim(2) != cfg.input_length)
      fail(ErrorKind::ShapeMismatch, "model expects N x " + std::to_string(cfg.input_channels) +
                                         " x " + std::to_string(cfg.input_length) + " input, got " +
                                         shape_str(input.shape()));
  }

  Tensor last_scores_;
};

// Conv+BN+ReLU blocks -> flatten -> FC+ReLU ... -> FC(6) -> sigmoid.
class CnnModel final : public Model {
 public:
  explicit CnnModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::size_t ch = 1, h = cfg_.input_channels, w = cfg_.input_length;
    for (const auto& b : cfg_.conv_blocks) {
      Block blk;
      blk.conv = Conv2dLayer(ch, b.channels, b.kernel, b.kernel, b.stride, b.padding);
      blk.bn = BatchNormLayer(b.channels, cfg_.bn_epsilon, cfg_.bn_momentum);
      blk.gw = Tensor(blk.conv.weight.shape());
      blk.gb = Tensor(blk.conv.bias.shape());
      blk.ggamma = Tensor({b.channels});
      blk.gbeta = Tensor({b.channels});
      h = blk.conv.out_h(h);
      w = blk.conv.out_w(w);
      ch = b.channels;
      blocks_.push_back(std::move(blk));
    }
    feature_shape_ = {ch, h, w};
    std::size_t in = ch * h * w;
    for (std::size_t width : cfg_.fc_hidden) {
      add_dense(in, width);
      in = width;
    }
    add_dense(in, kNumEvents);
  }

  const ModelConfig& config() const override { return cfg_; }
  std::unique_ptr<Model> clone() const override { return std::make_unique<CnnModel>(*this); }
  const Shape& feature_shape() const { return feature_shape_; }

  Tensor forward(const Tensor& input, Mode mode, Rng* = nullptr) override {
    check_input(input);
    const std::size_t n = input.dim(0);
    Tensor x = input.reshaped({n, 1, cfg_.input_channels, cfg_.input_length});
    for (auto& blk : blocks_) {
      blk.conv_in = std::move(x);
      Tensor z = conv2d_forward(blk.conv, blk.conv_in);
      blk.bn_out = batchnorm_forward(blk.bn, z, mode, &blk.bn_cache);
      x = relu_forward(blk.bn_out);
    }
    x = x.reshaped({n, shape_size(feature_shape_)});
    for (std::size_t i = 0; i < dense_.size(); ++i) {
      auto& d = dense_[i];
      d.in = std::move(x);
      d.pre = dense_forward(d.layer, d.in);
      x = i + 1 < dense_.size() ? relu_forward(d.pre) : d.pre;
    }
    return finish(std::move(x));
  }

  void backward_logits(const Tensor& grad_logits) override {
    Tensor g = grad_logits;
    for (std::size_t i = dense_.size(); i-- > 0;) {
      auto& d = dense_[i];
      if (i + 1 < dense_.size()) g = relu_backward(d.pre, g);
      auto dg = dense_backward(d.layer, d.in, g);
      add_into(d.gw, dg.weight);
      add_into(d.gb, dg.bias);
      g = std::move(dg.input);
    }
    const std::size_t n = g.dim(0);
    Shape fs = {n};
    fs.insert(fs.end(), feature_shape_.begin(), feature_shape_.end());
    g = g.reshaped(fs);
    for (std::size_t i = blocks_.size(); i-- > 0;) {
      auto& blk = blocks_[i];
      g = relu_backward(blk.bn_out, g);
      auto bg = batchnorm_backward(blk.bn, blk.bn_cache, g);
      add_into(blk.ggamma, bg.gamma);
      add_into(blk.gbeta, bg.beta);
      auto cg = conv2d_backward(blk.conv, blk.conv_in, bg.input);
      add_into(blk.gw, cg.weight);
      add_into(blk.gb, cg.bias);
      g = std::move(cg.input);
    }
  }

  std::vector<ParamRef> parameters() override {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      auto& b = blocks_[i];
      const std::string p = "conv" + std::to_string(i);
      out.push_back({p + ".weight", &b.conv.weight, &b.gw});
      out.push_back({p + ".bias", &b.conv.bias, &b.gb});
      out.push_back({p + ".bn.gamma", &b.bn.gamma, &b.ggamma});
      out.push_back({p + ".bn.beta", &b.bn.beta, &b.gbeta});
    }
    for (std::size_t i = 0; i < dense_.size(); ++i) {
      const std::string p = "fc" + std::to_string(i);
      out.push_back({p + ".weight", &dense_[i].layer.weight, &dense_[i].gw});
      out.push_back({p + ".bias", &dense_[i].layer.bias, &dense_[i].gb});
    }
    return out;
  }

  std::vector<BufferRef> buffers() override {
    std::vector<BufferRef> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const std::string p = "conv" + std::to_string(i) + ".bn";
      out.push_back({p + ".running_mean", &blocks_[i].bn.running_mean});
      out.push_back({p + ".running_var", &blocks_[i].bn.running_var});
    }
    return out;
  }

  // Layer access for tests.
  Conv2dLayer& conv(std::size_t i) { return blocks_.at(i).conv; }
  BatchNormLayer& batchnorm(std::size_t i) { return blocks_.at(i).bn; }
  DenseLayer& dense(std::size_t i) { return dense_.at(i).layer; }
  std::size_t n_blocks() const { return blocks_.size(); }
  std::size_t n_dense() const { return dense_.size(); }

 private:
  struct Block {
    Conv2dLayer conv;
    BatchNormLayer bn;
    Tensor gw, gb, ggamma, gbeta;
    Tensor conv_in, bn_out;
    BatchNormCache bn_cache;
  };
  struct Dense {
    DenseLayer layer;
    Tensor gw, gb;
    Tensor in, pre;
  };

  void add_dense(std::size_t in, std::size_t out) {
    Dense d;
    d.layer = DenseLayer(in, out);
    d.gw = Tensor(d.layer.weight.shape());
    d.gb = Tensor(d.layer.bias.shape());
    dense_.push_back(std::move(d));
  }

  static void add_into(Tensor& acc, const Tensor& g) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
  }

  ModelConfig cfg_;
  std::vector<Block> blocks_;
  std::vector<Dense> dense_;
  Shape feature_shape_;
};

// Per-timestep channel vectors through `lstm_layers` cascaded (LSTM, dropout)
// stages; the last hidden state feeds FC(6) -> sigmoid.
class LstmModel final : public Model {
 public:
  explicit LstmModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::size_t in = cfg_.input_channels;
    for (std::size_t l = 0; l < cfg_.lstm_layers; ++l) {
      Stage s;
      s.cell = LstmCell(in, cfg_.lstm_hidden);
      stages_.push_back(std::move(s));
      in = cfg_.lstm_hidden;
    }
    head_ = DenseLayer(in, kNumEvents);
    head_gw_ = Tensor(head_.weight.shape());
    head_gb_ = Tensor(head_.bias.shape());
    grads_.reserve(stages_.size());
    for (auto& s : stages_) grads_.emplace_back(s.cell);
  }

  const ModelConfig& config() const override { return cfg_; }
  std::unique_ptr<Model> clone() const override { return std::make_unique<LstmModel>(*this); }

  Tensor forward(const Tensor& input, Mode mode, Rng* rng = nullptr) override {
    check_input(input);
    const std::size_t n = input.dim(0), c = cfg_.input_channels, t_len = cfg_.input_length;
    // N x C x T -> N x T x C
    Tensor x({n, t_len, c});
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t t = 0; t < t_len; ++t)
          x[(b * t_len + t) * c + ch] = input[(b * c + ch) * t_len + t];

    const bool drop = mode == Mode::Train && cfg_.dropout > 0.0;
    if (drop && rng == nullptr)
      fail(ErrorKind::InvalidArgument, "train-mode dropout needs a random generator");
    for (auto& s : stages_) {
      Tensor h = lstm_sequence_forward(s.cell, x, &s.cache);
      if (drop)
        x = dropout_forward(h, cfg_.dropout, *rng, s.mask);
      else {
        s.mask = Tensor();
        x = std::move(h);
      }
    }
    // last timestep
    const std::size_t hs = cfg_.lstm_hidden;
    last_hidden_ = Tensor({n, hs});
    for (std::size_t b = 0; b < n; ++b)
      std::copy_n(x.ptr() + (b * t_len + t_len - 1) * hs, hs, last_hidden_.ptr() + b * hs);
    return finish(dense_forward(head_, last_hidden_));
  }

  void backward_logits(const Tensor& grad_logits) override {
    auto hg = dense_backward(head_, last_hidden_, grad_logits);
    for (std::size_t i = 0; i < head_gw_.size(); ++i) head_gw_[i] += hg.weight[i];
    for (std::size_t i = 0; i < head_gb_.size(); ++i) head_gb_[i] += hg.bias[i];
    const std::size_t n = grad_logits.dim(0), t_len = cfg_.input_length, hs = cfg_.lstm_hidden;
    Tensor g({n, t_len, hs});
    for (std::size_t b = 0; b < n; ++b)
      std::copy_n(hg.input.ptr() + b * hs, hs, g.ptr() + (b * t_len + t_len - 1) * hs);
    for (std::size_t l = stages_.size(); l-- > 0;) {
      auto& s = stages_[l];
      if (!s.mask.empty()) g = dropout_backward(s.mask, g);
      g = lstm_sequence_backward(s.cell, s.cache, g, grads_[l]);
    }
  }

  std::vector<ParamRef> parameters() override {
    std::vector<ParamRef> out;
    for (std::size_t l = 0; l < stages_.size(); ++l) {
      const std::string p = "lstm" + std::to_string(l);
      out.push_back({p + ".w", &stages_[l].cell.w, &grads_[l].w});
      out.push_back({p + ".u", &stages_[l].cell.u, &grads_[l].u});
      out.push_back({p + ".b", &stages_[l].cell.b, &grads_[l].b});
    }
    out.push_back({"fc.weight", &head_.weight, &head_gw_});
    out.push_back({"fc.bias", &head_.bias, &head_gb_});
    return out;
  }

  std::vector<BufferRef> buffers() override { return {}; }

  LstmCell& cell(std::size_t l) { return stages_.at(l).cell; }
  DenseLayer& head() { return head_; }

 private:
  struct Stage {
    LstmCell cell;
    LstmSequenceCache cache;
    Tensor mask;
  };

  ModelConfig cfg_;
  std::vector<Stage> stages_;
  std::vector<LstmGrads> grads_;
  DenseLayer head_;
  Tensor head_gw_, head_gb_;
  Tensor last_hidden_;
};

inline std::unique_ptr<Model> make_model(const ModelConfig& cfg) {
  if (cfg.architecture == Architecture::Cnn) return std::make_unique<CnnModel>(cfg);
  return std::make_unique<LstmModel>(cfg);
}

// Conv/dense weights ~ U(-a, a), a = sqrt(6 / (fan_in + fan_out)), biases 0;
// LSTM weights ~ U(-0.1, 0.1) with forget-gate bias 1.
inline void initialize(Model& model, Rng& rng) {
  auto glorot = [&](Tensor& w, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : w.vec()) v = uniform(rng, -a, a);
  };
  if (auto* cnn = dynamic_cast<CnnModel*>(&model)) {
    for (std::size_t i = 0; i < cnn->n_blocks(); ++i) {
      auto& c = cnn->conv(i);
      const std::size_t k = c.kernel_h * c.kernel_w;
      glorot(c.weight, c.in_channels * k, c.out_channels * k);
      c.bias.fill(0.0);
      auto& bn = cnn->batchnorm(i);
      bn.gamma.fill(1.0);
      bn.beta.fill(0.0);
      bn.running_mean.fill(0.0);
      bn.running_var.fill(1.0);
    }
    for (std::size_t i = 0; i < cnn->n_dense(); ++i) {
      auto& d = cnn->dense(i);
      glorot(d.weight, d.in_features, d.out_features);
      d.bias.fill(0.0);
    }
    return;
  }
  auto& lstm = dynamic_cast<LstmModel&>(model);
  for (std::size_t l = 0; l < lstm.config().lstm_layers; ++l) {
    auto& cell = lstm.cell(l);
    for (auto& v : cell.w.vec()) v = uniform(rng, -0.1, 0.1);
    for (auto& v : cell.u.vec()) v = uniform(rng, -0.1, 0.1);
    cell.b.fill(0.0);
    const std::size_t f0 = cell.gate_offset(LstmCell::Forget);
    for (std::size_t k = 0; k < cell.hidden_size; ++k) cell.b[f0 + k] = 1.0;
  }
  glorot(lstm.head().weight, lstm.head().in_features, lstm.head().out_features);
  lstm.head().bias.fill(0.0);
}

}  // namespace gal::nn
