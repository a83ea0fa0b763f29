#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gal/core/csv_io.hpp"
#include "gal/error.hpp"
#include "gal/eval/report.hpp"
#include "gal/nn/loss.hpp"
#include "gal/nn/model.hpp"
#include "gal/nn/optimizer.hpp"
#include "gal/random.hpp"
#include "gal/windowing.hpp"

namespace gal::nn {

// Copies the selected windows into an N x C x T tensor.
inline Tensor gather_windows(const WindowBatch& batch, std::span<const std::size_t> indices) {
  const std::size_t c = batch.channels(), t = batch.length();
  Tensor x({indices.size(), c, t});
  for (std::size_t i = 0; i < indices.size(); ++i)
    batch.copy_window(indices[i], x.data().subspan(i * c * t, c * t));
  return x;
}

inline Tensor gather_targets(const WindowBatch& batch, std::span<const std::size_t> indices) {
  Tensor y({indices.size(), kNumEvents});
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t e = 0; e < kNumEvents; ++e) y[i * kNumEvents + e] = batch.targets()[indices[i]][e];
  return y;
}

// Inference-mode scores for every window, computed in chunks.
inline std::vector<eval::ScoreRow> predict(Model& model, const WindowBatch& batch,
                                           std::size_t chunk = 256) {
  std::vector<eval::ScoreRow> out(batch.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < batch.size(); start += chunk) {
    const std::size_t stop = std::min(batch.size(), start + chunk);
    idx.resize(stop - start);
    std::iota(idx.begin(), idx.end(), start);
    Tensor scores = model.forward(gather_windows(batch, idx), Mode::Inference);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t e = 0; e < kNumEvents; ++e) out[start + i][e] = scores[i * kNumEvents + e];
  }
  return out;
}

inline double mean_bce(std::span<const eval::ScoreRow> scores, std::span<const EventVector> targets) {
  Tensor s({scores.size(), kNumEvents}), t({scores.size(), kNumEvents});
  for (std::size_t i = 0; i < scores.size(); ++i)
    for (std::size_t e = 0; e < kNumEvents; ++e) {
      s[i * kNumEvents + e] = scores[i][e];
      t[i * kNumEvents + e] = targets[i][e];
    }
  return bce_loss(s, t).value;
}

struct EpochMetrics {
  std::string epoch;  // 1-based epoch number, or "best" for the selected parameters
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  std::array<std::optional<double>, kNumEvents> val_auc{};
  double val_average_auc = 0.0;
};

struct TrainResult {
  std::unique_ptr<Model> model;
  std::vector<EpochMetrics> trace;  // one row per epoch, then the "best" row
  std::size_t best_epoch = 0;       // 1-based
};

// Batch boundaries over n shuffled items; a trailing batch of one is folded
// into its predecessor so batch statistics stay defined.
inline std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n,
                                                                     std::size_t batch) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s = 0; s < n; s += batch) out.emplace_back(s, std::min(n, s + batch));
  if (out.size() > 1 && out.back().second - out.back().first == 1) {
    out[out.size() - 2].second = n;
    out.pop_back();
  }
  return out;
}

struct TrainOptions {
  // Called after every epoch with the row just recorded.
  std::function<void(const EpochMetrics&)> on_epoch;
};

inline TrainResult train(const ModelConfig& cfg, const WindowBatch& train_set,
                         const WindowBatch& val_set, const TrainOptions& opts = {}) {
  cfg.validate();
  if (train_set.empty()) fail(ErrorKind::EmptyTrainingSet, "no training windows");
  if (val_set.empty()) fail(ErrorKind::EmptyTrainingSet, "no validation windows");
  {
    bool any_two_class = false;
    for (std::size_t e = 0; e < kNumEvents && !any_two_class; ++e) {
      std::size_t pos = 0;
      for (const auto& t : train_set.targets()) pos += t[e];
      any_two_class = pos > 0 && pos < train_set.size();
    }
    if (!any_two_class)
      fail(ErrorKind::EmptyTrainingSet, "training windows contain a single class for every event");
  }

  auto model = make_model(cfg);
  {
    Rng init_rng = substream(cfg.seed, "init");
    initialize(*model, init_rng);
  }
  Rng shuffle_rng = substream(cfg.seed, "shuffle");
  Rng dropout_rng = substream(cfg.seed, "dropout");
  Optimizer opt(cfg);

  TrainResult result;
  std::unique_ptr<Model> best;
  double best_auc = -1.0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double lr = cfg.learning_rate;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    const auto ranges = batch_ranges(order.size(), cfg.batch_size);
    for (std::size_t bi = 0; bi < ranges.size(); ++bi) {
      std::span<const std::size_t> idx(order.data() + ranges[bi].first,
                                       ranges[bi].second - ranges[bi].first);
      Tensor x = gather_windows(train_set, idx);
      Tensor y = gather_targets(train_set, idx);
      Tensor scores = model->forward(x, Mode::Train, &dropout_rng);
      LossResult loss = bce_loss(scores, y);
      if (!std::isfinite(loss.value))
        fail(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch) + ", batch " +
                                           std::to_string(bi + 1) + ": loss is not finite");
      // d loss / d logit = (s - t) / count: the sigmoid and cross-entropy
      // derivatives combined, which does not vanish when a score saturates.
      Tensor grad_logits(scores.shape());
      const double inv = 1.0 / static_cast<double>(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i) grad_logits[i] = (scores[i] - y[i]) * inv;
      model->zero_grad();
      model->backward_logits(grad_logits);
      auto params = model->parameters();
      const double norm = clip_grad_norm(params, cfg.grad_clip);
      if (!std::isfinite(norm))
        fail(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch) + ", batch " +
                                           std::to_string(bi + 1) + ": gradient is not finite");
      opt.step(params, lr);
      loss_sum += loss.value * static_cast<double>(idx.size());
      loss_count += idx.size();
    }

    auto val_scores = predict(*model, val_set);
    auto report = eval::evaluate(val_scores, val_set.targets());
    EpochMetrics m;
    m.epoch = std::to_string(epoch);
    m.learning_rate = lr;
    m.train_loss = loss_sum / static_cast<double>(loss_count);
    m.val_loss = mean_bce(val_scores, val_set.targets());
    m.val_auc = report.auc;
    m.val_average_auc = report.average_auc;
    result.trace.push_back(m);
    if (opts.on_epoch) opts.on_epoch(m);
    if (report.average_auc > best_auc) {
      best_auc = report.average_auc;
      best = model->clone();
      result.best_epoch = epoch;
    }
    lr *= cfg.lr_decay;
  }

  if (!best) {
    // zero epochs: the initialized model is the result
    auto val_scores = predict(*model, val_set);
    auto report = eval::evaluate(val_scores, val_set.targets());
    EpochMetrics m;
    m.epoch = "best";
    m.learning_rate = lr;
    m.val_loss = mean_bce(val_scores, val_set.targets());
    m.val_auc = report.auc;
    m.val_average_auc = report.average_auc;
    result.trace.push_back(m);
    result.model = std::move(model);
    return result;
  }
  EpochMetrics best_row = result.trace[result.best_epoch - 1];
  best_row.epoch = "best";
  result.trace.push_back(best_row);
  result.model = std::move(best);
  return result;
}

inline std::string format_trace_csv(const std::vector<EpochMetrics>& trace) {
  std::string out = "epoch,learning_rate,train_loss,val_loss";
  for (auto a : kEventAbbrev) {
    out += ",val_auc_";
    out += a;
  }
  out += ",val_average_auc\n";
  for (const auto& m : trace) {
    out += m.epoch + "," + csv::format_double(m.learning_rate) + "," +
           csv::format_double(m.train_loss) + "," + csv::format_double(m.val_loss);
    for (const auto& a : m.val_auc) out += "," + (a ? csv::format_double(*a) : std::string("nan"));
    out += "," + csv::format_double(m.val_average_auc) + "\n";
  }
  return out;
}

}  // namespace gal::nn
