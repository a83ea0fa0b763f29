#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gal/nn/model.hpp"
#include "gal/nn/tensor.hpp"

namespace gal::nn {

// Scales all gradients so their joint L2 norm is at most `max_norm`. Returns
// the norm before clipping.
inline double clip_grad_norm(const std::vector<ParamRef>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params)
    for (double g : p.grad->vec()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (const auto& p : params)
      for (double& g : p.grad->vec()) g *= s;
  }
  return norm;
}

// Adam (bias-corrected) or SGD with classical momentum.
class Optimizer {
 public:
  explicit Optimizer(const ModelConfig& cfg) : cfg_(cfg) {}

  void step(const std::vector<ParamRef>& params, double lr) {
    if (first_.empty()) {
      for (const auto& p : params) {
        first_.emplace_back(p.value->shape());
        second_.emplace_back(p.value->shape());
      }
    }
    ++t_;
    if (cfg_.optimizer == OptimizerKind::Adam) {
      const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
      for (std::size_t k = 0; k < params.size(); ++k) {
        auto& w = params[k].value->vec();
        const auto& g = params[k].grad->vec();
        auto& m = first_[k].vec();
        auto& v = second_[k].vec();
        for (std::size_t i = 0; i < w.size(); ++i) {
          m[i] = b1 * m[i] + (1.0 - b1) * g[i];
          v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
          w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.adam_epsilon);
        }
      }
    } else {
      for (std::size_t k = 0; k < params.size(); ++k) {
        auto& w = params[k].value->vec();
        const auto& g = params[k].grad->vec();
        auto& vel = first_[k].vec();
        for (std::size_t i = 0; i < w.size(); ++i) {
          vel[i] = cfg_.momentum * vel[i] + g[i];
          w[i] -= lr * vel[i];
        }
      }
    }
  }

 private:
  ModelConfig cfg_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
  std::size_t t_ = 0;
};

}  // namespace gal::nn
