#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gal/error.hpp"
#include "gal/nn/layers.hpp"
#include "gal/nn/tensor.hpp"

namespace gal::nn {

// Standard LSTM cell without peepholes. The four gates' parameters are stored
// as stacked blocks of H rows in the order [input, forget, candidate, output]:
//   z = x W^T + h_prev U^T + b
//   i = sigmoid(z_i), f = sigmoid(z_f), g = tanh(z_g), o = sigmoid(z_o)
//   c = f * c_prev + i * g,  h = o * tanh(c)
struct LstmCell {
  enum Gate : std::size_t { Input = 0, Forget = 1, Candidate = 2, Output = 3 };

  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor w;  // 4H x D
  Tensor u;  // 4H x H
  Tensor b;  // 4H

  LstmCell() = default;
  LstmCell(std::size_t input, std::size_t hidden)
      : input_size(input),
        hidden_size(hidden),
        w({4 * hidden, input}),
        u({4 * hidden, hidden}),
        b({4 * hidden}) {
    if (input == 0 || hidden == 0) fail(ErrorKind::InvalidArgument, "lstm sizes must be >= 1");
  }

  std::size_t parameter_count() const { return w.size() + u.size() + b.size(); }

  // Row offset of a gate's block within w, u and b.
  std::size_t gate_offset(Gate g) const { return static_cast<std::size_t>(g) * hidden_size; }
};

struct LstmStepCache {
  Tensor x, h_prev, c_prev;  // inputs
  Tensor i, f, g, o;         // gate activations, N x H
  Tensor tanh_c;
};

struct LstmStepResult {
  Tensor h;
  Tensor c;
  LstmStepCache cache;
};

struct LstmGrads {
  Tensor w, u, b;
  explicit LstmGrads(const LstmCell& cell)
      : w(cell.w.shape()), u(cell.u.shape()), b(cell.b.shape()) {}
};

struct LstmStepGrads {
  Tensor x, h_prev, c_prev;
  Tensor w, u, b;
};

// x: N x D, h_prev and c_prev: N x H.
inline LstmStepResult lstm_step(const LstmCell& cell, const Tensor& x, const Tensor& h_prev,
                                const Tensor& c_prev) {
  const std::size_t d = cell.input_size, hs = cell.hidden_size;
  if (x.rank() != 2 || x.dim(1) != d)
    fail(ErrorKind::ShapeMismatch, "lstm input " + shape_str(x.shape()) + " does not have " +
                                       std::to_string(d) + " features");
  const std::size_t n = x.dim(0);
  require_shape(h_prev, {n, hs}, "lstm previous hidden state");
  require_shape(c_prev, {n, hs}, "lstm previous cell state");

  LstmStepResult r{Tensor({n, hs}), Tensor({n, hs}),
                   LstmStepCache{x, h_prev, c_prev, Tensor({n, hs}), Tensor({n, hs}),
                                 Tensor({n, hs}), Tensor({n, hs}), Tensor({n, hs})}};
  std::vector<double> z(4 * hs);
  for (std::size_t s = 0; s < n; ++s) {
    const double* xs = x.ptr() + s * d;
    const double* hp = h_prev.ptr() + s * hs;
    for (std::size_t k = 0; k < 4 * hs; ++k) {
      double acc = cell.b[k];
      const double* wr = cell.w.ptr() + k * d;
      for (std::size_t j = 0; j < d; ++j) acc += wr[j] * xs[j];
      const double* ur = cell.u.ptr() + k * hs;
      for (std::size_t j = 0; j < hs; ++j) acc += ur[j] * hp[j];
      z[k] = acc;
    }
    for (std::size_t k = 0; k < hs; ++k) {
      const std::size_t idx = s * hs + k;
      const double ig = sigmoid(z[k]);
      const double fg = sigmoid(z[hs + k]);
      const double gg = std::tanh(z[2 * hs + k]);
      const double og = sigmoid(z[3 * hs + k]);
      const double c = fg * c_prev[idx] + ig * gg;
      const double tc = std::tanh(c);
      r.cache.i[idx] = ig;
      r.cache.f[idx] = fg;
      r.cache.g[idx] = gg;
      r.cache.o[idx] = og;
      r.cache.tanh_c[idx] = tc;
      r.c[idx] = c;
      r.h[idx] = og * tc;
    }
  }
  return r;
}

// Accumulates parameter gradients into `acc`; writes gradients w.r.t. x,
// h_prev and c_prev into the output tensors.
inline void lstm_step_backward_into(const LstmCell& cell, const LstmStepCache& cache,
                                    const Tensor& grad_h, const Tensor& grad_c, LstmGrads& acc,
                                    Tensor& grad_x, Tensor& grad_h_prev, Tensor& grad_c_prev) {
  const std::size_t d = cell.input_size, hs = cell.hidden_size, n = cache.x.dim(0);
  require_shape(grad_h, {n, hs}, "lstm hidden-state gradient");
  require_shape(grad_c, {n, hs}, "lstm cell-state gradient");
  grad_x = Tensor({n, d});
  grad_h_prev = Tensor({n, hs});
  grad_c_prev = Tensor({n, hs});
  std::vector<double> dz(4 * hs);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t k = 0; k < hs; ++k) {
      const std::size_t idx = s * hs + k;
      const double ig = cache.i[idx], fg = cache.f[idx], gg = cache.g[idx], og = cache.o[idx];
      const double tc = cache.tanh_c[idx];
      const double dh = grad_h[idx];
      const double dc = grad_c[idx] + dh * og * (1.0 - tc * tc);
      dz[k] = dc * gg * ig * (1.0 - ig);
      dz[hs + k] = dc * cache.c_prev[idx] * fg * (1.0 - fg);
      dz[2 * hs + k] = dc * ig * (1.0 - gg * gg);
      dz[3 * hs + k] = dh * tc * og * (1.0 - og);
      grad_c_prev[idx] = dc * fg;
    }
    const double* xs = cache.x.ptr() + s * d;
    const double* hp = cache.h_prev.ptr() + s * hs;
    double* gx = grad_x.ptr() + s * d;
    double* gh = grad_h_prev.ptr() + s * hs;
    for (std::size_t k = 0; k < 4 * hs; ++k) {
      const double g = dz[k];
      if (g == 0.0) continue;
      acc.b[k] += g;
      double* gw = acc.w.ptr() + k * d;
      const double* wr = cell.w.ptr() + k * d;
      for (std::size_t j = 0; j < d; ++j) {
        gw[j] += g * xs[j];
        gx[j] += g * wr[j];
      }
      double* gu = acc.u.ptr() + k * hs;
      const double* ur = cell.u.ptr() + k * hs;
      for (std::size_t j = 0; j < hs; ++j) {
        gu[j] += g * hp[j];
        gh[j] += g * ur[j];
      }
    }
  }
}

inline LstmStepGrads lstm_step_backward(const LstmCell& cell, const LstmStepCache& cache,
                                        const Tensor& grad_h, const Tensor& grad_c) {
  LstmGrads acc(cell);
  LstmStepGrads out;
  lstm_step_backward_into(cell, cache, grad_h, grad_c, acc, out.x, out.h_prev, out.c_prev);
  out.w = std::move(acc.w);
  out.u = std::move(acc.u);
  out.b = std::move(acc.b);
  return out;
}

// Runs a cell over an N x T x D sequence from zero state, returning the
// N x T x H hidden states.
struct LstmSequenceCache {
  std::vector<LstmStepCache> steps;
};

inline Tensor lstm_sequence_forward(const LstmCell& cell, const Tensor& input,
                                    LstmSequenceCache* cache = nullptr) {
  require_rank(input, 3, "lstm sequence input");
  const std::size_t n = input.dim(0), t_len = input.dim(1), d = input.dim(2);
  const std::size_t hs = cell.hidden_size;
  if (d != cell.input_size)
    fail(ErrorKind::ShapeMismatch, "lstm sequence has " + std::to_string(d) +
                                       " features, cell expects " + std::to_string(cell.input_size));
  Tensor out({n, t_len, hs});
  Tensor h({n, hs}), c({n, hs});
  Tensor xt({n, d});
  if (cache) {
    cache->steps.clear();
    cache->steps.reserve(t_len);
  }
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t s = 0; s < n; ++s)
      std::copy_n(input.ptr() + (s * t_len + t) * d, d, xt.ptr() + s * d);
    auto step = lstm_step(cell, xt, h, c);
    for (std::size_t s = 0; s < n; ++s)
      std::copy_n(step.h.ptr() + s * hs, hs, out.ptr() + (s * t_len + t) * hs);
    h = std::move(step.h);
    c = std::move(step.c);
    if (cache) cache->steps.push_back(std::move(step.cache));
  }
  return out;
}

// Backpropagation through time. `grad_out` is N x T x H; returns N x T x D.
inline Tensor lstm_sequence_backward(const LstmCell& cell, const LstmSequenceCache& cache,
                                     const Tensor& grad_out, LstmGrads& acc) {
  const std::size_t t_len = cache.steps.size();
  if (t_len == 0) fail(ErrorKind::ShapeMismatch, "lstm backward without a forward pass");
  const std::size_t n = cache.steps.front().x.dim(0), d = cell.input_size, hs = cell.hidden_size;
  require_shape(grad_out, {n, t_len, hs}, "lstm sequence gradient");
  Tensor grad_in({n, t_len, d});
  Tensor dh_next({n, hs}), dc_next({n, hs});
  Tensor dh({n, hs});
  Tensor gx, gh, gc;
  for (std::size_t t = t_len; t-- > 0;) {
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t k = 0; k < hs; ++k)
        dh[s * hs + k] = grad_out[(s * t_len + t) * hs + k] + dh_next[s * hs + k];
    lstm_step_backward_into(cell, cache.steps[t], dh, dc_next, acc, gx, gh, gc);
    for (std::size_t s = 0; s < n; ++s)
      std::copy_n(gx.ptr() + s * d, d, grad_in.ptr() + (s * t_len + t) * d);
    dh_next = std::move(gh);
    dc_next = std::move(gc);
  }
  return grad_in;
}

}  // namespace gal::nn
