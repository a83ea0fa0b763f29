#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gal/error.hpp"
#include "gal/nn/tensor.hpp"
#include "gal/random.hpp"

namespace gal::nn {

enum class Mode { Train, Inference };

// ---------------------------------------------------------------------------
// Conv2d: input N x C_in x H x W, cross-correlation with zero padding.

struct Conv2dLayer {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t stride = 1;
  std::size_t padding = 0;
  Tensor weight;  // out x in x kh x kw
  Tensor bias;    // out

  Conv2dLayer() = default;
  Conv2dLayer(std::size_t in, std::size_t out, std::size_t kh, std::size_t kw,
              std::size_t stride_ = 1, std::size_t padding_ = 0)
      : in_channels(in),
        out_channels(out),
        kernel_h(kh),
        kernel_w(kw),
        stride(stride_),
        padding(padding_),
        weight({out, in, kh, kw}),
        bias({out}) {
    if (in == 0 || out == 0 || kh == 0 || kw == 0 || stride_ == 0)
      fail(ErrorKind::InvalidArgument, "conv dimensions and stride must be >= 1");
  }

  std::size_t out_dim(std::size_t in, std::size_t k) const {
    if (in + 2 * padding < k)
      fail(ErrorKind::ShapeMismatch, "conv input dimension " + std::to_string(in) +
                                         " too small for kernel " + std::to_string(k));
    return (in + 2 * padding - k) / stride + 1;
  }
  std::size_t out_h(std::size_t h) const { return out_dim(h, kernel_h); }
  std::size_t out_w(std::size_t w) const { return out_dim(w, kernel_w); }
  std::size_t parameter_count() const { return weight.size() + bias.size(); }
};

struct Conv2dGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};

namespace detail {

// Range of output positions o with 0 <= o*stride + k - pad < in.
inline std::pair<std::size_t, std::size_t> valid_range(std::size_t out, std::size_t in,
                                                       std::size_t k, std::size_t stride,
                                                       std::size_t pad) {
  // lo = ceil((pad - k) / stride) clamped at 0
  std::size_t lo = 0;
  if (pad > k) lo = (pad - k + stride - 1) / stride;
  // hi: largest o with o*stride + k - pad <= in - 1
  if (in + pad < k + 1) return {1, 0};
  std::size_t hi = (in + pad - k - 1) / stride;
  hi = std::min(hi, out - 1);
  return {lo, hi};
}

}  // namespace detail

inline Tensor conv2d_forward(const Conv2dLayer& layer, const Tensor& input) {
  require_rank(input, 4, "conv input");
  if (input.dim(1) != layer.in_channels)
    fail(ErrorKind::ShapeMismatch, "conv input has " + std::to_string(input.dim(1)) +
                                       " channels, layer expects " +
                                       std::to_string(layer.in_channels));
  const std::size_t n = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
  const std::size_t oh = layer.out_h(h), ow = layer.out_w(w);
  const std::size_t s = layer.stride, p = layer.padding;
  Tensor out({n, layer.out_channels, oh, ow});
  const double* in = input.ptr();
  const double* wt = layer.weight.ptr();
  double* o = out.ptr();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oc = 0; oc < layer.out_channels; ++oc) {
      double* oplane = o + (b * layer.out_channels + oc) * oh * ow;
      std::fill(oplane, oplane + oh * ow, layer.bias[oc]);
      for (std::size_t ic = 0; ic < cin; ++ic) {
        const double* iplane = in + (b * cin + ic) * h * w;
        for (std::size_t ki = 0; ki < layer.kernel_h; ++ki) {
          const auto [r0, r1] = detail::valid_range(oh, h, ki, s, p);
          for (std::size_t kj = 0; kj < layer.kernel_w; ++kj) {
            const auto [c0, c1] = detail::valid_range(ow, w, kj, s, p);
            const double wv = wt[((oc * cin + ic) * layer.kernel_h + ki) * layer.kernel_w + kj];
            for (std::size_t r = r0; r <= r1; ++r) {
              const double* irow = iplane + (r * s + ki - p) * w;
              double* orow = oplane + r * ow;
              for (std::size_t c = c0; c <= c1; ++c) orow[c] += wv * irow[c * s + kj - p];
            }
          }
        }
      }
    }
  }
  return out;
}

inline Conv2dGrads conv2d_backward(const Conv2dLayer& layer, const Tensor& input,
                                   const Tensor& grad_out) {
  require_rank(input, 4, "conv input");
  const std::size_t n = input.dim(0), cin = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (cin != layer.in_channels) fail(ErrorKind::ShapeMismatch, "conv backward: channel mismatch");
  const std::size_t oh = layer.out_h(h), ow = layer.out_w(w);
  require_shape(grad_out, {n, layer.out_channels, oh, ow}, "conv upstream gradient");
  const std::size_t s = layer.stride, p = layer.padding;

  Conv2dGrads g{Tensor(input.shape()), Tensor(layer.weight.shape()), Tensor(layer.bias.shape())};
  const double* in = input.ptr();
  const double* go = grad_out.ptr();
  const double* wt = layer.weight.ptr();
  double* gi = g.input.ptr();
  double* gw = g.weight.ptr();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oc = 0; oc < layer.out_channels; ++oc) {
      const double* gplane = go + (b * layer.out_channels + oc) * oh * ow;
      double bsum = 0.0;
      for (std::size_t i = 0; i < oh * ow; ++i) bsum += gplane[i];
      g.bias[oc] += bsum;
      for (std::size_t ic = 0; ic < cin; ++ic) {
        const double* iplane = in + (b * cin + ic) * h * w;
        double* giplane = gi + (b * cin + ic) * h * w;
        for (std::size_t ki = 0; ki < layer.kernel_h; ++ki) {
          const auto [r0, r1] = detail::valid_range(oh, h, ki, s, p);
          for (std::size_t kj = 0; kj < layer.kernel_w; ++kj) {
            const auto [c0, c1] = detail::valid_range(ow, w, kj, s, p);
            const std::size_t widx = ((oc * cin + ic) * layer.kernel_h + ki) * layer.kernel_w + kj;
            const double wv = wt[widx];
            double acc = 0.0;
            for (std::size_t r = r0; r <= r1; ++r) {
              const std::size_t irow = (r * s + ki - p) * w;
              const double* grow = gplane + r * ow;
              for (std::size_t c = c0; c <= c1; ++c) {
                const std::size_t ii = irow + c * s + kj - p;
                acc += grow[c] * iplane[ii];
                giplane[ii] += wv * grow[c];
              }
            }
            gw[widx] += acc;
          }
        }
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// BatchNorm over channel axis 1 of an N x C x ... tensor.

struct BatchNormLayer {
  std::size_t channels = 0;
  double epsilon = 1e-5;
  double momentum = 0.1;
  Tensor gamma;
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;

  BatchNormLayer() = default;
  explicit BatchNormLayer(std::size_t c, double eps = 1e-5, double mom = 0.1)
      : channels(c),
        epsilon(eps),
        momentum(mom),
        gamma({c}, 1.0),
        beta({c}, 0.0),
        running_mean({c}, 0.0),
        running_var({c}, 1.0) {
    if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "batchnorm epsilon must be positive");
  }

  std::size_t parameter_count() const { return gamma.size() + beta.size(); }
};

struct BatchNormCache {
  Tensor normalized;        // x_hat
  std::vector<double> inv_std;  // per channel, 1 / sqrt(var + eps)
  Mode mode = Mode::Train;
};

struct BatchNormGrads {
  Tensor input;
  Tensor gamma;
  Tensor beta;
};

namespace detail {
inline std::size_t inner_size(const Tensor& t) {
  std::size_t s = 1;
  for (std::size_t i = 2; i < t.rank(); ++i) s *= t.dim(i);
  return s;
}
}  // namespace detail

// Train mode normalizes by (biased) batch statistics and moves the running
// statistics toward them by `momentum`; inference uses the running ones.
inline Tensor batchnorm_forward(BatchNormLayer& layer, const Tensor& input, Mode mode,
                                BatchNormCache* cache = nullptr) {
  if (input.rank() < 2 || input.dim(1) != layer.channels)
    fail(ErrorKind::ShapeMismatch, "batchnorm input " + shape_str(input.shape()) +
                                       " does not have " + std::to_string(layer.channels) +
                                       " channels on axis 1");
  const std::size_t n = input.dim(0), c = layer.channels, inner = detail::inner_size(input);
  const std::size_t count = n * inner;
  if (mode == Mode::Train && count < 2)
    fail(ErrorKind::BatchTooSmall, "batchnorm needs at least 2 values per channel in training");

  Tensor out(input.shape());
  Tensor xhat(input.shape());
  std::vector<double> inv_std(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    double mean, var;
    if (mode == Mode::Train) {
      double sum = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const double* p = input.ptr() + (b * c + ch) * inner;
        for (std::size_t i = 0; i < inner; ++i) sum += p[i];
      }
      mean = sum / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const double* p = input.ptr() + (b * c + ch) * inner;
        for (std::size_t i = 0; i < inner; ++i) sq += (p[i] - mean) * (p[i] - mean);
      }
      var = sq / static_cast<double>(count);
      layer.running_mean[ch] = (1.0 - layer.momentum) * layer.running_mean[ch] + layer.momentum * mean;
      layer.running_var[ch] = (1.0 - layer.momentum) * layer.running_var[ch] + layer.momentum * var;
    } else {
      mean = layer.running_mean[ch];
      var = layer.running_var[ch];
    }
    const double is = 1.0 / std::sqrt(var + layer.epsilon);
    inv_std[ch] = is;
    const double g = layer.gamma[ch], bt = layer.beta[ch];
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        const double xh = (input[off + i] - mean) * is;
        xhat[off + i] = xh;
        out[off + i] = g * xh + bt;
      }
    }
  }
  if (cache) *cache = BatchNormCache{std::move(xhat), std::move(inv_std), mode};
  return out;
}

inline BatchNormGrads batchnorm_backward(const BatchNormLayer& layer, const BatchNormCache& cache,
                                         const Tensor& grad_out) {
  require_shape(grad_out, cache.normalized.shape(), "batchnorm upstream gradient");
  const std::size_t n = grad_out.dim(0), c = layer.channels, inner = detail::inner_size(grad_out);
  const double count = static_cast<double>(n * inner);
  BatchNormGrads g{Tensor(grad_out.shape()), Tensor({c}), Tensor({c})};
  for (std::size_t ch = 0; ch < c; ++ch) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        sum_g += grad_out[off + i];
        sum_gx += grad_out[off + i] * cache.normalized[off + i];
      }
    }
    g.beta[ch] = sum_g;
    g.gamma[ch] = sum_gx;
    const double scale = layer.gamma[ch] * cache.inv_std[ch];
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        if (cache.mode == Mode::Train)
          g.input[off + i] = scale * (grad_out[off + i] - sum_g / count -
                                      cache.normalized[off + i] * sum_gx / count);
        else
          g.input[off + i] = scale * grad_out[off + i];
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Dense: y = x W^T + b, x is N x in.

struct DenseLayer {
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  Tensor weight;  // out x in
  Tensor bias;    // out

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out)
      : in_features(in), out_features(out), weight({out, in}), bias({out}) {
    if (in == 0 || out == 0) fail(ErrorKind::InvalidArgument, "dense layer sizes must be >= 1");
  }
  std::size_t parameter_count() const { return weight.size() + bias.size(); }
};

struct DenseGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};

inline Tensor dense_forward(const DenseLayer& layer, const Tensor& input) {
  if (input.rank() != 2 || input.dim(1) != layer.in_features)
    fail(ErrorKind::ShapeMismatch, "dense input " + shape_str(input.shape()) + " does not have " +
                                       std::to_string(layer.in_features) + " features");
  const std::size_t n = input.dim(0), in = layer.in_features, out = layer.out_features;
  Tensor y({n, out});
  for (std::size_t b = 0; b < n; ++b) {
    const double* x = input.ptr() + b * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double* w = layer.weight.ptr() + o * in;
      double acc = layer.bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[i] * x[i];
      y[b * out + o] = acc;
    }
  }
  return y;
}

inline DenseGrads dense_backward(const DenseLayer& layer, const Tensor& input,
                                 const Tensor& grad_out) {
  const std::size_t n = input.dim(0), in = layer.in_features, out = layer.out_features;
  require_shape(grad_out, {n, out}, "dense upstream gradient");
  DenseGrads g{Tensor({n, in}), Tensor({out, in}), Tensor({out})};
  for (std::size_t b = 0; b < n; ++b) {
    const double* x = input.ptr() + b * in;
    double* gx = g.input.ptr() + b * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double go = grad_out[b * out + o];
      if (go == 0.0) continue;
      g.bias[o] += go;
      const double* w = layer.weight.ptr() + o * in;
      double* gw = g.weight.ptr() + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        gw[i] += go * x[i];
        gx[i] += go * w[i];
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Elementwise activations.

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Tensor sigmoid_forward(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y;
}

// Gradient through sigmoid given its output y.
inline Tensor sigmoid_backward(const Tensor& y, const Tensor& grad_out) {
  Tensor g(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) g[i] = grad_out[i] * y[i] * (1.0 - y[i]);
  return g;
}

inline Tensor relu_forward(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

inline Tensor relu_backward(const Tensor& x, const Tensor& grad_out) {
  Tensor g(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? grad_out[i] : 0.0;
  return g;
}

// Inverted dropout: survivors scaled by 1/(1-p). `mask` receives the per-element
// multiplier (0 or 1/(1-p)) for the backward pass.
inline Tensor dropout_forward(const Tensor& x, double p, Rng& rng, Tensor& mask) {
  if (p < 0.0 || p >= 1.0) fail(ErrorKind::InvalidArgument, "dropout rate must lie in [0, 1)");
  mask = Tensor(x.shape(), 1.0);
  Tensor y = x;
  if (p == 0.0) return y;
  std::bernoulli_distribution drop(p);
  const double keep_scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = drop(rng) ? 0.0 : keep_scale;
    y[i] = x[i] * mask[i];
  }
  return y;
}

inline Tensor dropout_backward(const Tensor& mask, const Tensor& grad_out) {
  Tensor g(grad_out.shape());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_out[i] * mask[i];
  return g;
}

}  // namespace gal::nn
