// Trainable scorer: feature extractor and encoder stacks of affine+tanh
// layers and an affine scalar head, with exact analytic backward passes.
// The fusion model maps the K per-predictor scores to one MOS estimate.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mospc/common.hpp"
#include "mospc/rng.hpp"

namespace mospc {

struct AffineLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> w;  // row-major, out_dim x in_dim
  std::vector<double> b;  // out_dim
};

struct Predictor {
  std::vector<AffineLayer> extractor;  // each affine followed by tanh
  std::vector<AffineLayer> encoder;    // each affine followed by tanh
  AffineLayer head;                    // affine to a single scalar
};

struct FusionModel {
  std::vector<double> weights;
  double bias = 0.0;
};

inline std::size_t predictor_input_dim(const Predictor& p) {
  if (!p.extractor.empty()) {
    return p.extractor.front().in_dim;
  }
  if (!p.encoder.empty()) {
    return p.encoder.front().in_dim;
  }
  return p.head.in_dim;
}

inline std::size_t embedding_dim(const Predictor& p) {
  if (!p.extractor.empty()) {
    return p.extractor.back().out_dim;
  }
  return predictor_input_dim(p);
}

inline void validate_predictor(const Predictor& p) {
  std::size_t dim = predictor_input_dim(p);
  auto check_stack = [&dim](const std::vector<AffineLayer>& layers, const char* name) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const AffineLayer& l = layers[i];
      if (l.in_dim != dim || l.w.size() != l.in_dim * l.out_dim || l.b.size() != l.out_dim) {
        throw Error(std::string("predictor: bad ") + name + " layer " + std::to_string(i));
      }
      dim = l.out_dim;
    }
  };
  check_stack(p.extractor, "extractor");
  check_stack(p.encoder, "encoder");
  if (p.head.in_dim != dim || p.head.out_dim != 1 || p.head.w.size() != dim ||
      p.head.b.size() != 1) {
    throw Error("predictor: bad head layer");
  }
}

inline AffineLayer make_affine(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  AffineLayer l;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  l.w.resize(in_dim * out_dim);
  l.b.resize(out_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (double& v : l.w) {
    v = rng.uniform(-bound, bound);
  }
  for (double& v : l.b) {
    v = rng.uniform(-bound, bound);
  }
  return l;
}

// Hidden widths chain input_dim -> extractor -> encoder -> 1.
inline Predictor make_predictor(std::size_t input_dim,
                                const std::vector<std::size_t>& extractor_widths,
                                const std::vector<std::size_t>& encoder_widths, Rng& rng) {
  Predictor p;
  std::size_t dim = input_dim;
  for (std::size_t w : extractor_widths) {
    p.extractor.push_back(make_affine(dim, w, rng));
    dim = w;
  }
  for (std::size_t w : encoder_widths) {
    p.encoder.push_back(make_affine(dim, w, rng));
    dim = w;
  }
  p.head = make_affine(dim, 1, rng);
  validate_predictor(p);
  return p;
}

inline std::vector<double> affine_apply(const AffineLayer& l, std::span<const double> x) {
  if (x.size() != l.in_dim) {
    throw Error("affine: input dimension mismatch, expected " + std::to_string(l.in_dim) +
                ", got " + std::to_string(x.size()));
  }
  std::vector<double> z(l.out_dim);
  for (std::size_t o = 0; o < l.out_dim; ++o) {
    double acc = l.b[o];
    const double* row = l.w.data() + o * l.in_dim;
    for (std::size_t i = 0; i < l.in_dim; ++i) {
      acc += row[i] * x[i];
    }
    z[o] = acc;
  }
  return z;
}

// acts[0] is the stack input, acts[k+1] the tanh output of layer k.
struct StackCache {
  std::vector<std::vector<double>> acts;
};

inline std::vector<double> stack_forward(const std::vector<AffineLayer>& layers,
                                         std::span<const double> x, StackCache* cache) {
  std::vector<double> cur(x.begin(), x.end());
  if (cache != nullptr) {
    cache->acts.clear();
    cache->acts.push_back(cur);
  }
  for (const AffineLayer& l : layers) {
    std::vector<double> z = affine_apply(l, cur);
    for (double& v : z) {
      v = std::tanh(v);
    }
    cur = std::move(z);
    if (cache != nullptr) {
      cache->acts.push_back(cur);
    }
  }
  return cur;
}

struct EncoderCache {
  StackCache stack;  // acts[0] = embedding
  double score = 0.0;
};

struct ForwardCache {
  StackCache extractor;  // acts[0] = raw features
  EncoderCache enc;
};

inline std::vector<double> extractor_forward(const Predictor& p, std::span<const double> x) {
  return stack_forward(p.extractor, x, nullptr);
}

inline std::pair<double, EncoderCache> encoder_forward_from_embedding(const Predictor& p,
                                                                      std::span<const double> e) {
  EncoderCache cache;
  const std::vector<double> h = stack_forward(p.encoder, e, &cache.stack);
  cache.score = affine_apply(p.head, h)[0];
  return {cache.score, std::move(cache)};
}

inline std::pair<double, ForwardCache> predictor_forward(const Predictor& p,
                                                         std::span<const double> x) {
  ForwardCache cache;
  const std::vector<double> e = stack_forward(p.extractor, x, &cache.extractor);
  auto [score, enc] = encoder_forward_from_embedding(p, e);
  cache.enc = std::move(enc);
  return {score, std::move(cache)};
}

struct LayerGrads {
  std::vector<double> w;
  std::vector<double> b;
};

struct PredictorGradients {
  std::vector<LayerGrads> extractor;
  std::vector<LayerGrads> encoder;
  LayerGrads head;
};

// Gradients for the encoder and head only, plus the derivative with respect
// to the embedding for chaining into the extractor.
struct EncoderBackward {
  std::vector<LayerGrads> encoder;
  LayerGrads head;
  std::vector<double> d_embedding;
};

inline LayerGrads affine_backward(const AffineLayer& l, std::span<const double> input,
                                  std::span<const double> d_out, std::vector<double>* d_input) {
  LayerGrads g;
  g.w.assign(l.in_dim * l.out_dim, 0.0);
  g.b.assign(l.out_dim, 0.0);
  if (d_input != nullptr) {
    d_input->assign(l.in_dim, 0.0);
  }
  for (std::size_t o = 0; o < l.out_dim; ++o) {
    const double d = d_out[o];
    g.b[o] = d;
    double* gw = g.w.data() + o * l.in_dim;
    const double* row = l.w.data() + o * l.in_dim;
    for (std::size_t i = 0; i < l.in_dim; ++i) {
      gw[i] = d * input[i];
      if (d_input != nullptr) {
        (*d_input)[i] += d * row[i];
      }
    }
  }
  return g;
}

inline std::vector<LayerGrads> stack_backward(const std::vector<AffineLayer>& layers,
                                              const StackCache& cache,
                                              std::vector<double> d_out,
                                              std::vector<double>* d_input) {
  std::vector<LayerGrads> grads(layers.size());
  for (std::size_t k = layers.size(); k-- > 0;) {
    // through tanh: dz = d_out * (1 - a^2)
    const std::vector<double>& a = cache.acts[k + 1];
    for (std::size_t o = 0; o < d_out.size(); ++o) {
      d_out[o] *= 1.0 - a[o] * a[o];
    }
    std::vector<double> d_in;
    grads[k] = affine_backward(layers[k], cache.acts[k], d_out, &d_in);
    d_out = std::move(d_in);
  }
  if (d_input != nullptr) {
    *d_input = std::move(d_out);
  }
  return grads;
}

inline EncoderBackward encoder_backward_from_embedding(const Predictor& p,
                                                       const EncoderCache& cache,
                                                       double upstream) {
  EncoderBackward out;
  std::vector<double> d_head_in;
  const std::vector<double> d_score = {upstream};
  out.head = affine_backward(p.head, cache.stack.acts.back(), d_score, &d_head_in);
  out.encoder = stack_backward(p.encoder, cache.stack, std::move(d_head_in), &out.d_embedding);
  return out;
}

inline PredictorGradients predictor_backward(const Predictor& p, const ForwardCache& cache,
                                             double upstream) {
  PredictorGradients g;
  EncoderBackward enc = encoder_backward_from_embedding(p, cache.enc, upstream);
  g.encoder = std::move(enc.encoder);
  g.head = std::move(enc.head);
  g.extractor = stack_backward(p.extractor, cache.extractor, std::move(enc.d_embedding), nullptr);
  return g;
}

inline PredictorGradients zero_gradients(const Predictor& p) {
  PredictorGradients g;
  auto zero_stack = [](const std::vector<AffineLayer>& layers) {
    std::vector<LayerGrads> gs(layers.size());
    for (std::size_t k = 0; k < layers.size(); ++k) {
      gs[k].w.assign(layers[k].w.size(), 0.0);
      gs[k].b.assign(layers[k].b.size(), 0.0);
    }
    return gs;
  };
  g.extractor = zero_stack(p.extractor);
  g.encoder = zero_stack(p.encoder);
  g.head.w.assign(p.head.w.size(), 0.0);
  g.head.b.assign(p.head.b.size(), 0.0);
  return g;
}

inline void add_scaled(std::vector<double>& acc, const std::vector<double>& g, double scale) {
  for (std::size_t i = 0; i < acc.size(); ++i) {
    acc[i] += scale * g[i];
  }
}

inline void add_scaled(PredictorGradients& acc, const PredictorGradients& g, double scale) {
  for (std::size_t k = 0; k < acc.extractor.size(); ++k) {
    add_scaled(acc.extractor[k].w, g.extractor[k].w, scale);
    add_scaled(acc.extractor[k].b, g.extractor[k].b, scale);
  }
  for (std::size_t k = 0; k < acc.encoder.size(); ++k) {
    add_scaled(acc.encoder[k].w, g.encoder[k].w, scale);
    add_scaled(acc.encoder[k].b, g.encoder[k].b, scale);
  }
  add_scaled(acc.head.w, g.head.w, scale);
  add_scaled(acc.head.b, g.head.b, scale);
}

// Visits parameter vectors paired with their gradient vectors, extractor
// first, in a fixed order.
template <typename Fn>
void for_each_param(Predictor& p, const PredictorGradients& g, Fn&& fn) {
  for (std::size_t k = 0; k < p.extractor.size(); ++k) {
    fn(p.extractor[k].w, g.extractor[k].w);
    fn(p.extractor[k].b, g.extractor[k].b);
  }
  for (std::size_t k = 0; k < p.encoder.size(); ++k) {
    fn(p.encoder[k].w, g.encoder[k].w);
    fn(p.encoder[k].b, g.encoder[k].b);
  }
  fn(p.head.w, g.head.w);
  fn(p.head.b, g.head.b);
}

inline double fusion_forward(const FusionModel& f, std::span<const double> scores) {
  if (scores.size() != f.weights.size()) {
    throw Error("fusion_forward: expected " + std::to_string(f.weights.size()) + " scores, got " +
                std::to_string(scores.size()));
  }
  double m = f.bias;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    m += f.weights[k] * scores[k];
  }
  return m;
}

inline FusionModel make_fusion(std::size_t n_predictors) {
  FusionModel f;
  f.weights.assign(n_predictors, 1.0 / static_cast<double>(n_predictors));
  f.bias = 0.0;
  return f;
}

}  // namespace mospc
