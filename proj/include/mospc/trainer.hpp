// Staged training: the pairwise comparison stage, the optional C-Mixup stage
// (encoder and head only) and the fusion stage, all with plain SGD and early
// stopping on validation L1. Each run is fully determined by (seed, config,
// data); the random stream is consumed only by shuffles, pairing, partner
// sampling and lambda draws, in that order.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mospc/cmixup.hpp"
#include "mospc/common.hpp"
#include "mospc/dataset.hpp"
#include "mospc/losses.hpp"
#include "mospc/model.hpp"
#include "mospc/pairing.hpp"
#include "mospc/rng.hpp"

namespace mospc {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 8;
  std::size_t max_epochs = 1000;
  std::size_t patience = 20;
  double beta = 0.6;
  std::optional<CMixupConfig> cmixup;
  std::uint64_t seed = 0;
};

inline void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) {
    throw Error("TrainConfig: learning_rate must be positive");
  }
  if (cfg.batch_size == 0 || cfg.max_epochs == 0 || cfg.patience == 0) {
    throw Error("TrainConfig: batch_size, max_epochs and patience must be positive");
  }
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) {
    throw Error("TrainConfig: beta must lie in [0,1]");
  }
}

enum class StopReason { patience_exhausted, max_epochs };

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_l1 = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_valid_l1 = std::numeric_limits<double>::infinity();
  StopReason stop_reason = StopReason::max_epochs;
};

inline std::string train_log_to_csv(const TrainLog& log) {
  std::string out = "epoch,train_loss,valid_l1\n";
  for (const EpochRecord& r : log.epochs) {
    out += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," +
           format_double(r.valid_l1) + "\n";
  }
  return out;
}

// theta <- theta - lr * g. Rejects non-finite gradients and checks the
// updated parameters stay finite.
inline void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size()) {
    throw Error("sgd_step: shape mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw Error("sgd_step: non-finite gradient at index " + std::to_string(i));
    }
    params[i] -= lr * grads[i];
    if (!std::isfinite(params[i])) {
      throw Error("sgd_step: parameter became non-finite at index " + std::to_string(i));
    }
  }
}

inline void apply_sgd(Predictor& p, const PredictorGradients& g, double lr) {
  for_each_param(p, g, [lr](std::vector<double>& params, const std::vector<double>& grads) {
    sgd_step(params, grads, lr);
  });
}

inline std::vector<double> predict_scores(const Predictor& p, const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.samples.size());
  for (const SpeechSample& s : ds.samples) {
    out.push_back(predictor_forward(p, s.features).first);
  }
  return out;
}

inline std::vector<double> predict_fused(const std::vector<Predictor>& predictors,
                                         const FusionModel& f, const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.samples.size());
  std::vector<double> scores(predictors.size());
  for (const SpeechSample& s : ds.samples) {
    for (std::size_t k = 0; k < predictors.size(); ++k) {
      scores[k] = predictor_forward(predictors[k], s.features).first;
    }
    out.push_back(fusion_forward(f, scores));
  }
  return out;
}

inline std::vector<double> dataset_labels(const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.samples.size());
  for (const SpeechSample& s : ds.samples) {
    out.push_back(s.mos);
  }
  return out;
}

inline double mean_abs_error(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw Error("mean_abs_error: bad input lengths");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    acc += std::abs(pred[i] - truth[i]);
  }
  return acc / static_cast<double>(pred.size());
}

inline double validation_l1(const Predictor& p, const Dataset& valid) {
  return mean_abs_error(predict_scores(p, valid), dataset_labels(valid));
}

namespace detail {

inline void check_train_inputs(const Predictor& p, const Dataset& train, const Dataset& valid) {
  if (train.samples.empty() || valid.samples.empty()) {
    throw Error("train: empty dataset");
  }
  if (train.feature_dim != predictor_input_dim(p) || valid.feature_dim != train.feature_dim) {
    throw Error("train: feature dimension mismatch");
  }
}

// Shared early-stopping bookkeeping. Returns true when training should stop;
// on validation ties the earlier epoch keeps the crown.
template <typename Model>
bool update_best(std::size_t epoch, double valid_l1, const Model& current, Model& best,
                 TrainLog& log, std::size_t patience) {
  if (valid_l1 < log.best_valid_l1) {
    log.best_valid_l1 = valid_l1;
    log.best_epoch = epoch;
    best = current;
  }
  return epoch - log.best_epoch >= patience;
}

}  // namespace detail

// Pair comparison stage: every minibatch is paired up, both branches share
// parameters, so each sample's gradient is the sum of its pair contributions.
// Batch loss is the mean over pairs.
inline TrainLog train_predictor_pairwise(Predictor& p, const Dataset& train, const Dataset& valid,
                                         const TrainConfig& cfg) {
  validate(cfg);
  detail::check_train_inputs(p, train, valid);
  Rng rng(cfg.seed);
  TrainLog log;
  Predictor best = p;
  const std::size_t n = train.samples.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t pair_count = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t chunk = std::min(cfg.batch_size, n - start);
      const PairBatch pb = make_pairs(chunk, rng);
      if (pb.pairs.empty()) {
        continue;
      }
      std::vector<double> scores(chunk);
      std::vector<ForwardCache> caches(chunk);
      for (std::size_t c = 0; c < chunk; ++c) {
        auto [m, cache] = predictor_forward(p, train.samples[order[start + c]].features);
        scores[c] = m;
        caches[c] = std::move(cache);
      }
      const double inv_pairs = 1.0 / static_cast<double>(pb.pairs.size());
      std::vector<double> d_score(chunk, 0.0);
      for (const auto& [a, b] : pb.pairs) {
        const double y_a = train.samples[order[start + a]].mos;
        const double y_b = train.samples[order[start + b]].mos;
        const PairLossValue v = pair_loss(scores[a], scores[b], y_a, y_b, {cfg.beta});
        loss_sum += v.total;
        d_score[a] += v.grad_mi * inv_pairs;
        d_score[b] += v.grad_mj * inv_pairs;
      }
      pair_count += pb.pairs.size();
      PredictorGradients grads = zero_gradients(p);
      for (std::size_t c = 0; c < chunk; ++c) {
        add_scaled(grads, predictor_backward(p, caches[c], d_score[c]), 1.0);
      }
      apply_sgd(p, grads, cfg.learning_rate);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = pair_count > 0 ? loss_sum / static_cast<double>(pair_count) : 0.0;
    rec.valid_l1 = validation_l1(p, valid);
    log.epochs.push_back(rec);
    if (detail::update_best(epoch, rec.valid_l1, p, best, log, cfg.patience)) {
      log.stop_reason = StopReason::patience_exhausted;
      break;
    }
  }
  p = best;
  return log;
}

// C-Mixup stage: partners are drawn from the whole training set by label
// proximity, embeddings and labels are mixed, and only the encoder and head
// receive updates. Early stopping watches the unmixed validation L1.
inline TrainLog train_predictor_cmixup(Predictor& p, const Dataset& train, const Dataset& valid,
                                       const TrainConfig& cfg) {
  validate(cfg);
  detail::check_train_inputs(p, train, valid);
  if (!cfg.cmixup) {
    throw Error("train_predictor_cmixup: cfg.cmixup missing");
  }
  if (train.samples.size() < 2) {
    throw Error("train_predictor_cmixup: need at least 2 training samples");
  }
  const CMixupConfig& mix_cfg = *cfg.cmixup;
  if (!(mix_cfg.bandwidth > 0.0) || !(mix_cfg.alpha > 0.0)) {
    throw Error("CMixupConfig: bandwidth and alpha must be positive");
  }
  const std::vector<double> labels = dataset_labels(train);
  Rng rng(cfg.seed);
  TrainLog log;
  Predictor best = p;
  const std::size_t n = train.samples.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t chunk = std::min(cfg.batch_size, n - start);
      const double inv_chunk = 1.0 / static_cast<double>(chunk);
      std::vector<LayerGrads> enc_grads;
      LayerGrads head_grads;
      bool first = true;
      for (std::size_t c = 0; c < chunk; ++c) {
        const std::size_t i = order[start + c];
        const std::size_t j = sample_partner(i, labels, mix_cfg.bandwidth, rng);
        const double lambda =
            mix_cfg.lambda_override ? *mix_cfg.lambda_override : draw_lambda(mix_cfg.alpha, rng);
        const std::vector<double> e_i = extractor_forward(p, train.samples[i].features);
        const std::vector<double> e_j = extractor_forward(p, train.samples[j].features);
        auto [e_mix, y_mix] = mix(e_i, e_j, labels[i], labels[j], lambda);
        auto [m, cache] = encoder_forward_from_embedding(p, e_mix);
        loss_sum += std::abs(m - y_mix);
        EncoderBackward eb =
            encoder_backward_from_embedding(p, cache, sign_or_zero(m - y_mix) * inv_chunk);
        if (first) {
          enc_grads = std::move(eb.encoder);
          head_grads = std::move(eb.head);
          first = false;
        } else {
          for (std::size_t k = 0; k < enc_grads.size(); ++k) {
            add_scaled(enc_grads[k].w, eb.encoder[k].w, 1.0);
            add_scaled(enc_grads[k].b, eb.encoder[k].b, 1.0);
          }
          add_scaled(head_grads.w, eb.head.w, 1.0);
          add_scaled(head_grads.b, eb.head.b, 1.0);
        }
      }
      for (std::size_t k = 0; k < p.encoder.size(); ++k) {
        sgd_step(p.encoder[k].w, enc_grads[k].w, cfg.learning_rate);
        sgd_step(p.encoder[k].b, enc_grads[k].b, cfg.learning_rate);
      }
      sgd_step(p.head.w, head_grads.w, cfg.learning_rate);
      sgd_step(p.head.b, head_grads.b, cfg.learning_rate);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.valid_l1 = validation_l1(p, valid);
    log.epochs.push_back(rec);
    if (detail::update_best(epoch, rec.valid_l1, p, best, log, cfg.patience)) {
      log.stop_reason = StopReason::patience_exhausted;
      break;
    }
  }
  p = best;
  return log;
}

// Fusion stage: predictor scores are precomputed once (predictors frozen),
// then the affine fusion map is fit with SGD on L1.
inline TrainLog train_fusion(FusionModel& f, const std::vector<Predictor>& predictors,
                             const Dataset& train, const Dataset& valid, const TrainConfig& cfg) {
  validate(cfg);
  if (predictors.empty()) {
    throw Error("train_fusion: need at least one predictor");
  }
  if (f.weights.size() != predictors.size()) {
    throw Error("train_fusion: fusion width != number of predictors");
  }
  if (train.samples.empty() || valid.samples.empty()) {
    throw Error("train: empty dataset");
  }
  const std::size_t k_pred = predictors.size();
  const std::size_t n = train.samples.size();
  std::vector<std::vector<double>> train_scores(k_pred), valid_scores(k_pred);
  for (std::size_t k = 0; k < k_pred; ++k) {
    train_scores[k] = predict_scores(predictors[k], train);
    valid_scores[k] = predict_scores(predictors[k], valid);
  }
  const std::vector<double> train_y = dataset_labels(train);
  const std::vector<double> valid_y = dataset_labels(valid);

  auto fused_valid_l1 = [&]() {
    double acc = 0.0;
    std::vector<double> s(k_pred);
    for (std::size_t i = 0; i < valid_y.size(); ++i) {
      for (std::size_t k = 0; k < k_pred; ++k) {
        s[k] = valid_scores[k][i];
      }
      acc += std::abs(fusion_forward(f, s) - valid_y[i]);
    }
    return acc / static_cast<double>(valid_y.size());
  };

  Rng rng(cfg.seed);
  TrainLog log;
  FusionModel best = f;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  std::vector<double> scores(k_pred);
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t chunk = std::min(cfg.batch_size, n - start);
      const double inv_chunk = 1.0 / static_cast<double>(chunk);
      std::vector<double> grad_w(k_pred, 0.0);
      double grad_b = 0.0;
      for (std::size_t c = 0; c < chunk; ++c) {
        const std::size_t i = order[start + c];
        for (std::size_t k = 0; k < k_pred; ++k) {
          scores[k] = train_scores[k][i];
        }
        const double err = fusion_forward(f, scores) - train_y[i];
        loss_sum += std::abs(err);
        const double up = sign_or_zero(err) * inv_chunk;
        for (std::size_t k = 0; k < k_pred; ++k) {
          grad_w[k] += up * scores[k];
        }
        grad_b += up;
      }
      sgd_step(f.weights, grad_w, cfg.learning_rate);
      sgd_step(std::span<double>(&f.bias, 1), std::span<const double>(&grad_b, 1),
               cfg.learning_rate);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.valid_l1 = fused_valid_l1();
    log.epochs.push_back(rec);
    if (detail::update_best(epoch, rec.valid_l1, f, best, log, cfg.patience)) {
      log.stop_reason = StopReason::patience_exhausted;
      break;
    }
  }
  f = best;
  return log;
}

}  // namespace mospc
