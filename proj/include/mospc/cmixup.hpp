// C-Mixup: partners are drawn with probability decaying in squared label
// distance through a Gaussian kernel, then embeddings and labels are mixed
// convexly with a Beta-distributed coefficient.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mospc/common.hpp"
#include "mospc/rng.hpp"

namespace mospc {

struct CMixupConfig {
  double bandwidth = 1.0;
  double alpha = 2.0;
  std::optional<double> lambda_override;  // test hook: fixes lambda instead of drawing
};

// w_j proportional to exp(-(y_anchor - y_j)^2 / (2 sigma^2)), normalized.
// Exponents are shifted by the smallest squared distance so the largest
// weight is exactly 1 before normalization; this cannot underflow to an
// all-zero vector.
inline std::vector<double> kernel_weights(double y_anchor, std::span<const double> candidates,
                                          double sigma) {
  if (candidates.empty()) {
    throw Error("kernel_weights: empty candidate set");
  }
  if (!(sigma > 0.0)) {
    throw Error("kernel_weights: bandwidth must be positive");
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> d2(candidates.size());
  double d2_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const double d = y_anchor - candidates[j];
    d2[j] = d * d;
    d2_min = std::min(d2_min, d2[j]);
  }
  std::vector<double> w(candidates.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = std::exp(-(d2[j] - d2_min) * inv);
    sum += w[j];
  }
  for (double& x : w) {
    x /= sum;
  }
  return w;
}

inline std::size_t sample_partner(std::size_t anchor_index, std::span<const double> labels,
                                  double sigma, Rng& rng) {
  if (labels.size() < 2) {
    throw Error("sample_partner: need at least 2 samples");
  }
  if (anchor_index >= labels.size()) {
    throw Error("sample_partner: anchor index out of range");
  }
  std::vector<double> candidates;
  std::vector<std::size_t> index_map;
  candidates.reserve(labels.size() - 1);
  index_map.reserve(labels.size() - 1);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j != anchor_index) {
      candidates.push_back(labels[j]);
      index_map.push_back(j);
    }
  }
  const std::vector<double> w = kernel_weights(labels[anchor_index], candidates, sigma);
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    cum += w[j];
    if (u < cum) {
      return index_map[j];
    }
  }
  return index_map.back();  // rounding slack
}

inline std::pair<std::vector<double>, double> mix(std::span<const double> e_i,
                                                  std::span<const double> e_j, double y_i,
                                                  double y_j, double lambda) {
  if (e_i.size() != e_j.size()) {
    throw Error("mix: embedding length mismatch");
  }
  std::vector<double> e(e_i.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    e[k] = lambda * e_i[k] + (1.0 - lambda) * e_j[k];
  }
  const double y = lambda * y_i + (1.0 - lambda) * y_j;
  return {std::move(e), y};
}

// Beta(alpha, alpha) via two Gamma(alpha, 1) variates.
inline double draw_lambda(double alpha, Rng& rng) {
  if (!(alpha > 0.0)) {
    throw Error("draw_lambda: alpha must be positive");
  }
  return rng.beta(alpha, alpha);
}

}  // namespace mospc
