// Pairwise comparison loss: a RankNet-style cross-entropy over the score
// difference blended with per-sample L1 terms, with closed-form derivatives
// with respect to the two predicted scores.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "mospc/common.hpp"

namespace mospc {

// Labels are averages of integer annotator scores, so exact equality is
// attainable; the epsilon guards ingestion rounding.
inline constexpr double kTieEps = 1e-9;

struct PairLossConfig {
  double beta = 0.6;
};

struct PairLossValue {
  double total = 0.0;
  double rank_part = 0.0;
  double l1_i = 0.0;
  double l1_j = 0.0;
  double grad_mi = 0.0;
  double grad_mj = 0.0;
};

// Preference label: 1 if the first sample is better, 0 if worse, 0.5 on ties.
inline double rank_label(double y_i, double y_j, double tie_eps = kTieEps) {
  if (y_i - y_j > tie_eps) {
    return 1.0;
  }
  if (y_j - y_i > tie_eps) {
    return 0.0;
  }
  return 0.5;
}

// Logistic map of the score difference, branched on sign so that exp never
// sees a large positive argument. Clamped to the open interval so the
// cross-entropy below stays finite.
inline double rank_probability(double m_i, double m_j) {
  const double d = m_i - m_j;
  double p;
  if (d >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-d));
  } else {
    const double e = std::exp(d);
    p = e / (1.0 + e);
  }
  const double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, lo, hi);
}

// Cross-entropy between the preference label and the predicted probability.
inline double rank_loss(double p, double l) {
  double v = 0.0;
  if (l > 0.0) {
    v -= l * std::log(p);
  }
  if (l < 1.0) {
    v -= (1.0 - l) * std::log(1.0 - p);
  }
  return v;
}

inline double sign_or_zero(double x) {
  if (x > 0.0) {
    return 1.0;
  }
  if (x < 0.0) {
    return -1.0;
  }
  return 0.0;
}

// total = (1-beta) * rank + beta * (|m_i - y_i| + |m_j - y_j|).
// d(rank)/d(m_i) collapses to P - L, the RankNet identity.
inline PairLossValue pair_loss(double m_i, double m_j, double y_i, double y_j,
                               const PairLossConfig& cfg = {}) {
  const double beta = cfg.beta;
  PairLossValue out;
  const double label = rank_label(y_i, y_j);
  const double p = rank_probability(m_i, m_j);
  out.rank_part = rank_loss(p, label);
  out.l1_i = std::abs(m_i - y_i);
  out.l1_j = std::abs(m_j - y_j);
  out.total = (1.0 - beta) * out.rank_part + beta * (out.l1_i + out.l1_j);
  const double d_rank = p - label;
  out.grad_mi = (1.0 - beta) * d_rank + beta * sign_or_zero(m_i - y_i);
  out.grad_mj = -(1.0 - beta) * d_rank + beta * sign_or_zero(m_j - y_j);
  return out;
}

}  // namespace mospc
