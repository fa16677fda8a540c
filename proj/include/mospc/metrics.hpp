// Evaluation engine: MSE / Pearson / Spearman / Kendall tau-b at utterance
// and system level, ranking accuracy on MOS segments, and per-category
// squared-error summaries. All inputs are plain vectors; aggregation by
// synthesis system happens on per-system mean scores.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mospc/common.hpp"
#include "mospc/losses.hpp"

namespace mospc {

inline void check_metric_input(std::span<const double> pred, std::span<const double> truth,
                               const char* name) {
  if (pred.size() != truth.size()) {
    throw Error(std::string(name) + ": length mismatch");
  }
  if (pred.empty()) {
    throw Error(std::string(name) + ": empty input");
  }
}

inline double mse(std::span<const double> pred, std::span<const double> truth) {
  check_metric_input(pred, truth, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

// Pearson correlation, mean-centered two-pass form.
inline double lcc(std::span<const double> pred, std::span<const double> truth) {
  check_metric_input(pred, truth, "lcc");
  const std::size_t n = pred.size();
  if (n < 2) {
    throw Error("lcc: need at least 2 points");
  }
  double mean_p = 0.0, mean_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_p += pred[i];
    mean_t += truth[i];
  }
  mean_p /= static_cast<double>(n);
  mean_t /= static_cast<double>(n);
  double spt = 0.0, spp = 0.0, stt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dp = pred[i] - mean_p;
    const double dt = truth[i] - mean_t;
    spt += dp * dt;
    spp += dp * dp;
    stt += dt * dt;
  }
  if (spp == 0.0 || stt == 0.0) {
    throw Error("lcc: correlation undefined for constant input");
  }
  return spt / std::sqrt(spp * stt);
}

// Fractional (average) ranks, 1-based; ties share the mean of their ranks.
inline std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) {
      ++j;
    }
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = r;
    }
    i = j + 1;
  }
  return ranks;
}

inline double srcc(std::span<const double> pred, std::span<const double> truth) {
  check_metric_input(pred, truth, "srcc");
  const std::vector<double> rp = average_ranks(pred);
  const std::vector<double> rt = average_ranks(truth);
  return lcc(rp, rt);
}

// Kendall tau-b: (C - D) / sqrt((C + D + Tp)(C + D + Tt)) where Tp / Tt count
// pairs tied in exactly one of the two vectors; pairs tied in both drop out.
inline double ktau(std::span<const double> pred, std::span<const double> truth) {
  check_metric_input(pred, truth, "ktau");
  const std::size_t n = pred.size();
  if (n < 2) {
    throw Error("ktau: need at least 2 points");
  }
  double concordant = 0.0, discordant = 0.0, tied_pred = 0.0, tied_truth = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dp = pred[i] - pred[j];
      const double dt = truth[i] - truth[j];
      if (dp == 0.0 && dt == 0.0) {
        continue;
      }
      if (dp == 0.0) {
        tied_pred += 1.0;
      } else if (dt == 0.0) {
        tied_truth += 1.0;
      } else if (dp * dt > 0.0) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  const double f_pred = concordant + discordant + tied_pred;
  const double f_truth = concordant + discordant + tied_truth;
  if (f_pred == 0.0 || f_truth == 0.0) {
    throw Error("ktau: undefined, all pairs tied in one vector");
  }
  return (concordant - discordant) / std::sqrt(f_pred * f_truth);
}

struct SystemMeans {
  std::vector<std::string> system_ids;  // sorted, unique
  std::vector<double> pred_means;
  std::vector<double> truth_means;
};

inline SystemMeans system_aggregate(const std::vector<std::string>& system_ids,
                                    std::span<const double> pred,
                                    std::span<const double> truth) {
  check_metric_input(pred, truth, "system_aggregate");
  if (system_ids.size() != pred.size()) {
    throw Error("system_aggregate: system_ids length mismatch");
  }
  struct Acc {
    double pred_sum = 0.0;
    double truth_sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::string, Acc> groups;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    Acc& a = groups[system_ids[i]];
    a.pred_sum += pred[i];
    a.truth_sum += truth[i];
    a.n += 1;
  }
  SystemMeans out;
  for (const auto& [id, acc] : groups) {
    out.system_ids.push_back(id);
    out.pred_means.push_back(acc.pred_sum / static_cast<double>(acc.n));
    out.truth_means.push_back(acc.truth_sum / static_cast<double>(acc.n));
  }
  return out;
}

struct MetricSet {
  double mse = 0.0;
  double lcc = 0.0;
  double srcc = 0.0;
  double ktau = 0.0;
};

struct EvalReport {
  MetricSet utterance;
  MetricSet system;
  std::size_t n_utterances = 0;
  std::size_t n_systems = 0;
};

inline MetricSet metric_set(std::span<const double> pred, std::span<const double> truth) {
  MetricSet m;
  m.mse = mse(pred, truth);
  m.lcc = lcc(pred, truth);
  m.srcc = srcc(pred, truth);
  m.ktau = ktau(pred, truth);
  return m;
}

inline EvalReport evaluate(std::span<const double> pred, std::span<const double> truth,
                           const std::vector<std::string>& system_ids) {
  EvalReport rep;
  rep.utterance = metric_set(pred, truth);
  rep.n_utterances = pred.size();
  const SystemMeans sys = system_aggregate(system_ids, pred, truth);
  rep.n_systems = sys.system_ids.size();
  rep.system = metric_set(sys.pred_means, sys.truth_means);
  return rep;
}

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
};

// The four unit-wide MOS segments plus the overall one.
inline const std::vector<Segment>& default_segments() {
  static const std::vector<Segment> segs = {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}};
  return segs;
}

struct SegmentResult {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_pairs = 0;
  std::optional<double> accuracy;  // absent when no eligible pairs
};

struct SegmentReport {
  std::vector<SegmentResult> segments;
};

inline std::string segment_label(const SegmentResult& s) {
  return format_double(s.lo) + "-" + format_double(s.hi);
}

// Eligible pairs have both ground truths inside the closed segment and differ
// by more than a tie epsilon but at most 1. A pair counts correct when the
// predicted order matches the true order; predicted ties count as wrong.
inline SegmentReport segment_ranking_accuracy(
    std::span<const double> pred, std::span<const double> truth,
    const std::vector<Segment>& segments = default_segments()) {
  check_metric_input(pred, truth, "segment_ranking_accuracy");
  const std::size_t n = pred.size();
  SegmentReport rep;
  for (const Segment& seg : segments) {
    SegmentResult res;
    res.lo = seg.lo;
    res.hi = seg.hi;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (truth[i] < seg.lo || truth[i] > seg.hi) {
        continue;
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        if (truth[j] < seg.lo || truth[j] > seg.hi) {
          continue;
        }
        const double dy = std::abs(truth[i] - truth[j]);
        if (dy <= kTieEps || dy > 1.0) {
          continue;
        }
        res.n_pairs += 1;
        const double dm = pred[i] - pred[j];
        if (std::abs(dm) <= kTieEps) {
          continue;  // predicted tie, counted incorrect
        }
        if ((dm > 0.0) == (truth[i] > truth[j])) {
          ++correct;
        }
      }
    }
    if (res.n_pairs > 0) {
      res.accuracy = static_cast<double>(correct) / static_cast<double>(res.n_pairs);
    }
    rep.segments.push_back(res);
  }
  return rep;
}

struct CategoryError {
  std::size_t n = 0;
  double mean_sq_err = 0.0;
  double std_sq_err = 0.0;  // population standard deviation
};

struct CategoryErrorReport {
  std::map<std::string, CategoryError> categories;
};

inline CategoryErrorReport category_error_report(const std::vector<std::string>& categories,
                                                 std::span<const double> pred,
                                                 std::span<const double> truth) {
  check_metric_input(pred, truth, "category_error_report");
  if (categories.size() != pred.size()) {
    throw Error("category_error_report: categories length mismatch");
  }
  std::map<std::string, std::vector<double>> sq_errs;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sq_errs[categories[i]].push_back(d * d);
  }
  CategoryErrorReport rep;
  for (const auto& [cat, errs] : sq_errs) {
    CategoryError ce;
    ce.n = errs.size();
    for (double e : errs) {
      ce.mean_sq_err += e;
    }
    ce.mean_sq_err /= static_cast<double>(ce.n);
    double var = 0.0;
    for (double e : errs) {
      const double d = e - ce.mean_sq_err;
      var += d * d;
    }
    var /= static_cast<double>(ce.n);
    ce.std_sq_err = std::sqrt(var);
    rep.categories[cat] = ce;
  }
  return rep;
}

// --- report serialization: JSON object per report plus a CSV table ---

inline nlohmann::json to_json(const MetricSet& m) {
  return {{"mse", m.mse}, {"lcc", m.lcc}, {"srcc", m.srcc}, {"ktau", m.ktau}};
}

inline nlohmann::json to_json(const EvalReport& rep) {
  return {{"utterance", to_json(rep.utterance)},
          {"system", to_json(rep.system)},
          {"n_utterances", rep.n_utterances},
          {"n_systems", rep.n_systems}};
}

inline std::string to_csv(const EvalReport& rep) {
  std::string out = "level,n,mse,lcc,srcc,ktau\n";
  out += "utterance," + std::to_string(rep.n_utterances) + "," + format_double(rep.utterance.mse) +
         "," + format_double(rep.utterance.lcc) + "," + format_double(rep.utterance.srcc) + "," +
         format_double(rep.utterance.ktau) + "\n";
  out += "system," + std::to_string(rep.n_systems) + "," + format_double(rep.system.mse) + "," +
         format_double(rep.system.lcc) + "," + format_double(rep.system.srcc) + "," +
         format_double(rep.system.ktau) + "\n";
  return out;
}

inline nlohmann::json to_json(const SegmentReport& rep) {
  nlohmann::json segs = nlohmann::json::array();
  for (const SegmentResult& s : rep.segments) {
    nlohmann::json j = {{"segment", segment_label(s)},
                        {"lo", s.lo},
                        {"hi", s.hi},
                        {"n_pairs", s.n_pairs}};
    if (s.accuracy) {
      j["accuracy"] = *s.accuracy;
    } else {
      j["accuracy"] = nullptr;
    }
    segs.push_back(j);
  }
  return {{"segments", segs}};
}

inline std::string to_csv(const SegmentReport& rep) {
  std::string out = "segment,lo,hi,n_pairs,accuracy\n";
  for (const SegmentResult& s : rep.segments) {
    out += segment_label(s) + "," + format_double(s.lo) + "," + format_double(s.hi) + "," +
           std::to_string(s.n_pairs) + ",";
    if (s.accuracy) {
      out += format_double(*s.accuracy);
    }
    out += "\n";
  }
  return out;
}

inline nlohmann::json to_json(const CategoryErrorReport& rep) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [cat, ce] : rep.categories) {
    cats[cat] = {{"n", ce.n}, {"mean_sq_err", ce.mean_sq_err}, {"std_sq_err", ce.std_sq_err}};
  }
  return {{"categories", cats}};
}

inline std::string to_csv(const CategoryErrorReport& rep) {
  std::string out = "category,n,mean_sq_err,std_sq_err\n";
  for (const auto& [cat, ce] : rep.categories) {
    out += cat + "," + std::to_string(ce.n) + "," + format_double(ce.mean_sq_err) + "," +
           format_double(ce.std_sq_err) + "\n";
  }
  return out;
}

}  // namespace mospc
