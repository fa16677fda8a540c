// Dataset representation, tabular ingestion, deterministic splitting and a
// synthetic MOS-corpus generator. File format: UTF-8 comma-separated values
// with mandatory header `id,system_id,mos,f0,...,f{D-1}`, `.` decimal
// separator, no quoting.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mospc/common.hpp"
#include "mospc/rng.hpp"

namespace mospc {

struct SpeechSample {
  std::string id;
  std::string system_id;
  std::vector<double> features;
  double mos = 0.0;

  bool operator==(const SpeechSample&) const = default;
};

struct Dataset {
  std::string name;
  std::size_t feature_dim = 0;
  std::vector<SpeechSample> samples;

  std::size_t size() const { return samples.size(); }
};

inline std::string expected_header(std::size_t feature_dim) {
  std::string h = "id,system_id,mos";
  for (std::size_t d = 0; d < feature_dim; ++d) {
    h += ",f" + std::to_string(d);
  }
  return h;
}

inline Dataset load_dataset(const std::filesystem::path& path, std::size_t feature_dim) {
  if (feature_dim == 0) {
    throw Error("load_dataset: feature_dim must be positive");
  }
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw Error("load_dataset " + path.string() + ": missing header");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != expected_header(feature_dim)) {
    throw Error("load_dataset " + path.string() + ": bad header, expected '" +
                expected_header(feature_dim) + "'");
  }
  Dataset ds;
  ds.name = path.stem().string();
  ds.feature_dim = feature_dim;
  std::set<std::string> seen_ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    ++row;
    const std::string where = "load_dataset " + path.string() + ": row " + std::to_string(row);
    const std::vector<std::string> cols = split_csv_line(line);
    if (cols.size() != 3 + feature_dim) {
      throw Error(where + ": expected " + std::to_string(3 + feature_dim) + " columns, got " +
                  std::to_string(cols.size()));
    }
    SpeechSample s;
    s.id = cols[0];
    s.system_id = cols[1];
    if (s.id.empty()) {
      throw Error(where + ": empty id");
    }
    if (!seen_ids.insert(s.id).second) {
      throw Error(where + ": duplicate id '" + s.id + "'");
    }
    s.mos = parse_double(cols[2], where + " mos");
    if (!(s.mos >= 1.0 && s.mos <= 5.0)) {
      throw Error(where + ": mos out of range [1,5]: " + cols[2]);
    }
    s.features.resize(feature_dim);
    for (std::size_t d = 0; d < feature_dim; ++d) {
      s.features[d] = parse_double(cols[3 + d], where + " f" + std::to_string(d));
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) {
    throw Error("load_dataset " + path.string() + ": empty dataset");
  }
  return ds;
}

// Infers feature_dim from the header columns f0..f{D-1}.
inline Dataset load_dataset(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw Error("load_dataset " + path.string() + ": missing header");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const std::vector<std::string> cols = split_csv_line(line);
  if (cols.size() < 4) {
    throw Error("load_dataset " + path.string() +
                ": bad header, expected 'id,system_id,mos,f0,...'");
  }
  return load_dataset(path, cols.size() - 3);
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::string out = expected_header(ds.feature_dim) + "\n";
  for (const SpeechSample& s : ds.samples) {
    out += s.id + "," + s.system_id + "," + format_double(s.mos);
    for (double f : s.features) {
      out += "," + format_double(f);
    }
    out += "\n";
  }
  write_file_atomic(path, out);
}

struct SplitFractions {
  double train = 0.7;
  double valid = 0.15;
  double test = 0.15;
};

struct SplitResult {
  Dataset train;
  Dataset valid;
  Dataset test;
};

// Deterministic partition: ids are shuffled by the seed, valid and test take
// round(N * fraction) samples each and the remainder stays in train. Row
// order within each part follows the input dataset.
inline SplitResult split(const Dataset& ds, const SplitFractions& fractions, std::uint64_t seed) {
  if (!(fractions.train > 0.0 && fractions.valid > 0.0 && fractions.test > 0.0)) {
    throw Error("split: all fractions must be positive");
  }
  const double sum = fractions.train + fractions.valid + fractions.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error("split: fractions must sum to 1, got " + format_double(sum));
  }
  if (ds.samples.empty()) {
    throw Error("split: empty dataset");
  }
  const std::size_t n = ds.samples.size();
  const auto n_valid = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * fractions.valid));
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * fractions.test));
  if (n_valid + n_test > n) {
    throw Error("split: dataset too small for requested fractions");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<int> part(n, 0);
  for (std::size_t i = 0; i < n_valid; ++i) {
    part[order[i]] = 1;
  }
  for (std::size_t i = n_valid; i < n_valid + n_test; ++i) {
    part[order[i]] = 2;
  }
  SplitResult out;
  out.train.name = ds.name + ".train";
  out.valid.name = ds.name + ".valid";
  out.test.name = ds.name + ".test";
  out.train.feature_dim = out.valid.feature_dim = out.test.feature_dim = ds.feature_dim;
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& dst = part[i] == 0 ? out.train : (part[i] == 1 ? out.valid : out.test);
    dst.samples.push_back(ds.samples[i]);
  }
  return out;
}

struct SynthConfig {
  std::size_t n_systems = 30;
  std::size_t utterances_per_system = 100;
  std::size_t n_annotators = 4;
  std::size_t feature_dim = 16;
  double noise_scale = 0.35;          // sd of per-utterance quality around the system quality
  double annotator_noise_scale = 0.5; // sd of each integer annotator score; 0 is a test hook
  double shift = 0.0;                 // feature offset for the OOD variant
  std::uint64_t seed = 0;
};

// Latent per-system qualities, exposed for tests.
struct SynthTrace {
  std::vector<double> system_quality;
};

inline void validate(const SynthConfig& cfg) {
  if (cfg.n_systems == 0 || cfg.utterances_per_system == 0) {
    throw Error("SynthConfig: n_systems and utterances_per_system must be positive");
  }
  if (cfg.n_annotators < 1) {
    throw Error("SynthConfig: n_annotators must be >= 1");
  }
  if (cfg.feature_dim < 2) {
    throw Error("SynthConfig: feature_dim must be >= 2");
  }
  if (cfg.noise_scale < 0.0 || cfg.annotator_noise_scale < 0.0) {
    throw Error("SynthConfig: noise scales must be nonnegative");
  }
}

// Each system draws a true quality q_s ~ U[1.5, 4.5]; each utterance perturbs
// it, integer annotator scores are averaged into the label, and features are
// affine in the utterance quality (plus pure-noise nuisance dimensions).
// The shift is added after all random draws, so two runs with equal seeds and
// different shifts produce identical labels and shifted features.
inline Dataset generate_synthetic(const SynthConfig& cfg, SynthTrace* trace = nullptr) {
  validate(cfg);
  Rng rng(cfg.seed);
  Dataset ds;
  ds.name = "synthetic";
  ds.feature_dim = cfg.feature_dim;

  std::vector<double> system_quality(cfg.n_systems);
  for (double& q : system_quality) {
    q = rng.uniform(1.5, 4.5);
  }
  if (trace != nullptr) {
    trace->system_quality = system_quality;
  }

  const std::size_t n_informative = cfg.feature_dim / 2;
  std::vector<double> slope(n_informative), intercept(n_informative);
  for (std::size_t d = 0; d < n_informative; ++d) {
    slope[d] = rng.uniform(0.5, 1.5) * (d % 2 == 0 ? 1.0 : -1.0);
    intercept[d] = rng.uniform(-0.5, 0.5);
  }
  constexpr double kFeatureNoise = 0.1;

  ds.samples.reserve(cfg.n_systems * cfg.utterances_per_system);
  for (std::size_t s = 0; s < cfg.n_systems; ++s) {
    for (std::size_t u = 0; u < cfg.utterances_per_system; ++u) {
      SpeechSample sample;
      sample.id = "s" + std::to_string(s) + "_u" + std::to_string(u);
      sample.system_id = "sys" + std::to_string(s);
      const double q_u =
          std::clamp(system_quality[s] + rng.gaussian(0.0, cfg.noise_scale), 1.0, 5.0);
      double score_sum = 0.0;
      for (std::size_t a = 0; a < cfg.n_annotators; ++a) {
        const double raw = q_u + rng.gaussian(0.0, cfg.annotator_noise_scale);
        score_sum += std::clamp(static_cast<double>(std::llround(raw)), 1.0, 5.0);
      }
      sample.mos = score_sum / static_cast<double>(cfg.n_annotators);
      sample.features.resize(cfg.feature_dim);
      for (std::size_t d = 0; d < cfg.feature_dim; ++d) {
        double v;
        if (d < n_informative) {
          v = slope[d] * (q_u - 3.0) + intercept[d] + rng.gaussian(0.0, kFeatureNoise);
        } else {
          v = rng.gaussian(0.0, 1.0);
        }
        sample.features[d] = v + cfg.shift;
      }
      ds.samples.push_back(std::move(sample));
    }
  }
  return ds;
}

}  // namespace mospc
