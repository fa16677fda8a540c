// Checkpoints: versioned structured text listing layer shapes and parameters
// in row-major order. Values are written with 17 significant digits, which
// round-trips IEEE doubles bit-exactly.
#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "mospc/common.hpp"
#include "mospc/model.hpp"

namespace mospc {

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline void write_values(std::string& out, const char* tag, const std::vector<double>& v) {
  out += tag;
  for (double x : v) {
    out += ' ';
    out += format_double17(x);
  }
  out += '\n';
}

inline void write_layer(std::string& out, const AffineLayer& l) {
  out += "layer " + std::to_string(l.in_dim) + " " + std::to_string(l.out_dim) + "\n";
  write_values(out, "w", l.w);
  write_values(out, "b", l.b);
}

class TokenReader {
 public:
  TokenReader(const std::string& content, std::string context)
      : in_(content), context_(std::move(context)) {}

  std::string word() {
    std::string t;
    if (!(in_ >> t)) {
      throw Error(context_ + ": truncated checkpoint");
    }
    return t;
  }

  void expect(const std::string& token) {
    const std::string t = word();
    if (t != token) {
      throw Error(context_ + ": expected '" + token + "', got '" + t + "'");
    }
  }

  std::size_t count() {
    const std::string t = word();
    try {
      return static_cast<std::size_t>(std::stoull(t));
    } catch (const std::exception&) {
      throw Error(context_ + ": expected a count, got '" + t + "'");
    }
  }

  double value() {
    double v = 0.0;
    if (!(in_ >> v)) {
      throw Error(context_ + ": expected a number");
    }
    return v;
  }

  void values(std::vector<double>& out, std::size_t n) {
    out.resize(n);
    for (double& v : out) {
      v = value();
    }
  }

  AffineLayer layer() {
    expect("layer");
    AffineLayer l;
    l.in_dim = count();
    l.out_dim = count();
    expect("w");
    values(l.w, l.in_dim * l.out_dim);
    expect("b");
    values(l.b, l.out_dim);
    return l;
  }

 private:
  std::istringstream in_;
  std::string context_;
};

inline TokenReader open_checkpoint(const std::filesystem::path& path, const char* kind) {
  TokenReader r(read_file(path), "checkpoint " + path.string());
  r.expect("mospc-checkpoint");
  const std::size_t version = r.count();
  if (version != static_cast<std::size_t>(kCheckpointVersion)) {
    throw Error("checkpoint " + path.string() + ": unsupported format version " +
                std::to_string(version));
  }
  r.expect(kind);
  return r;
}

}  // namespace detail

inline void save_predictor(const Predictor& p, const std::filesystem::path& path) {
  std::string out = "mospc-checkpoint " + std::to_string(kCheckpointVersion) + "\npredictor\n";
  out += "extractor " + std::to_string(p.extractor.size()) + "\n";
  for (const AffineLayer& l : p.extractor) {
    detail::write_layer(out, l);
  }
  out += "encoder " + std::to_string(p.encoder.size()) + "\n";
  for (const AffineLayer& l : p.encoder) {
    detail::write_layer(out, l);
  }
  out += "head\n";
  detail::write_layer(out, p.head);
  out += "end\n";
  write_file_atomic(path, out);
}

inline Predictor load_predictor(const std::filesystem::path& path) {
  detail::TokenReader r = detail::open_checkpoint(path, "predictor");
  Predictor p;
  r.expect("extractor");
  const std::size_t n_ext = r.count();
  for (std::size_t i = 0; i < n_ext; ++i) {
    p.extractor.push_back(r.layer());
  }
  r.expect("encoder");
  const std::size_t n_enc = r.count();
  for (std::size_t i = 0; i < n_enc; ++i) {
    p.encoder.push_back(r.layer());
  }
  r.expect("head");
  p.head = r.layer();
  r.expect("end");
  validate_predictor(p);
  return p;
}

inline void save_fusion(const FusionModel& f, const std::filesystem::path& path) {
  std::string out = "mospc-checkpoint " + std::to_string(kCheckpointVersion) + "\nfusion\n";
  out += "k " + std::to_string(f.weights.size()) + "\n";
  detail::write_values(out, "w", f.weights);
  out += "b " + format_double17(f.bias) + "\n";
  out += "end\n";
  write_file_atomic(path, out);
}

inline FusionModel load_fusion(const std::filesystem::path& path) {
  detail::TokenReader r = detail::open_checkpoint(path, "fusion");
  FusionModel f;
  r.expect("k");
  const std::size_t k = r.count();
  r.expect("w");
  r.values(f.weights, k);
  r.expect("b");
  f.bias = r.value();
  r.expect("end");
  return f;
}

}  // namespace mospc
