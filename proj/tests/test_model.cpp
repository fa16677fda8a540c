#include "mospc/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace mospc;

// ---- independent naive forward oracle: plain loops, shares no code ----
namespace {

std::vector<double> naive_affine_tanh(const AffineLayer& l, const std::vector<double>& x) {
  std::vector<double> out(l.out_dim);
  for (std::size_t o = 0; o < l.out_dim; ++o) {
    double z = l.b[o];
    for (std::size_t i = 0; i < l.in_dim; ++i) {
      z += l.w[o * l.in_dim + i] * x[i];
    }
    out[o] = std::tanh(z);
  }
  return out;
}

double naive_forward(const Predictor& p, std::vector<double> x) {
  for (const AffineLayer& l : p.extractor) {
    x = naive_affine_tanh(l, x);
  }
  for (const AffineLayer& l : p.encoder) {
    x = naive_affine_tanh(l, x);
  }
  double m = p.head.b[0];
  for (std::size_t i = 0; i < p.head.in_dim; ++i) {
    m += p.head.w[i] * x[i];
  }
  return m;
}

Predictor random_predictor(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dim_dist(1, 8);
  std::uniform_int_distribution<int> depth_dist(0, 2);
  const std::size_t input_dim = 1 + gen() % 6;
  std::vector<std::size_t> ext(depth_dist(gen)), enc(depth_dist(gen));
  for (auto& w : ext) {
    w = dim_dist(gen);
  }
  for (auto& w : enc) {
    w = dim_dist(gen);
  }
  Rng rng(gen());
  return make_predictor(input_dim, ext, enc, rng);
}

std::vector<double> random_input(std::size_t dim, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> x(dim);
  for (double& v : x) {
    v = dist(gen);
  }
  return x;
}

// central finite difference of the forward score w.r.t. one parameter
double fd_param(Predictor& p, double* param, const std::vector<double>& x) {
  const double h = 1e-5;
  const double orig = *param;
  *param = orig + h;
  const double up = predictor_forward(p, x).first;
  *param = orig - h;
  const double down = predictor_forward(p, x).first;
  *param = orig;
  return (up - down) / (2.0 * h);
}

}  // namespace

TEST(Forward, ZeroNetworkScoresZero) {
  Rng rng(1);
  Predictor p = make_predictor(3, {4}, {4}, rng);
  for (AffineLayer* l : {&p.extractor[0], &p.encoder[0], &p.head}) {
    std::fill(l->w.begin(), l->w.end(), 0.0);
    std::fill(l->b.begin(), l->b.end(), 0.0);
  }
  EXPECT_EQ(predictor_forward(p, std::vector<double>{0.5, -1.0, 2.0}).first, 0.0);
}

TEST(Forward, BareAffineHead) {
  Predictor p;
  p.head.in_dim = 2;
  p.head.out_dim = 1;
  p.head.w = {1.0, 1.0};
  p.head.b = {0.5};
  validate_predictor(p);
  EXPECT_EQ(predictor_forward(p, std::vector<double>{1.0, 2.0}).first, 3.5);
  EXPECT_EQ(predictor_input_dim(p), 2u);
  EXPECT_EQ(embedding_dim(p), 2u);
}

TEST(Forward, MatchesNaiveOracle) {
  std::mt19937_64 gen(33);
  for (int rep = 0; rep < 300; ++rep) {
    const Predictor p = random_predictor(gen);
    const std::vector<double> x = random_input(predictor_input_dim(p), gen);
    EXPECT_NEAR(predictor_forward(p, x).first, naive_forward(p, x), 1e-12);
  }
}

TEST(Forward, DeterministicBitwise) {
  std::mt19937_64 gen(34);
  const Predictor p = random_predictor(gen);
  const std::vector<double> x = random_input(predictor_input_dim(p), gen);
  EXPECT_EQ(predictor_forward(p, x).first, predictor_forward(p, x).first);
}

TEST(Forward, EmptyExtractorIsIdentity) {
  Rng rng(2);
  const Predictor p = make_predictor(4, {}, {3}, rng);
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(extractor_forward(p, x), x);
}

TEST(Forward, CompositionIsExact) {
  std::mt19937_64 gen(35);
  for (int rep = 0; rep < 100; ++rep) {
    const Predictor p = random_predictor(gen);
    const std::vector<double> x = random_input(predictor_input_dim(p), gen);
    const std::vector<double> e = extractor_forward(p, x);
    EXPECT_EQ(predictor_forward(p, x).first, encoder_forward_from_embedding(p, e).first);
  }
}

TEST(Forward, DimensionMismatchThrows) {
  Rng rng(3);
  const Predictor p = make_predictor(4, {3}, {3}, rng);
  EXPECT_THROW(predictor_forward(p, std::vector<double>{1.0, 2.0}), Error);
  EXPECT_THROW(encoder_forward_from_embedding(p, std::vector<double>{1.0}), Error);
}

TEST(Init, UniformWithinFanInBound) {
  Rng rng(4);
  const AffineLayer l = make_affine(16, 32, rng);
  const double bound = 1.0 / std::sqrt(16.0);
  for (double w : l.w) {
    EXPECT_GE(w, -bound);
    EXPECT_LE(w, bound);
  }
  for (double b : l.b) {
    EXPECT_GE(b, -bound);
    EXPECT_LE(b, bound);
  }
  // spread check: draws should not collapse to a narrow band
  double mn = 1e9, mx = -1e9;
  for (double w : l.w) {
    mn = std::min(mn, w);
    mx = std::max(mx, w);
  }
  EXPECT_LT(mn, -0.6 * bound);
  EXPECT_GT(mx, 0.6 * bound);
}

TEST(Init, DefaultShapeChainsAndValidates) {
  Rng rng(5);
  const Predictor p = make_predictor(16, {32}, {32, 16}, rng);
  validate_predictor(p);
  EXPECT_EQ(predictor_input_dim(p), 16u);
  EXPECT_EQ(embedding_dim(p), 32u);
  EXPECT_EQ(p.head.in_dim, 16u);
  EXPECT_EQ(p.head.out_dim, 1u);
}

TEST(Validate, RejectsBrokenChain) {
  Rng rng(6);
  Predictor p = make_predictor(4, {3}, {3}, rng);
  p.encoder[0].in_dim = 2;  // breaks extractor(3) -> encoder(expects 2)
  EXPECT_THROW(validate_predictor(p), Error);
  Predictor q = make_predictor(4, {3}, {3}, rng);
  q.head.out_dim = 2;
  q.head.b = {0.0, 0.0};
  q.head.w.resize(2 * q.head.in_dim);
  EXPECT_THROW(validate_predictor(q), Error);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 gen(36);
  const Predictor p = random_predictor(gen);
  const std::vector<double> x = random_input(predictor_input_dim(p), gen);
  const auto [m, cache] = predictor_forward(p, x);
  const PredictorGradients g = predictor_backward(p, cache, 0.0);
  for (const auto& stack : {g.extractor, g.encoder}) {
    for (const LayerGrads& lg : stack) {
      for (double v : lg.w) {
        EXPECT_EQ(v, 0.0);
      }
      for (double v : lg.b) {
        EXPECT_EQ(v, 0.0);
      }
    }
  }
  for (double v : g.head.w) {
    EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(g.head.b[0], 0.0);
}

TEST(Backward, BareHeadGradientIsInput) {
  Predictor p;
  p.head.in_dim = 3;
  p.head.out_dim = 1;
  p.head.w = {0.5, -1.0, 2.0};
  p.head.b = {0.1};
  const std::vector<double> x{1.5, -0.5, 0.25};
  const auto [m, cache] = predictor_forward(p, x);
  const PredictorGradients g = predictor_backward(p, cache, 2.0);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(g.head.w[j], 2.0 * x[j], 1e-15);
  }
  EXPECT_EQ(g.head.b[0], 2.0);
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 gen(37);
  for (int rep = 0; rep < 100; ++rep) {
    Predictor p = random_predictor(gen);
    const std::vector<double> x = random_input(predictor_input_dim(p), gen);
    const auto [m, cache] = predictor_forward(p, x);
    const double upstream = 1.7;
    const PredictorGradients g = predictor_backward(p, cache, upstream);
    auto check = [&](double* param, double analytic) {
      const double fd = upstream * fd_param(p, param, x);
      EXPECT_LT(std::abs(analytic - fd) / std::max(1.0, std::abs(fd)), 1e-6);
    };
    for (std::size_t li = 0; li < p.extractor.size(); ++li) {
      for (std::size_t k = 0; k < p.extractor[li].w.size(); ++k) {
        check(&p.extractor[li].w[k], g.extractor[li].w[k]);
      }
      for (std::size_t k = 0; k < p.extractor[li].b.size(); ++k) {
        check(&p.extractor[li].b[k], g.extractor[li].b[k]);
      }
    }
    for (std::size_t li = 0; li < p.encoder.size(); ++li) {
      for (std::size_t k = 0; k < p.encoder[li].w.size(); ++k) {
        check(&p.encoder[li].w[k], g.encoder[li].w[k]);
      }
      for (std::size_t k = 0; k < p.encoder[li].b.size(); ++k) {
        check(&p.encoder[li].b[k], g.encoder[li].b[k]);
      }
    }
    for (std::size_t k = 0; k < p.head.w.size(); ++k) {
      check(&p.head.w[k], g.head.w[k]);
    }
    check(&p.head.b[0], g.head.b[0]);
  }
}

TEST(Backward, EncoderOnlyPathMatchesFullBackward) {
  // gradients w.r.t. encoder+head parameters agree between the full backward
  // and the embedding-rooted backward
  std::mt19937_64 gen(38);
  for (int rep = 0; rep < 50; ++rep) {
    const Predictor p = random_predictor(gen);
    const std::vector<double> x = random_input(predictor_input_dim(p), gen);
    const auto [m, cache] = predictor_forward(p, x);
    const PredictorGradients full = predictor_backward(p, cache, 1.3);
    const std::vector<double> e = extractor_forward(p, x);
    const auto [m2, enc_cache] = encoder_forward_from_embedding(p, e);
    const EncoderBackward eb = encoder_backward_from_embedding(p, enc_cache, 1.3);
    ASSERT_EQ(full.encoder.size(), eb.encoder.size());
    for (std::size_t li = 0; li < eb.encoder.size(); ++li) {
      for (std::size_t k = 0; k < eb.encoder[li].w.size(); ++k) {
        EXPECT_EQ(eb.encoder[li].w[k], full.encoder[li].w[k]);
      }
    }
    for (std::size_t k = 0; k < eb.head.w.size(); ++k) {
      EXPECT_EQ(eb.head.w[k], full.head.w[k]);
    }
    EXPECT_EQ(eb.head.b[0], full.head.b[0]);
  }
}

TEST(Fusion, ExamplesAndErrors) {
  FusionModel mean2 = make_fusion(2);
  EXPECT_EQ(mean2.weights, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(mean2.bias, 0.0);
  EXPECT_NEAR(fusion_forward(mean2, std::vector<double>{3.0, 4.0}), 3.5, 1e-15);

  FusionModel ident;
  ident.weights = {1.0};
  EXPECT_EQ(fusion_forward(ident, std::vector<double>{2.75}), 2.75);

  FusionModel f;
  f.weights = {0.2, 0.8};
  f.bias = 0.1;
  EXPECT_NEAR(fusion_forward(f, std::vector<double>{3.0, 4.0}), 3.9, 1e-12);

  EXPECT_THROW(fusion_forward(f, std::vector<double>{1.0}), Error);
}

TEST(Gradients, AddScaledAccumulates) {
  std::mt19937_64 gen(39);
  const Predictor p = random_predictor(gen);
  const std::vector<double> x = random_input(predictor_input_dim(p), gen);
  const auto [m, cache] = predictor_forward(p, x);
  const PredictorGradients g = predictor_backward(p, cache, 1.0);
  PredictorGradients acc = zero_gradients(p);
  add_scaled(acc, g, 2.0);
  add_scaled(acc, g, -0.5);
  EXPECT_NEAR(acc.head.b[0], 1.5 * g.head.b[0], 1e-15);
  if (!p.encoder.empty() && !g.encoder[0].w.empty()) {
    EXPECT_NEAR(acc.encoder[0].w[0], 1.5 * g.encoder[0].w[0], 1e-15);
  }
}
