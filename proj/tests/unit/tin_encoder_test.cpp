#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sectree/circa.hpp"
#include "sectree/error.hpp"
#include "sectree/generators.hpp"
#include "sectree/tin_encoder.hpp"

namespace sectree {
namespace {

MlpWeights identity_mlp(std::size_t d) {
  return {DenseMatrix::identity(d), DenseMatrix(1, d), DenseMatrix::identity(d), DenseMatrix(1, d),
          DenseMatrix(1, d, 1.0), DenseMatrix(1, d)};
}

TEST(DuplicateProject, IdentityProjection) {
  TinWeights w = TinWeights::zeros(2, 2, 2, 1);
  w.duplication = DenseMatrix{{1}, {1}};
  w.projection = DenseMatrix::identity(2);
  EXPECT_EQ(duplicate_project(DenseMatrix{{1, 2}}, w), (DenseMatrix{{1, 2}, {1, 2}}));
}

TEST(DuplicateProject, ZeroDuplicationGivesBias) {
  TinWeights w = TinWeights::zeros(2, 3, 2, 1);
  w.projection = DenseMatrix(3, 2, 7.0);
  w.node_bias = DenseMatrix{{0.5, -1}, {2, 3}};
  EXPECT_EQ(duplicate_project(DenseMatrix{{1, 2, 3}}, w), w.node_bias);
}

TEST(DuplicateProject, HandProduct) {
  TinWeights w = TinWeights::zeros(2, 2, 2, 1);
  w.duplication = DenseMatrix{{2}, {3}};
  w.projection = DenseMatrix{{1, 1}, {0, 1}};
  const DenseMatrix out = duplicate_project(DenseMatrix{{1, 0}}, w);
  const DenseMatrix expected{{2, 2}, {3, 3}};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out.values()[i], expected.values()[i], 1e-9);
}

TEST(DuplicateProject, ShapeErrors) {
  TinWeights w = TinWeights::zeros(2, 2, 2, 1);
  EXPECT_THROW(duplicate_project(DenseMatrix{{1, 2, 3}}, w), Error);
  EXPECT_THROW(duplicate_project(DenseMatrix{{1, 2}, {3, 4}}, w), Error);
  w.projection = DenseMatrix(3, 2);
  EXPECT_THROW(duplicate_project(DenseMatrix{{1, 2}}, w), Error);
}

TEST(TinLayer, SumThenRectifier) {
  Graph k2 = complete_graph(2);
  CodingTree t = CodingTree::star(k2);
  TinWeights w = TinWeights::zeros(2, 2, 2, 1);
  w.mlps[0] = identity_mlp(2);
  const DenseMatrix out = tin_layer(t, 1, DenseMatrix{{1, -2}, {3, 4}}, w);
  ASSERT_EQ(out.rows(), 1u);
  EXPECT_NEAR(out(0, 0), 4.0, 1e-9);
  EXPECT_NEAR(out(0, 1), 2.0, 1e-9);
  // The rectifier clips the negative coordinate.
  const DenseMatrix clipped = tin_layer(t, 1, DenseMatrix{{1, -5}, {3, 1}}, w);
  EXPECT_EQ(clipped(0, 1), 0.0);
}

TEST(TinLayer, InferenceNormalization) {
  Graph k2 = complete_graph(2);
  CodingTree t = CodingTree::star(k2);
  TinWeights w = TinWeights::zeros(2, 2, 2, 1);
  w.norm = NormMode::Inference;
  w.mlps[0] = identity_mlp(2);
  w.mlps[0].scale = DenseMatrix{{2, -1}};
  w.mlps[0].shift = DenseMatrix{{1, 0}};
  const DenseMatrix out = tin_layer(t, 1, DenseMatrix{{1, -2}, {3, 4}}, w);
  EXPECT_NEAR(out(0, 0), 9.0, 1e-12);
  EXPECT_EQ(out(0, 1), 0.0);
}

TEST(TinLayer, ZeroWeightsGiveZeros) {
  Graph g = erdos_renyi(8, 0.5, 1);
  CodingTree t = circa(g, 2).tree;
  TinWeights w = TinWeights::zeros(8, 3, 3, 2);
  std::mt19937_64 rng(1);
  const DenseMatrix out = tin_layer(t, 1, testing::random_matrix(8, 3, rng), w);
  EXPECT_EQ(out.rows(), t.levels()[1].size());
  for (double x : out.values()) EXPECT_EQ(x, 0.0);
}

TEST(TinLayer, Errors) {
  Graph k2 = complete_graph(2);
  CodingTree t = CodingTree::star(k2);
  TinWeights w = TinWeights::zeros(2, 2, 2, 1);
  EXPECT_THROW(tin_layer(t, 1, DenseMatrix(3, 2), w), Error);
  EXPECT_THROW(tin_layer(t, 2, DenseMatrix(2, 2), w), Error);
  EXPECT_THROW(tin_layer(t, 0, DenseMatrix(2, 2), w), Error);
  TinWeights tall = TinWeights::zeros(2, 2, 2, 2);
  EXPECT_THROW(tin_layer(t, 1, DenseMatrix(2, 2), tall), Error);
  // Unaligned tree.
  Graph k3 = complete_graph(3);
  CodingTree u = CodingTree::star(k3);
  u.merge(k3, 0, 1);
  TinWeights w3 = TinWeights::zeros(3, 2, 2, 2);
  EXPECT_THROW(tin_layer(u, 1, DenseMatrix(3, 2), w3), Error);
}

TEST(Readout, SumConcatenation) {
  TinWeights w = TinWeights::zeros(2, 1, 2, 1);
  std::vector<DenseMatrix> levels{DenseMatrix{{1, 0}, {0, 1}}, DenseMatrix{{2, 2}}};
  EXPECT_EQ(readout(levels, w), (DenseMatrix{{1, 1, 2, 2}}));
}

TEST(Readout, AverageOfIdenticalRows) {
  TinWeights w = TinWeights::zeros(3, 1, 2, 1);
  w.pool = PoolMode::Average;
  std::vector<DenseMatrix> levels{DenseMatrix{{0.3, -7}, {0.3, -7}, {0.3, -7}}, DenseMatrix{{1, 2}}};
  const DenseMatrix out = readout(levels, w);
  EXPECT_NEAR(out(0, 0), 0.3, 1e-15);
  EXPECT_NEAR(out(0, 1), -7.0, 1e-15);
}

TEST(Readout, MaxPool) {
  TinWeights w = TinWeights::zeros(2, 1, 2, 1);
  w.pool = PoolMode::Max;
  std::vector<DenseMatrix> levels{DenseMatrix{{1, 5}, {3, 2}}, DenseMatrix{{-1, -2}}};
  EXPECT_EQ(readout(levels, w), (DenseMatrix{{3, 5, -1, -2}}));
}

TEST(Readout, Errors) {
  TinWeights w = TinWeights::zeros(2, 1, 2, 1);
  std::vector<DenseMatrix> missing{DenseMatrix{{1, 5}}};
  EXPECT_THROW(readout(missing, w), Error);
  std::vector<DenseMatrix> empty{DenseMatrix(0, 2), DenseMatrix{{1, 1}}};
  EXPECT_THROW(readout(empty, w), Error);
  std::vector<DenseMatrix> narrow{DenseMatrix{{1}}, DenseMatrix{{1, 1}}};
  EXPECT_THROW(readout(narrow, w), Error);
}

TEST(Classify, Examples) {
  TinWeights w = TinWeights::zeros(3, 1, 2, 1);
  for (double p : classify(DenseMatrix{{1, -2, 3, 4}}, w)) EXPECT_EQ(p, 0.5);

  TinWeights s = TinWeights::zeros(1, 1, 1, 1);
  s.classifier = DenseMatrix(2, 1);
  s.classifier(0, 0) = 2.0;
  s.classifier_bias = DenseMatrix{{-1}};
  EXPECT_NEAR(classify(DenseMatrix{{1, 0}}, s)[0], 0.7310585786300049, 1e-9);

  double previous = 0.0;
  for (double b : {-5.0, 0.0, 5.0, 20.0, 800.0}) {
    w.classifier_bias(0, 1) = b;
    const double p = classify(DenseMatrix(1, 4), w)[1];
    EXPECT_GT(p, previous);
    EXPECT_LE(p, 1.0);
    previous = p;
  }
  w.classifier_bias(0, 1) = -800.0;
  const double tiny = classify(DenseMatrix(1, 4), w)[1];
  EXPECT_TRUE(std::isfinite(tiny));
  EXPECT_GE(tiny, 0.0);
  EXPECT_THROW(classify(DenseMatrix(1, 3), w), Error);
}

TEST(Bce, Examples) {
  LossConfig cfg;
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(bce_loss(half, std::vector<std::uint8_t>{1, 0}, cfg), std::log(2.0), 1e-12);
  EXPECT_NEAR(bce_loss(half, std::vector<std::uint8_t>{1, 1}, cfg), std::log(2.0), 1e-12);
  EXPECT_NEAR(bce_loss(std::vector<double>{1.0, 0.0}, std::vector<std::uint8_t>{1, 0}, cfg), 0.0, 1e-9);
  EXPECT_NEAR(bce_loss(std::vector<double>{0.9, 0.1}, std::vector<std::uint8_t>{1, 0}, cfg), 0.10536051565782628,
              1e-9);
  // Completely wrong predictions stay finite thanks to the clamp.
  const double worst = bce_loss(std::vector<double>{0.0}, std::vector<std::uint8_t>{1}, cfg);
  EXPECT_NEAR(worst, -std::log(1e-12), 1e-6);
}

TEST(Bce, Errors) {
  LossConfig cfg;
  EXPECT_THROW(bce_loss(std::vector<double>{0.5}, std::vector<std::uint8_t>{1, 0}, cfg), Error);
  EXPECT_THROW(bce_loss(std::vector<double>{}, std::vector<std::uint8_t>{}, cfg), Error);
  EXPECT_THROW(bce_loss(std::vector<double>{0.5}, std::vector<std::uint8_t>{2}, cfg), Error);
}

TEST(Bce, NeverNegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LossConfig cfg;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> p(5);
    std::vector<std::uint8_t> y(5);
    for (int j = 0; j < 5; ++j) {
      p[j] = unit(rng);
      y[j] = rng() % 2;
    }
    EXPECT_GE(bce_loss(p, y, cfg), 0.0);
  }
}

TEST(RecursiveRegularization, Examples) {
  LossConfig cfg;
  cfg.label_parents = {std::nullopt, 0};
  EXPECT_NEAR(recursive_regularization(DenseMatrix{{1, 0}, {0, 1}}, cfg), 1.0, 1e-9);
  EXPECT_EQ(recursive_regularization(DenseMatrix{{3, 3}, {-1, -1}}, cfg), 0.0);

  std::mt19937_64 rng(8);
  LossConfig chain;
  chain.label_parents = {std::nullopt, 0, 1, 0, 3};
  DenseMatrix wc = testing::random_matrix(6, 5, rng);
  DenseMatrix doubled = wc;
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 5; ++c) doubled(r, c) *= 2.0;
  }
  EXPECT_NEAR(recursive_regularization(doubled, chain), 4.0 * recursive_regularization(wc, chain), 1e-12);
}

TEST(RecursiveRegularization, Errors) {
  LossConfig cfg;
  cfg.label_parents = {1, 2, 0};
  EXPECT_THROW(recursive_regularization(DenseMatrix(2, 3), cfg), Error);
  cfg.label_parents = {std::nullopt, 5, 0};
  EXPECT_THROW(recursive_regularization(DenseMatrix(2, 3), cfg), Error);
  cfg.label_parents = {std::nullopt};
  EXPECT_THROW(recursive_regularization(DenseMatrix(2, 3), cfg), Error);
  cfg.label_parents = {std::nullopt, 1, 0};
  EXPECT_THROW(recursive_regularization(DenseMatrix(2, 3), cfg), Error);
}

TEST(TotalLoss, Examples) {
  LossConfig cfg;
  EXPECT_EQ(cfg.lambda, 1e-6);
  EXPECT_EQ(cfg.prob_clamp, 1e-12);
  cfg.lambda = 0.1;
  EXPECT_NEAR(total_loss(0.5, 2.0, cfg), 0.7, 1e-9);
  cfg.lambda = 0.0;
  EXPECT_EQ(total_loss(0.5, 123.0, cfg), 0.5);
  double previous = 0.0;
  for (double lambda : {0.0, 1e-6, 0.1, 1.0, 10.0}) {
    cfg.lambda = lambda;
    const double l = total_loss(0.3, 1.5, cfg);
    EXPECT_GE(l, previous);
    previous = l;
  }
}

TEST(Encode, ShapeLaw) {
  std::mt19937_64 rng(5);
  for (int k = 1; k <= 4; ++k) {
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t labels = 3 + rng() % 20;
      Graph g = erdos_renyi(labels, 0.3, rng());
      if (g.volume() == 0) continue;
      const std::size_t d_v = 1 + rng() % 5;
      TinWeights w = testing::random_weights(labels, 4, d_v, k, rng);
      auto enc = encode(circa(g, k).tree, testing::random_matrix(1, 4, rng), w);
      EXPECT_EQ(enc.tree_repr.cols(), static_cast<std::size_t>(k + 1) * d_v);
      EXPECT_EQ(enc.tree_repr.cols(), w.tree_dim());
      EXPECT_EQ(enc.levels.size(), static_cast<std::size_t>(k + 1));
      EXPECT_EQ(enc.levels.back().rows(), 1u);
      EXPECT_EQ(enc.probabilities.size(), labels);
      // Large logits saturate to exactly 0 or 1 in double precision.
      for (double p : enc.probabilities) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
      }
    }
  }
}

TEST(Encode, PureFunction) {
  std::mt19937_64 rng(6);
  Graph g = erdos_renyi(15, 0.3, 2);
  CodingTree t = circa(g, 3).tree;
  TinWeights w = testing::random_weights(15, 5, 4, 3, rng);
  DenseMatrix text = testing::random_matrix(1, 5, rng);
  auto a = encode(t, text, w);
  auto b = encode(t, text, w);
  EXPECT_EQ(a.tree_repr, b.tree_repr);
  EXPECT_EQ(a.probabilities, b.probabilities);
}

TEST(Encode, ChildPermutationInvariance) {
  std::mt19937_64 rng(31);
  for (PoolMode pool : {PoolMode::Sum, PoolMode::Average, PoolMode::Max}) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 6 + rng() % 20;
      Graph g = erdos_renyi(n, 0.3, rng());
      if (g.volume() == 0) continue;
      const int k = 2 + static_cast<int>(rng() % 2);
      CodingTree t = circa(g, k).tree;
      TinWeights w = testing::random_weights(n, 3, 4, k, rng, pool);
      DenseMatrix text = testing::random_matrix(1, 3, rng);

      std::vector<VertexId> perm(n);
      std::iota(perm.begin(), perm.end(), 0u);
      std::shuffle(perm.begin(), perm.end(), rng);
      Graph pg = testing::relabeled(g, perm);
      CodingTree pt = testing::relabeled(t, pg, perm);
      TinWeights pw = w;
      for (VertexId v = 0; v < n; ++v) {
        pw.duplication(perm[v], 0) = w.duplication(v, 0);
        for (std::size_t c = 0; c < w.node_dim; ++c) pw.node_bias(perm[v], c) = w.node_bias(v, c);
      }

      auto a = encode(t, text, w);
      auto b = encode(pt, text, pw);
      EXPECT_EQ(a.tree_repr, b.tree_repr);
      EXPECT_EQ(a.probabilities, b.probabilities);
      for (std::size_t level = 0; level < a.levels.size(); ++level) {
        auto rows_a = a.levels[level].to_rows();
        auto rows_b = b.levels[level].to_rows();
        std::sort(rows_a.begin(), rows_a.end());
        std::sort(rows_b.begin(), rows_b.end());
        EXPECT_EQ(rows_a, rows_b) << "level " << level;
      }
    }
  }
}

TEST(Encode, SumPoolIsLinearAtLeafLevel) {
  std::mt19937_64 rng(14);
  TinWeights w = TinWeights::zeros(6, 1, 3, 2);
  std::vector<DenseMatrix> levels{testing::random_matrix(6, 3, rng), testing::random_matrix(2, 3, rng),
                                  testing::random_matrix(1, 3, rng)};
  const DenseMatrix base = readout(levels, w);
  for (double c : {2.0, 0.5, 8.0, 3.0, -1.5}) {
    std::vector<DenseMatrix> scaled = levels;
    for (std::size_t r = 0; r < 6; ++r) {
      for (std::size_t j = 0; j < 3; ++j) scaled[0](r, j) *= c;
    }
    const DenseMatrix out = readout(scaled, w);
    // Positive powers of two scale without rounding, so those must match bit for bit.
    const bool exact = c > 0 && std::exp2(std::round(std::log2(c))) == c;
    for (std::size_t j = 0; j < 3; ++j) {
      if (exact) {
        EXPECT_EQ(out(0, j), c * base(0, j));
      } else {
        EXPECT_NEAR(out(0, j), c * base(0, j), 1e-12);
      }
      EXPECT_EQ(out(0, 3 + j), base(0, 3 + j));
    }
  }
}

TEST(Encode, RejectsMismatchedTree) {
  std::mt19937_64 rng(2);
  Graph g = erdos_renyi(8, 0.5, 3);
  TinWeights w = testing::random_weights(8, 2, 2, 2, rng);
  EXPECT_THROW(encode(circa(g, 3).tree, DenseMatrix(1, 2), w), Error);
  Graph h = erdos_renyi(9, 0.5, 3);
  EXPECT_THROW(encode(circa(h, 2).tree, DenseMatrix(1, 2), w), Error);
  w.mlps.pop_back();
  EXPECT_THROW(encode(circa(g, 2).tree, DenseMatrix(1, 2), w), Error);
}

TEST(Weights, ValidateCatchesBadShapes) {
  TinWeights w = TinWeights::zeros(3, 2, 2, 2);
  EXPECT_NO_THROW(w.validate());
  w.classifier = DenseMatrix(4, 3);
  EXPECT_THROW(w.validate(), Error);
  w = TinWeights::zeros(3, 2, 2, 2);
  w.mlps[1].b1 = DenseMatrix(1, 3);
  EXPECT_THROW(w.validate(), Error);
  w = TinWeights::zeros(3, 2, 2, 2);
  w.projection(0, 0) = std::nan("");
  EXPECT_THROW(w.validate(), Error);
}

TEST(Modes, ParseAndPrint) {
  for (PoolMode m : {PoolMode::Sum, PoolMode::Average, PoolMode::Max}) EXPECT_EQ(parse_pool_mode(to_string(m)), m);
  for (NormMode m : {NormMode::Off, NormMode::Inference}) EXPECT_EQ(parse_norm_mode(to_string(m)), m);
  EXPECT_THROW(parse_pool_mode("median"), Error);
  EXPECT_THROW(parse_norm_mode("batch"), Error);
}

}  // namespace
}  // namespace sectree
