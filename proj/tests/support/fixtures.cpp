#include "fixtures.hpp"

namespace sectree::testing {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = unit(rng);
  }
  return m;
}

TinWeights random_weights(std::size_t labels, std::size_t text_dim, std::size_t node_dim, int height,
                          std::mt19937_64& rng, PoolMode pool, NormMode norm) {
  TinWeights w = TinWeights::zeros(labels, text_dim, node_dim, height);
  w.pool = pool;
  w.norm = norm;
  w.duplication = random_matrix(labels, 1, rng);
  w.projection = random_matrix(text_dim, node_dim, rng);
  w.node_bias = random_matrix(labels, node_dim, rng);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  for (auto& mlp : w.mlps) {
    mlp.w1 = random_matrix(node_dim, node_dim, rng);
    mlp.b1 = random_matrix(1, node_dim, rng);
    mlp.w2 = random_matrix(node_dim, node_dim, rng);
    mlp.b2 = random_matrix(1, node_dim, rng);
    for (std::size_t c = 0; c < node_dim; ++c) mlp.scale(0, c) = scale(rng);
    mlp.shift = random_matrix(1, node_dim, rng);
  }
  w.classifier = random_matrix(w.tree_dim(), labels, rng);
  w.classifier_bias = random_matrix(1, labels, rng);
  return w;
}

}  // namespace sectree::testing
