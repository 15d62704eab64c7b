#pragma once

#include <random>

#include "sectree/tin_encoder.hpp"

namespace sectree::testing {

/// Weights with every entry uniform in [-1, 1] and normalization scale in [0.5, 1.5].
TinWeights random_weights(std::size_t labels, std::size_t text_dim, std::size_t node_dim, int height,
                          std::mt19937_64& rng, PoolMode pool = PoolMode::Sum,
                          NormMode norm = NormMode::Inference);

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

}  // namespace sectree::testing
