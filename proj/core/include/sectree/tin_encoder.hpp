#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectree/coding_tree.hpp"
#include "sectree/dense_matrix.hpp"

namespace sectree {

enum class PoolMode { Sum, Average, Max };
enum class NormMode { Off, Inference };

std::string to_string(PoolMode mode);
std::string to_string(NormMode mode);
PoolMode parse_pool_mode(const std::string& text);
NormMode parse_norm_mode(const std::string& text);

/// Two-layer perceptron applied at one tree level:
/// affine -> normalization -> ReLU -> affine.
struct MlpWeights {
  DenseMatrix w1;     // d_V x d_V
  DenseMatrix b1;     // 1 x d_V
  DenseMatrix w2;     // d_V x d_V
  DenseMatrix b2;     // 1 x d_V
  DenseMatrix scale;  // 1 x d_V, inference-mode normalization (folded)
  DenseMatrix shift;  // 1 x d_V
};

/// Every parameter of the tree encoder and its classifier head.
struct TinWeights {
  std::size_t labels = 0;     // |Y|
  std::size_t text_dim = 0;   // d_H
  std::size_t node_dim = 0;   // d_V
  int height = 0;             // K
  DenseMatrix duplication;    // |Y| x 1
  DenseMatrix projection;     // d_H x d_V
  DenseMatrix node_bias;      // |Y| x d_V
  std::vector<MlpWeights> mlps;  // one per level 1..K
  DenseMatrix classifier;     // d_T x |Y|
  DenseMatrix classifier_bias;   // 1 x |Y|
  PoolMode pool = PoolMode::Sum;
  NormMode norm = NormMode::Off;

  /// (K + 1) * d_V.
  std::size_t tree_dim() const { return static_cast<std::size_t>(height + 1) * node_dim; }

  /// Throws `Error` naming the first inconsistent shape or non-finite value.
  void validate() const;

  /// All-zero weights of the declared dimensions (normalization scale 1).
  static TinWeights zeros(std::size_t labels, std::size_t text_dim, std::size_t node_dim, int height);
};

/// X_G = W_d * H * W_p + B_H, one row per label.
DenseMatrix duplicate_project(const DenseMatrix& text, const TinWeights& w);

/// Embeddings of the nodes at `level` (ascending min_leaf order) from those of
/// the level below: each node gets MLP_level of the sum of its children's rows.
/// Sums are accumulated in sorted order, so reordering siblings cannot change a
/// single bit of the result.
DenseMatrix tin_layer(const CodingTree& tree, int level, const DenseMatrix& previous,
                      const TinWeights& w);

/// Pools each level and concatenates the pooled rows, level 0 first.
DenseMatrix readout(std::span<const DenseMatrix> levels, const TinWeights& w);

/// sigmoid(H_T * W_c + b_c).
std::vector<double> classify(const DenseMatrix& tree_repr, const TinWeights& w);

struct Encoding {
  std::vector<DenseMatrix> levels;  // level 0 (leaves) .. K (root)
  DenseMatrix tree_repr;            // 1 x d_T
  std::vector<double> probabilities;
};

/// Full forward pass for one document representation `text` (1 x d_H). The
/// tree must be aligned, of height K, with one leaf per label.
Encoding encode(const CodingTree& tree, const DenseMatrix& text, const TinWeights& w);

struct LossConfig {
  double lambda = 1e-6;
  std::vector<std::optional<std::size_t>> label_parents;
  double prob_clamp = 1e-12;
};

/// Mean binary cross-entropy over labels, natural log, probabilities clamped
/// to [eps, 1 - eps].
double bce_loss(std::span<const double> probabilities, std::span<const std::uint8_t> truth,
                const LossConfig& cfg);

/// Sum over parent/child label pairs of 0.5 * ||w_parent - w_child||^2, where
/// w_j is column j of the classifier. Throws `Error` on a parent cycle.
double recursive_regularization(const DenseMatrix& classifier, const LossConfig& cfg);

/// classification + lambda * regularization.
double total_loss(double classification, double regularization, const LossConfig& cfg);

}  // namespace sectree
