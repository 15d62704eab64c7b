#include "sectree/tin_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "sectree/error.hpp"

namespace sectree {

std::string to_string(PoolMode mode) {
  switch (mode) {
    case PoolMode::Sum: return "sum";
    case PoolMode::Average: return "avg";
    case PoolMode::Max: return "max";
  }
  return "sum";
}

std::string to_string(NormMode mode) { return mode == NormMode::Off ? "off" : "inference"; }

PoolMode parse_pool_mode(const std::string& text) {
  if (text == "sum") return PoolMode::Sum;
  if (text == "avg" || text == "average" || text == "mean") return PoolMode::Average;
  if (text == "max") return PoolMode::Max;
  throw Error("unknown pool mode '" + text + "' (expected sum, avg or max)");
}

NormMode parse_norm_mode(const std::string& text) {
  if (text == "off" || text == "none") return NormMode::Off;
  if (text == "inference") return NormMode::Inference;
  throw Error("unknown normalization mode '" + text + "' (expected off or inference)");
}

namespace {

void expect_shape(const DenseMatrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error("weights: " + what + " is " + m.shape() + ", expected " + std::to_string(rows) + "x" +
                std::to_string(cols));
  }
  if (!m.all_finite()) throw Error("weights: " + what + " has a non-finite entry");
}

// Order-independent sum: the multiset determines every bit of the result.
double sorted_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double x : values) total += x;
  return total;
}

DenseMatrix apply_mlp(const MlpWeights& mlp, NormMode norm, const DenseMatrix& x) {
  DenseMatrix hidden = matmul(x, mlp.w1);
  for (std::size_t r = 0; r < hidden.rows(); ++r) {
    for (std::size_t c = 0; c < hidden.cols(); ++c) {
      double h = hidden(r, c) + mlp.b1(0, c);
      if (norm == NormMode::Inference) h = h * mlp.scale(0, c) + mlp.shift(0, c);
      hidden(r, c) = std::max(h, 0.0);
    }
  }
  DenseMatrix out = matmul(hidden, mlp.w2);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += mlp.b2(0, c);
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_tree_fits(const CodingTree& tree, const TinWeights& w) {
  if (!tree.is_aligned()) throw Error("encoder: tree has edges spanning more than one level");
  if (tree.height() != w.height) {
    throw Error("encoder: tree height " + std::to_string(tree.height()) + " but weights declare K=" +
                std::to_string(w.height));
  }
}

}  // namespace

void TinWeights::validate() const {
  if (labels == 0 || text_dim == 0 || node_dim == 0) throw Error("weights: dimensions must be positive");
  if (height < 1) throw Error("weights: K must be at least 1");
  expect_shape(duplication, labels, 1, "duplication");
  expect_shape(projection, text_dim, node_dim, "projection");
  expect_shape(node_bias, labels, node_dim, "node bias");
  if (mlps.size() != static_cast<std::size_t>(height)) {
    throw Error("weights: " + std::to_string(mlps.size()) + " MLPs for K=" + std::to_string(height));
  }
  for (std::size_t i = 0; i < mlps.size(); ++i) {
    const std::string tag = "mlp[" + std::to_string(i + 1) + "].";
    expect_shape(mlps[i].w1, node_dim, node_dim, tag + "w1");
    expect_shape(mlps[i].b1, 1, node_dim, tag + "b1");
    expect_shape(mlps[i].w2, node_dim, node_dim, tag + "w2");
    expect_shape(mlps[i].b2, 1, node_dim, tag + "b2");
    if (norm == NormMode::Inference) {
      expect_shape(mlps[i].scale, 1, node_dim, tag + "scale");
      expect_shape(mlps[i].shift, 1, node_dim, tag + "shift");
    }
  }
  expect_shape(classifier, tree_dim(), labels, "classifier");
  expect_shape(classifier_bias, 1, labels, "classifier bias");
}

TinWeights TinWeights::zeros(std::size_t labels, std::size_t text_dim, std::size_t node_dim, int height) {
  TinWeights w;
  w.labels = labels;
  w.text_dim = text_dim;
  w.node_dim = node_dim;
  w.height = height;
  w.duplication = DenseMatrix(labels, 1);
  w.projection = DenseMatrix(text_dim, node_dim);
  w.node_bias = DenseMatrix(labels, node_dim);
  for (int i = 0; i < height; ++i) {
    w.mlps.push_back({DenseMatrix(node_dim, node_dim), DenseMatrix(1, node_dim), DenseMatrix(node_dim, node_dim),
                      DenseMatrix(1, node_dim), DenseMatrix(1, node_dim, 1.0), DenseMatrix(1, node_dim)});
  }
  w.classifier = DenseMatrix(w.tree_dim(), labels);
  w.classifier_bias = DenseMatrix(1, labels);
  return w;
}

DenseMatrix duplicate_project(const DenseMatrix& text, const TinWeights& w) {
  if (text.rows() != 1 || text.cols() != w.text_dim) {
    throw Error("encoder: text representation is " + text.shape() + ", expected 1x" + std::to_string(w.text_dim));
  }
  expect_shape(w.duplication, w.labels, 1, "duplication");
  expect_shape(w.projection, w.text_dim, w.node_dim, "projection");
  expect_shape(w.node_bias, w.labels, w.node_dim, "node bias");
  DenseMatrix out = matmul(matmul(w.duplication, text), w.projection);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += w.node_bias(r, c);
  }
  return out;
}

DenseMatrix tin_layer(const CodingTree& tree, int level, const DenseMatrix& previous, const TinWeights& w) {
  check_tree_fits(tree, w);
  if (level < 1 || level > tree.height()) {
    throw Error("encoder: level " + std::to_string(level) + " outside 1.." + std::to_string(tree.height()));
  }
  const auto levels = tree.levels();
  const auto& below = levels[static_cast<std::size_t>(level - 1)];
  const auto& here = levels[static_cast<std::size_t>(level)];
  if (previous.rows() != below.size() || previous.cols() != w.node_dim) {
    throw Error("encoder: level " + std::to_string(level - 1) + " embeddings are " + previous.shape() +
                ", expected " + std::to_string(below.size()) + "x" + std::to_string(w.node_dim));
  }
  std::unordered_map<NodeId, std::size_t> row_of;
  for (std::size_t i = 0; i < below.size(); ++i) row_of.emplace(below[i], i);

  DenseMatrix summed(here.size(), w.node_dim);
  std::vector<double> column;
  for (std::size_t i = 0; i < here.size(); ++i) {
    const auto& kids = tree.node(here[i]).children;
    for (std::size_t c = 0; c < w.node_dim; ++c) {
      column.clear();
      for (NodeId kid : kids) {
        auto it = row_of.find(kid);
        if (it == row_of.end()) {
          throw Error("encoder: no embedding for child " + std::to_string(kid) + " of node " +
                      std::to_string(here[i]));
        }
        column.push_back(previous(it->second, c));
      }
      summed(i, c) = sorted_sum(column);
    }
  }
  const auto& mlp = w.mlps.at(static_cast<std::size_t>(level - 1));
  return apply_mlp(mlp, w.norm, summed);
}

DenseMatrix readout(std::span<const DenseMatrix> levels, const TinWeights& w) {
  if (levels.size() != static_cast<std::size_t>(w.height) + 1) {
    throw Error("readout: " + std::to_string(levels.size()) + " levels, expected " + std::to_string(w.height + 1));
  }
  DenseMatrix out(1, w.tree_dim());
  std::vector<double> column;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const DenseMatrix& x = levels[i];
    if (x.rows() == 0) throw Error("readout: level " + std::to_string(i) + " is empty");
    if (x.cols() != w.node_dim) {
      throw Error("readout: level " + std::to_string(i) + " has width " + std::to_string(x.cols()));
    }
    for (std::size_t c = 0; c < w.node_dim; ++c) {
      double pooled;
      if (w.pool == PoolMode::Max) {
        pooled = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < x.rows(); ++r) pooled = std::max(pooled, x(r, c));
      } else {
        column.clear();
        for (std::size_t r = 0; r < x.rows(); ++r) column.push_back(x(r, c));
        pooled = sorted_sum(column);
        if (w.pool == PoolMode::Average) pooled /= static_cast<double>(x.rows());
      }
      out(0, i * w.node_dim + c) = pooled;
    }
  }
  return out;
}

std::vector<double> classify(const DenseMatrix& tree_repr, const TinWeights& w) {
  if (tree_repr.rows() != 1 || tree_repr.cols() != w.tree_dim()) {
    throw Error("classifier: tree representation is " + tree_repr.shape() + ", expected 1x" +
                std::to_string(w.tree_dim()));
  }
  expect_shape(w.classifier, w.tree_dim(), w.labels, "classifier");
  expect_shape(w.classifier_bias, 1, w.labels, "classifier bias");
  DenseMatrix logits = matmul(tree_repr, w.classifier);
  std::vector<double> p(w.labels);
  for (std::size_t j = 0; j < w.labels; ++j) p[j] = sigmoid(logits(0, j) + w.classifier_bias(0, j));
  return p;
}

Encoding encode(const CodingTree& tree, const DenseMatrix& text, const TinWeights& w) {
  w.validate();
  check_tree_fits(tree, w);
  if (tree.vertex_count() != w.labels) {
    throw Error("encoder: tree has " + std::to_string(tree.vertex_count()) + " leaves but weights declare " +
                std::to_string(w.labels) + " labels");
  }
  Encoding enc;
  enc.levels.push_back(duplicate_project(text, w));
  for (int i = 1; i <= w.height; ++i) enc.levels.push_back(tin_layer(tree, i, enc.levels.back(), w));
  enc.tree_repr = readout(enc.levels, w);
  enc.probabilities = classify(enc.tree_repr, w);
  return enc;
}

double bce_loss(std::span<const double> probabilities, std::span<const std::uint8_t> truth, const LossConfig& cfg) {
  if (probabilities.size() != truth.size()) {
    throw Error("bce: " + std::to_string(probabilities.size()) + " probabilities for " +
                std::to_string(truth.size()) + " labels");
  }
  if (probabilities.empty()) throw Error("bce: no labels");
  const double eps = cfg.prob_clamp;
  double total = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (truth[j] > 1) throw Error("bce: truth entries must be 0 or 1");
    const double p = std::clamp(probabilities[j], eps, 1.0 - eps);
    total += truth[j] ? std::log(p) : std::log(1.0 - p);
  }
  return -total / static_cast<double>(truth.size());
}

double recursive_regularization(const DenseMatrix& classifier, const LossConfig& cfg) {
  const std::size_t labels = classifier.cols();
  if (cfg.label_parents.size() != labels) {
    throw Error("regularization: " + std::to_string(cfg.label_parents.size()) + " parent entries for " +
                std::to_string(labels) + " labels");
  }
  // 0 = unvisited, 1 = on the current chain, 2 = known to reach a root.
  std::vector<char> state(labels, 0);
  for (std::size_t start = 0; start < labels; ++start) {
    std::vector<std::size_t> chain;
    std::size_t cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      const auto& parent = cfg.label_parents[cur];
      if (!parent) break;
      if (*parent >= labels) throw Error("regularization: parent index " + std::to_string(*parent) + " out of range");
      cur = *parent;
      if (state[cur] == 1) throw Error("regularization: label parents form a cycle through " + std::to_string(cur));
    }
    for (std::size_t v : chain) state[v] = 2;
  }
  double total = 0.0;
  for (std::size_t q = 0; q < labels; ++q) {
    if (!cfg.label_parents[q]) continue;
    const std::size_t p = *cfg.label_parents[q];
    double sq = 0.0;
    for (std::size_t r = 0; r < classifier.rows(); ++r) {
      const double d = classifier(r, p) - classifier(r, q);
      sq += d * d;
    }
    total += 0.5 * sq;
  }
  return total;
}

double total_loss(double classification, double regularization, const LossConfig& cfg) {
  return classification + cfg.lambda * regularization;
}

}  // namespace sectree
