#pragma once

#include <nlohmann/json.hpp>

#include "sectree/circa.hpp"
#include "sectree/coding_tree.hpp"
#include "sectree/entropy.hpp"
#include "sectree/graph.hpp"
#include "sectree/tin_encoder.hpp"

namespace sectree {

/// {"root", "graph_hash", "nodes": [{"id", "parent", "children", "height",
/// "volume", "out_degree", "leaf_vertex"?}]}. The tree is compacted first, so
/// writing a loaded tree reproduces the same document.
nlohmann::json tree_to_json(const CodingTree& t);

/// Loads a tree written by tree_to_json and checks it against `g`: the graph
/// hash, every cached value, and all coding-tree properties. Throws `Error`.
CodingTree tree_from_json(const nlohmann::json& doc, const Graph& g);
/// Graph-less load: structure and properties only; caches are taken as written.
CodingTree tree_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const EntropyReport& report, const CodingTree& t, const Graph& g);
nlohmann::json trace_to_json(const CircaTrace& trace);

/// Weights document: {"labels", "d_h", "d_v", "k", "pool", "norm",
/// "w_d", "w_p", "b_h", "mlps": [{"w1", "b1", "w2", "b2", "scale"?, "shift"?}],
/// "w_c", "b_c"}. Matrices are arrays of rows; b1, b2, scale, shift and b_c
/// are flat arrays. Shapes are validated on load.
TinWeights weights_from_json(const nlohmann::json& doc);
nlohmann::json weights_to_json(const TinWeights& w);

/// `value` rounded to `digits` significant digits, for stable text output.
double round_significant(double value, int digits = 7);

}  // namespace sectree
