#pragma once

#include <cstdint>
#include <vector>

#include "sectree/coding_tree.hpp"
#include "sectree/graph.hpp"

namespace sectree {

/// Structural entropy of a graph on a coding tree, in bits, with the
/// contribution of every non-root node.
struct EntropyReport {
  struct Term {
    NodeId node;
    double value;
  };
  double total = 0.0;
  std::vector<Term> terms;  // ascending node id
  int log_base = 2;
};

/// Contribution of one non-root node: -(g/vol(G)) * log2(vol/parent_vol).
/// Zero when the out-degree or the node volume is zero.
double entropy_term(std::int64_t graph_volume, std::int64_t volume, std::int64_t parent_volume,
                    std::int64_t out_degree);

/// Recomputes volumes and out-degrees from the graph, ignoring the tree's
/// caches. Throws `Error` for an edgeless graph or a tree built for another graph.
EntropyReport structural_entropy(const Graph& g, const CodingTree& t);

/// Entropy of the star tree, -sum_v (d_v/vol) log2(d_v/vol).
double one_dim_entropy(const Graph& g);

/// Entropy change of merging two root children with volumes summing to
/// `merged_volume` and `cut` edges between them.
double merge_delta(std::int64_t graph_volume, std::int64_t merged_volume, std::int64_t cut);
/// H(T.merge(a, b)) - H(T). Same preconditions as CodingTree::merge.
double merge_delta(const Graph& g, const CodingTree& t, NodeId a, NodeId b);

/// H(T.remove(v)) - H(T), from the tree caches in O(children). Never negative.
double delete_delta(const Graph& g, const CodingTree& t, NodeId v);

/// Minimum entropy over all coding trees of height at most `k`, with a
/// witness tree of height exactly `k`, found by enumerating nested set
/// partitions. Limited to n <= 8 for k = 2, n <= 6 for k = 3,
/// n <= 5 for k = 4 and n <= 4 above that.
struct OptimalTree {
  double entropy;
  CodingTree tree;
};
OptimalTree brute_force_k_entropy(const Graph& g, int k);

}  // namespace sectree
