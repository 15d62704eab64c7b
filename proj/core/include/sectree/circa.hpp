#pragma once

#include <cstdint>
#include <vector>

#include "sectree/coding_tree.hpp"
#include "sectree/graph.hpp"

namespace sectree {

/// What the three construction stages did.
struct CircaTrace {
  std::vector<double> stage1_deltas;  ///< merge deltas, in merge order (each <= 0)
  std::vector<double> stage2_deltas;  ///< delete deltas, in delete order (each >= 0)
  int h_max = 0;                      ///< tree height at the end of stage 1
  std::size_t shifts = 0;             ///< nodes inserted by stage 3 alignment
  std::size_t padded_layers = 0;      ///< layers added to reach the target height
  double final_entropy = 0.0;
};

struct CircaResult {
  CodingTree tree;
  CircaTrace trace;
};

/// Greedy minimum-entropy coding tree of height exactly `k`.
///
/// Stage 1 merges root children pairwise, always taking the pair with the
/// most negative entropy delta, until the root has two children. Stage 2
/// deletes the internal node with the smallest entropy increase until the
/// height is at most `k`. Stage 3 inserts single-child nodes so every edge
/// spans adjacent levels, then pads to height `k`. Ties go to the pair (or
/// node) with the smallest (min leaf, max leaf). The returned tree is compacted.
///
/// Throws `Error` when the graph is empty or edgeless, or `k < 1`.
CircaResult circa(const Graph& g, int k);

/// The stages on their own, operating on a tree in place. merge_to_binary
/// expects a star tree.
void merge_to_binary(const Graph& g, CodingTree& t, CircaTrace& trace);
void squeeze_to_height(const Graph& g, CodingTree& t, int k, CircaTrace& trace);
void align_layers(CodingTree& t, int k, CircaTrace& trace);

/// Random-pairing baseline. Each of k-1 rounds shuffles the root children with
/// a generator seeded by `seed` and merges them in adjacent pairs (an odd one
/// out stays unpaired); the result is aligned like circa() and has height `k`.
CodingTree random_tree(const Graph& g, int k, std::uint64_t seed);

}  // namespace sectree
