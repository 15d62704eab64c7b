#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sectree {

using VertexId = std::uint32_t;

/// Undirected, unweighted simple graph over dense vertex ids 0..n-1.
///
/// Immutable once built. Adjacency lists are sorted and symmetric, with no
/// self-loops and no parallel edges.
class Graph {
 public:
  /// The empty graph.
  Graph();

  /// Builds a graph on `n` vertices. Duplicate edges are collapsed; a
  /// self-loop or an out-of-range endpoint throws `Error`.
  static Graph from_edges(std::size_t n,
                          std::span<const std::pair<VertexId, VertexId>> edges,
                          std::vector<std::string> names = {});

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  /// Sum of all degrees, i.e. twice the edge count.
  std::int64_t volume() const { return 2 * static_cast<std::int64_t>(edge_count_); }

  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_.at(v); }
  std::int64_t degree(VertexId v) const {
    return static_cast<std::int64_t>(adjacency_.at(v).size());
  }
  bool has_edge(VertexId u, VertexId v) const;

  /// Edges as (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

  bool has_names() const { return !names_.empty(); }
  /// Vertex label, or the decimal id when the graph carries no names.
  std::string name(VertexId v) const;
  std::optional<VertexId> find(std::string_view name) const;

  /// 64-bit FNV-1a digest of (n, sorted edge list). Identifies the graph a
  /// serialized coding tree was built for.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, VertexId> index_;
  std::size_t edge_count_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Parses `u v` pairs, one per line. Blank lines and lines whose first
/// non-blank character is `#` are skipped. Tokens get dense ids in
/// first-appearance order. A self-loop or a line with other than two tokens
/// throws `ParseError` carrying the line number.
Graph from_edge_list(std::string_view text);

/// A label hierarchy read from a taxonomy dump.
struct Taxonomy {
  Graph graph;                                   ///< undirected G_L, root included
  VertexId root = 0;                             ///< first token of the first line
  std::vector<std::vector<VertexId>> parents;    ///< per-vertex parents, in file order
  std::vector<std::string> warnings;

  /// Labels other than the root.
  std::size_t label_count() const { return graph.vertex_count() - 1; }
  std::size_t depth() const;                     ///< longest root-to-label path
};

/// Parses `parent child [child ...]` lines separated by tabs or spaces.
/// A label listed under two parents is kept (as an extra undirected edge) and
/// reported in `warnings`; a directed cycle throws `ParseError`.
Taxonomy from_taxonomy(std::string_view text);

/// Vertex set together with its volume and cut (edges with exactly one
/// endpoint inside).
struct VertexSubset {
  std::vector<VertexId> members;  // sorted, unique
  std::int64_t volume = 0;
  std::int64_t cut = 0;
};

/// Exact volume and cut of `members`; duplicates are ignored.
/// Throws `Error` for an id outside the graph.
VertexSubset subset_stats(const Graph& g, std::span<const VertexId> members);

}  // namespace sectree
