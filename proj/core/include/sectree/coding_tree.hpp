#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectree/graph.hpp"

namespace sectree {

using NodeId = std::uint32_t;

/// One node of a coding tree. A node's marker (vertex subset) is never stored;
/// it is the set of leaf vertices below it.
struct TreeNode {
  std::optional<NodeId> parent;
  std::vector<NodeId> children;  // ascending by min_leaf
  int height = 0;                // longest path down to a leaf
  std::int64_t volume = 0;       // sum of marker degrees
  std::int64_t out_degree = 0;   // edges with exactly one endpoint in the marker
  std::optional<VertexId> leaf_vertex;
  VertexId min_leaf = 0;
  VertexId max_leaf = 0;
  bool alive = true;

  bool is_leaf() const { return children.empty(); }
};

/// Parent link used to assemble a tree directly. Entry i describes node i.
struct NodeLink {
  std::optional<NodeId> parent;
  std::optional<VertexId> leaf_vertex;
  // Only read by the graph-less overload of CodingTree::from_links.
  std::int64_t volume = 0;
  std::int64_t out_degree = 0;
};

/// Rooted tree whose leaves biject to the vertices of a graph.
///
/// Nodes live in an arena and keep their ids for the lifetime of the tree;
/// removed nodes become tombstones until compacted(). Children lists stay
/// sorted by the smallest leaf vertex below each child, which fixes every
/// traversal and serialization order.
///
/// The tree does not hold a reference to its graph. Operations that need
/// edges take the graph as an argument and check its fingerprint.
class CodingTree {
 public:
  /// Height-1 tree: the root with one leaf per vertex. Leaf i holds vertex i
  /// and the root is node n. Throws `Error` for an empty graph.
  static CodingTree star(const Graph& g);

  /// Assembles a tree from parent links, computing caches from `g`. Throws
  /// `Error` when the links do not form a single rooted tree; coding-tree
  /// properties (partition, singleton leaves, coverage) are left to validate().
  static CodingTree from_links(const Graph& g, std::span<const NodeLink> links);
  /// As above, but volumes and out-degrees are taken from the links.
  static CodingTree from_links(std::span<const NodeLink> links, std::size_t vertex_count,
                               std::uint64_t graph_fingerprint);

  NodeId root() const { return root_; }
  const TreeNode& node(NodeId id) const;
  bool contains(NodeId id) const { return id < nodes_.size() && nodes_[id].alive; }
  int height() const { return nodes_[root_].height; }

  std::size_t vertex_count() const { return leaf_of_.size(); }
  std::uint64_t graph_fingerprint() const { return fingerprint_; }
  /// Leaf node holding `v`, if any.
  std::optional<NodeId> leaf_of(VertexId v) const;

  /// Arena size, tombstones included. Valid ids are below this.
  std::size_t capacity() const { return nodes_.size(); }
  std::size_t node_count() const { return live_count_; }
  /// Live node ids in ascending order.
  std::vector<NodeId> node_ids() const;

  int depth(NodeId id) const;
  /// Leaf vertices below `id`, ascending.
  std::vector<VertexId> marker(NodeId id) const;
  /// Number of edges between the markers of two nodes with disjoint markers.
  std::int64_t cut_between(const Graph& g, NodeId a, NodeId b) const;

  /// True when every edge joins nodes whose heights differ by exactly one.
  bool is_aligned() const;
  /// Nodes grouped by height, each group ascending by min_leaf. In an aligned
  /// tree, entry i is the layer i levels above the leaves.
  std::vector<std::vector<NodeId>> levels() const;

  /// Joins two children of the root under a new child of the root and returns
  /// its id. Throws `Error` if either argument is not a root child or a == b.
  NodeId merge(const Graph& g, NodeId a, NodeId b);
  /// merge() with the edge count between the two markers supplied by the caller.
  NodeId merge(NodeId a, NodeId b, std::int64_t cut);

  /// Deletes an internal non-root node and hands its children to its parent.
  void remove(NodeId id);

  /// Inserts a node with the same marker between `id` and its parent. The
  /// parent must sit more than one height level above `id`.
  NodeId shift(NodeId id);

  /// Puts a single-child node above every child of the root, raising the tree
  /// height by one without changing any marker partition.
  void add_layer_below_root();

  /// Copy with tombstones dropped and nodes renumbered by (height, min_leaf):
  /// leaves first, in vertex order, and the root last.
  CodingTree compacted() const;

 private:
  CodingTree() = default;

  TreeNode& mutable_node(NodeId id);
  NodeId new_node();
  NodeId insert_above(NodeId id);
  void replace_child(NodeId parent, NodeId old_child, NodeId new_child);
  void refresh_heights_from(NodeId id);
  void finish_assembly(std::span<const NodeLink> links, std::size_t vertex_count);
  bool key_less(NodeId a, NodeId b) const { return nodes_[a].min_leaf < nodes_[b].min_leaf; }

  std::vector<TreeNode> nodes_;
  std::vector<std::optional<NodeId>> leaf_of_;
  NodeId root_ = 0;
  std::size_t live_count_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Coding-tree properties. The roman-numbered ones follow the usual
/// definition: (i) non-empty markers, (ii) the root marker is V,
/// (iii) children partition their parent, (iv) leaves are singletons in
/// bijection with V.
enum class TreeProperty {
  Structure,       // parent/child links, acyclicity, heights, child order
  NonEmptyMarker,  // (i)
  RootMarker,      // (ii)
  Partition,       // (iii)
  SingletonLeaf,   // (iv)
  Caches,          // volume / out-degree / leaf range caches
  GraphMismatch,   // tree was built for a different graph
};

std::string to_string(TreeProperty p);

struct ValidationReport {
  std::optional<TreeProperty> violated;
  std::optional<NodeId> node;
  std::string message;

  bool ok() const { return !violated.has_value(); }
  explicit operator bool() const { return ok(); }
};

/// Checks structure and properties (i)-(iv), then caches against `g`.
/// Reports the first violation found.
ValidationReport validate(const CodingTree& t, const Graph& g);
/// Structure and properties (i)-(iv) only, for a tree over `vertex_count` vertices.
ValidationReport validate_structure(const CodingTree& t, std::size_t vertex_count);

}  // namespace sectree
