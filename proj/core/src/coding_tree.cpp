#include "sectree/coding_tree.hpp"

#include <algorithm>
#include <iterator>

#include "sectree/error.hpp"

namespace sectree {

namespace {

constexpr VertexId kNoLeaf = std::numeric_limits<VertexId>::max();

std::string id_str(NodeId id) { return std::to_string(id); }

}  // namespace

CodingTree CodingTree::star(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw Error("coding tree: graph has no vertices");
  CodingTree t;
  t.fingerprint_ = g.fingerprint();
  t.nodes_.resize(n + 1);
  t.leaf_of_.resize(n);
  t.root_ = static_cast<NodeId>(n);
  TreeNode& root = t.nodes_[n];
  root.height = 1;
  root.volume = g.volume();
  root.min_leaf = 0;
  root.max_leaf = static_cast<VertexId>(n - 1);
  root.children.reserve(n);
  for (VertexId v = 0; v < n; ++v) {
    TreeNode& leaf = t.nodes_[v];
    leaf.parent = t.root_;
    leaf.leaf_vertex = v;
    leaf.min_leaf = leaf.max_leaf = v;
    leaf.volume = g.degree(v);
    leaf.out_degree = g.degree(v);
    root.children.push_back(v);
    t.leaf_of_[v] = v;
  }
  t.live_count_ = n + 1;
  return t;
}

void CodingTree::finish_assembly(std::span<const NodeLink> links, std::size_t vertex_count) {
  const std::size_t count = links.size();
  if (count == 0) throw Error("coding tree: no nodes");
  nodes_.assign(count, TreeNode{});
  leaf_of_.assign(vertex_count, std::nullopt);
  std::optional<NodeId> root;
  for (NodeId id = 0; id < count; ++id) {
    const NodeLink& link = links[id];
    TreeNode& node = nodes_[id];
    if (link.parent) {
      if (*link.parent >= count) {
        throw Error("coding tree: node " + id_str(id) + " has unknown parent " + id_str(*link.parent));
      }
      if (*link.parent == id) throw Error("coding tree: node " + id_str(id) + " is its own parent");
      node.parent = link.parent;
      nodes_[*link.parent].children.push_back(id);
    } else {
      if (root) throw Error("coding tree: nodes " + id_str(*root) + " and " + id_str(id) + " both lack a parent");
      root = id;
    }
    if (link.leaf_vertex) {
      if (*link.leaf_vertex >= vertex_count) {
        throw Error("coding tree: node " + id_str(id) + " holds vertex " +
                    std::to_string(*link.leaf_vertex) + " outside the graph");
      }
      node.leaf_vertex = link.leaf_vertex;
      if (!leaf_of_[*link.leaf_vertex]) leaf_of_[*link.leaf_vertex] = id;
    }
  }
  if (!root) throw Error("coding tree: no root (every node has a parent)");
  root_ = *root;

  // Preorder from the root; anything unreached sits on a cycle.
  std::vector<NodeId> order;
  order.reserve(count);
  order.push_back(root_);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (NodeId c : nodes_[order[i]].children) order.push_back(c);
  }
  if (order.size() != count) throw Error("coding tree: parent links contain a cycle");

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TreeNode& node = nodes_[*it];
    node.min_leaf = kNoLeaf;
    node.max_leaf = 0;
    if (node.leaf_vertex) node.min_leaf = node.max_leaf = *node.leaf_vertex;
    node.height = 0;
    for (NodeId c : node.children) {
      node.min_leaf = std::min(node.min_leaf, nodes_[c].min_leaf);
      if (nodes_[c].min_leaf != kNoLeaf) node.max_leaf = std::max(node.max_leaf, nodes_[c].max_leaf);
      node.height = std::max(node.height, nodes_[c].height + 1);
    }
  }
  for (TreeNode& node : nodes_) {
    std::stable_sort(node.children.begin(), node.children.end(),
                     [&](NodeId a, NodeId b) { return key_less(a, b); });
  }
  live_count_ = count;
}

CodingTree CodingTree::from_links(const Graph& g, std::span<const NodeLink> links) {
  CodingTree t;
  t.fingerprint_ = g.fingerprint();
  t.finish_assembly(links, g.vertex_count());
  std::vector<std::uint32_t> stamp(g.vertex_count(), 0);
  std::uint32_t current = 0;
  for (NodeId id = 0; id < t.nodes_.size(); ++id) {
    auto members = t.marker(id);
    ++current;
    for (VertexId v : members) stamp[v] = current;
    std::int64_t volume = 0;
    std::int64_t cut = 0;
    for (VertexId v : members) {
      volume += g.degree(v);
      for (VertexId w : g.neighbors(v)) {
        if (stamp[w] != current) ++cut;
      }
    }
    t.nodes_[id].volume = volume;
    t.nodes_[id].out_degree = cut;
  }
  return t;
}

CodingTree CodingTree::from_links(std::span<const NodeLink> links, std::size_t vertex_count,
                                  std::uint64_t graph_fingerprint) {
  CodingTree t;
  t.fingerprint_ = graph_fingerprint;
  t.finish_assembly(links, vertex_count);
  for (NodeId id = 0; id < t.nodes_.size(); ++id) {
    t.nodes_[id].volume = links[id].volume;
    t.nodes_[id].out_degree = links[id].out_degree;
  }
  return t;
}

const TreeNode& CodingTree::node(NodeId id) const {
  if (!contains(id)) throw Error("coding tree: no live node " + id_str(id));
  return nodes_[id];
}

TreeNode& CodingTree::mutable_node(NodeId id) {
  if (!contains(id)) throw Error("coding tree: no live node " + id_str(id));
  return nodes_[id];
}

std::optional<NodeId> CodingTree::leaf_of(VertexId v) const {
  if (v >= leaf_of_.size()) return std::nullopt;
  return leaf_of_[v];
}

std::vector<NodeId> CodingTree::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(live_count_);
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].alive) ids.push_back(id);
  }
  return ids;
}

int CodingTree::depth(NodeId id) const {
  int d = 0;
  for (auto p = node(id).parent; p; p = nodes_[*p].parent) ++d;
  return d;
}

std::vector<VertexId> CodingTree::marker(NodeId id) const {
  std::vector<VertexId> out;
  std::vector<NodeId> stack{id};
  node(id);
  while (!stack.empty()) {
    const TreeNode& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.leaf_vertex) out.push_back(*n.leaf_vertex);
    stack.insert(stack.end(), n.children.begin(), n.children.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t CodingTree::cut_between(const Graph& g, NodeId a, NodeId b) const {
  if (g.fingerprint() != fingerprint_) throw Error("coding tree: graph does not match the tree");
  auto inside_a = marker(a);
  auto inside_b = marker(b);
  if (inside_a.size() > inside_b.size()) std::swap(inside_a, inside_b);
  std::int64_t cut = 0;
  for (VertexId v : inside_a) {
    for (VertexId w : g.neighbors(v)) {
      if (std::binary_search(inside_b.begin(), inside_b.end(), w)) ++cut;
    }
  }
  return cut;
}

bool CodingTree::is_aligned() const {
  for (const TreeNode& n : nodes_) {
    if (!n.alive) continue;
    for (NodeId c : n.children) {
      if (n.height - nodes_[c].height != 1) return false;
    }
  }
  return true;
}

std::vector<std::vector<NodeId>> CodingTree::levels() const {
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(height()) + 1);
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].alive) out[static_cast<std::size_t>(nodes_[id].height)].push_back(id);
  }
  for (auto& level : out) {
    std::sort(level.begin(), level.end(), [&](NodeId a, NodeId b) {
      return nodes_[a].min_leaf != nodes_[b].min_leaf ? key_less(a, b) : a < b;
    });
  }
  return out;
}

NodeId CodingTree::new_node() {
  nodes_.emplace_back();
  ++live_count_;
  return static_cast<NodeId>(nodes_.size() - 1);
}

void CodingTree::replace_child(NodeId parent, NodeId old_child, NodeId new_child) {
  auto& kids = nodes_[parent].children;
  auto it = std::find(kids.begin(), kids.end(), old_child);
  *it = new_child;
}

NodeId CodingTree::merge(const Graph& g, NodeId a, NodeId b) {
  if (a == b) throw Error("merge: both arguments are node " + id_str(a));
  return merge(a, b, cut_between(g, a, b));
}

NodeId CodingTree::merge(NodeId a, NodeId b, std::int64_t cut) {
  if (a == b) throw Error("merge: both arguments are node " + id_str(a));
  for (NodeId id : {a, b}) {
    if (node(id).parent != root_) throw Error("merge: node " + id_str(id) + " is not a child of the root");
  }
  const TreeNode& na = nodes_[a];
  const TreeNode& nb = nodes_[b];
  if (cut < 0 || cut > na.out_degree || cut > nb.out_degree) {
    throw Error("merge: cut " + std::to_string(cut) + " is inconsistent with the out-degrees of " +
                id_str(a) + " and " + id_str(b));
  }
  TreeNode merged;
  merged.parent = root_;
  merged.children = key_less(a, b) ? std::vector<NodeId>{a, b} : std::vector<NodeId>{b, a};
  merged.height = std::max(na.height, nb.height) + 1;
  merged.volume = na.volume + nb.volume;
  merged.out_degree = na.out_degree + nb.out_degree - 2 * cut;
  merged.min_leaf = std::min(na.min_leaf, nb.min_leaf);
  merged.max_leaf = std::max(na.max_leaf, nb.max_leaf);
  const NodeId first = merged.children[0];
  const NodeId second = merged.children[1];

  const NodeId id = new_node();
  nodes_[id] = std::move(merged);
  nodes_[a].parent = id;
  nodes_[b].parent = id;

  // The merged node inherits the sort key of its first child, so it takes that
  // child's slot and the order of the remaining root children is unchanged.
  auto& kids = nodes_[root_].children;
  auto cmp = [&](NodeId x, NodeId y) { return key_less(x, y); };
  auto slot = std::lower_bound(kids.begin(), kids.end(), first, cmp);
  *slot = id;
  kids.erase(std::lower_bound(kids.begin(), kids.end(), second, cmp));
  nodes_[root_].height = std::max(nodes_[root_].height, nodes_[id].height + 1);
  return id;
}

void CodingTree::refresh_heights_from(NodeId id) {
  for (std::optional<NodeId> cur = id; cur; cur = nodes_[*cur].parent) {
    TreeNode& n = nodes_[*cur];
    int h = 0;
    for (NodeId c : n.children) h = std::max(h, nodes_[c].height + 1);
    if (h == n.height) break;
    n.height = h;
  }
}

void CodingTree::remove(NodeId id) {
  TreeNode& victim = mutable_node(id);
  if (!victim.parent) throw Error("delete: node " + id_str(id) + " is the root");
  if (victim.is_leaf()) throw Error("delete: node " + id_str(id) + " is a leaf");
  const NodeId parent = *victim.parent;
  std::vector<NodeId> orphans = std::move(victim.children);
  victim.children.clear();
  victim.parent.reset();
  victim.alive = false;
  --live_count_;

  auto& kids = nodes_[parent].children;
  kids.erase(std::find(kids.begin(), kids.end(), id));
  for (NodeId c : orphans) nodes_[c].parent = parent;
  std::vector<NodeId> merged;
  merged.reserve(kids.size() + orphans.size());
  std::merge(kids.begin(), kids.end(), orphans.begin(), orphans.end(), std::back_inserter(merged),
             [&](NodeId x, NodeId y) { return key_less(x, y); });
  kids = std::move(merged);
  refresh_heights_from(parent);
}

NodeId CodingTree::insert_above(NodeId id) {
  const NodeId parent = *nodes_[id].parent;
  const NodeId fresh = new_node();
  TreeNode& src = nodes_[id];
  TreeNode& n = nodes_[fresh];
  n.parent = parent;
  n.children = {id};
  n.height = src.height + 1;
  n.volume = src.volume;
  n.out_degree = src.out_degree;
  n.min_leaf = src.min_leaf;
  n.max_leaf = src.max_leaf;
  src.parent = fresh;
  replace_child(parent, id, fresh);
  return fresh;
}

NodeId CodingTree::shift(NodeId id) {
  const TreeNode& n = node(id);
  if (!n.parent) throw Error("shift: node " + id_str(id) + " is the root");
  const int gap = nodes_[*n.parent].height - n.height;
  if (gap <= 1) {
    throw Error("shift: parent of node " + id_str(id) + " is only " + std::to_string(gap) +
                " level(s) above it");
  }
  return insert_above(id);
}

void CodingTree::add_layer_below_root() {
  const std::vector<NodeId> kids = nodes_[root_].children;
  for (NodeId c : kids) insert_above(c);
  refresh_heights_from(root_);
}

CodingTree CodingTree::compacted() const {
  std::vector<NodeId> order = node_ids();
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const TreeNode& x = nodes_[a];
    const TreeNode& y = nodes_[b];
    if (x.height != y.height) return x.height < y.height;
    if (x.min_leaf != y.min_leaf) return x.min_leaf < y.min_leaf;
    return a < b;
  });
  std::vector<NodeId> renumber(nodes_.size(), 0);
  for (NodeId i = 0; i < order.size(); ++i) renumber[order[i]] = i;

  CodingTree out;
  out.fingerprint_ = fingerprint_;
  out.nodes_.reserve(order.size());
  for (NodeId old : order) {
    TreeNode n = nodes_[old];
    if (n.parent) n.parent = renumber[*n.parent];
    for (NodeId& c : n.children) c = renumber[c];
    out.nodes_.push_back(std::move(n));
  }
  out.leaf_of_.resize(leaf_of_.size());
  for (std::size_t v = 0; v < leaf_of_.size(); ++v) {
    if (leaf_of_[v]) out.leaf_of_[v] = renumber[*leaf_of_[v]];
  }
  out.root_ = renumber[root_];
  out.live_count_ = order.size();
  return out;
}

std::string to_string(TreeProperty p) {
  switch (p) {
    case TreeProperty::Structure: return "structure";
    case TreeProperty::NonEmptyMarker: return "property i (non-empty marker)";
    case TreeProperty::RootMarker: return "property ii (root marker is the vertex set)";
    case TreeProperty::Partition: return "property iii (children partition the parent)";
    case TreeProperty::SingletonLeaf: return "property iv (singleton leaves in bijection with vertices)";
    case TreeProperty::Caches: return "caches";
    case TreeProperty::GraphMismatch: return "graph mismatch";
  }
  return "unknown";
}

namespace {

ValidationReport fail(TreeProperty p, std::optional<NodeId> node, std::string message) {
  return ValidationReport{p, node, std::move(message)};
}

}  // namespace

ValidationReport validate_structure(const CodingTree& t, std::size_t vertex_count) {
  const auto ids = t.node_ids();
  std::size_t roots = 0;
  for (NodeId id : ids) {
    const TreeNode& n = t.node(id);
    if (!n.parent) {
      ++roots;
      if (id != t.root()) return fail(TreeProperty::Structure, id, "parentless node is not the root");
    } else {
      if (!t.contains(*n.parent)) return fail(TreeProperty::Structure, id, "parent is not a live node");
      const auto& siblings = t.node(*n.parent).children;
      if (std::count(siblings.begin(), siblings.end(), id) != 1) {
        return fail(TreeProperty::Structure, id, "parent does not list this node exactly once");
      }
    }
    for (NodeId c : n.children) {
      if (!t.contains(c) || t.node(c).parent != id) {
        return fail(TreeProperty::Structure, id, "child " + std::to_string(c) + " does not point back");
      }
    }
  }
  if (roots != 1) return fail(TreeProperty::Structure, std::nullopt, "expected exactly one root");

  // Reachability from the root doubles as the acyclicity check.
  std::vector<NodeId> order{t.root()};
  for (std::size_t i = 0; i < order.size() && order.size() <= ids.size(); ++i) {
    for (NodeId c : t.node(order[i]).children) order.push_back(c);
  }
  if (order.size() != ids.size()) return fail(TreeProperty::Structure, std::nullopt, "nodes unreachable from the root");

  std::vector<VertexId> true_min(t.capacity(), kNoLeaf);
  std::vector<std::size_t> leaves_below(t.capacity(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId id = *it;
    const TreeNode& n = t.node(id);
    int h = 0;
    for (NodeId c : n.children) {
      h = std::max(h, t.node(c).height + 1);
      true_min[id] = std::min(true_min[id], true_min[c]);
      leaves_below[id] += leaves_below[c];
    }
    if (n.leaf_vertex) {
      true_min[id] = std::min(true_min[id], *n.leaf_vertex);
      leaves_below[id] += 1;
    }
    if (h != n.height) {
      return fail(TreeProperty::Structure, id,
                  "height " + std::to_string(n.height) + " should be " + std::to_string(h));
    }
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      if (true_min[n.children[i - 1]] > true_min[n.children[i]]) {
        return fail(TreeProperty::Structure, id, "children are not ordered by smallest leaf");
      }
    }
  }

  for (NodeId id : order) {
    const TreeNode& n = t.node(id);
    if (n.is_leaf() && !n.leaf_vertex) {
      return fail(TreeProperty::NonEmptyMarker, id, "leaf node carries no vertex");
    }
    if (!n.is_leaf() && n.leaf_vertex) {
      return fail(TreeProperty::SingletonLeaf, id, "internal node carries vertex " + std::to_string(*n.leaf_vertex));
    }
  }

  std::vector<std::optional<NodeId>> holder(vertex_count);
  for (NodeId id : order) {
    const TreeNode& n = t.node(id);
    if (!n.leaf_vertex) continue;
    const VertexId v = *n.leaf_vertex;
    if (v >= vertex_count) {
      return fail(TreeProperty::SingletonLeaf, id, "vertex " + std::to_string(v) + " is outside the graph");
    }
    if (holder[v]) {
      // The two leaves' lowest common ancestor has overlapping children.
      std::vector<NodeId> path;
      for (std::optional<NodeId> p = *holder[v]; p; p = t.node(*p).parent) path.push_back(*p);
      std::optional<NodeId> meet = id;
      while (meet && std::find(path.begin(), path.end(), *meet) == path.end()) meet = t.node(*meet).parent;
      return fail(TreeProperty::Partition, meet,
                  "vertex " + std::to_string(v) + " appears under two children of this node");
    }
    holder[v] = id;
  }
  for (VertexId v = 0; v < vertex_count; ++v) {
    if (!holder[v]) {
      return fail(TreeProperty::SingletonLeaf, std::nullopt, "vertex " + std::to_string(v) + " has no leaf");
    }
    if (t.leaf_of(v) != holder[v]) {
      return fail(TreeProperty::SingletonLeaf, holder[v], "leaf map is stale for vertex " + std::to_string(v));
    }
  }
  if (t.vertex_count() != vertex_count) {
    return fail(TreeProperty::SingletonLeaf, std::nullopt, "leaf map covers " +
                std::to_string(t.vertex_count()) + " vertices, expected " + std::to_string(vertex_count));
  }
  if (leaves_below[t.root()] != vertex_count) {
    return fail(TreeProperty::RootMarker, t.root(), "root marker is not the full vertex set");
  }

  for (NodeId id : order) {
    const TreeNode& n = t.node(id);
    if (n.min_leaf != true_min[id]) return fail(TreeProperty::Caches, id, "stale min_leaf");
  }
  return {};
}

ValidationReport validate(const CodingTree& t, const Graph& g) {
  if (t.graph_fingerprint() != g.fingerprint()) {
    return fail(TreeProperty::GraphMismatch, std::nullopt, "tree fingerprint differs from the graph's");
  }
  auto report = validate_structure(t, g.vertex_count());
  if (!report) return report;
  for (NodeId id : t.node_ids()) {
    const TreeNode& n = t.node(id);
    const auto members = t.marker(id);
    const auto stats = subset_stats(g, members);
    if (stats.volume != n.volume) {
      return fail(TreeProperty::Caches, id, "volume " + std::to_string(n.volume) + " should be " +
                  std::to_string(stats.volume));
    }
    if (stats.cut != n.out_degree) {
      return fail(TreeProperty::Caches, id, "out-degree " + std::to_string(n.out_degree) + " should be " +
                  std::to_string(stats.cut));
    }
    if (n.max_leaf != members.back()) return fail(TreeProperty::Caches, id, "stale max_leaf");
  }
  return {};
}

}  // namespace sectree
