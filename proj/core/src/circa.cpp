#include "sectree/circa.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <unordered_map>

#include "sectree/entropy.hpp"
#include "sectree/error.hpp"

namespace sectree {

namespace {

void check_inputs(const Graph& g, int k) {
  if (g.vertex_count() == 0) throw Error("circa: graph has no vertices");
  if (g.volume() == 0) throw Error("circa: graph has no edges");
  if (k < 1) throw Error("circa: height k must be at least 1, got " + std::to_string(k));
}

struct MergeCandidate {
  double delta;
  VertexId key_lo;
  VertexId key_hi;
  NodeId a;
  NodeId b;
};

// Max-heap order inverted: smallest delta, then smallest key, on top.
struct MergeAfter {
  bool operator()(const MergeCandidate& x, const MergeCandidate& y) const {
    if (x.delta != y.delta) return x.delta > y.delta;
    if (x.key_lo != y.key_lo) return x.key_lo > y.key_lo;
    return x.key_hi > y.key_hi;
  }
};

struct DeleteCandidate {
  double delta;
  VertexId min_leaf;
  VertexId max_leaf;
  NodeId node;
  std::uint32_t version;
};

struct DeleteAfter {
  bool operator()(const DeleteCandidate& x, const DeleteCandidate& y) const {
    if (x.delta != y.delta) return x.delta > y.delta;
    if (x.min_leaf != y.min_leaf) return x.min_leaf > y.min_leaf;
    if (x.max_leaf != y.max_leaf) return x.max_leaf > y.max_leaf;
    return x.node > y.node;
  }
};

// Uniform draw in [0, bound) that does not depend on the standard library's
// distribution implementation.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

void merge_to_binary(const Graph& g, CodingTree& t, CircaTrace& trace) {
  const std::int64_t vol = g.volume();
  const NodeId root = t.root();
  auto is_root_child = [&](NodeId id) { return t.contains(id) && t.node(id).parent == root; };
  auto candidate = [&](NodeId a, NodeId b, std::int64_t cut) {
    VertexId ka = t.node(a).min_leaf;
    VertexId kb = t.node(b).min_leaf;
    return MergeCandidate{merge_delta(vol, t.node(a).volume + t.node(b).volume, cut),
                          std::min(ka, kb), std::max(ka, kb), a, b};
  };

  // Edge counts between root children, keyed by node id.
  std::vector<std::unordered_map<NodeId, std::int64_t>> links(t.capacity());
  std::priority_queue<MergeCandidate, std::vector<MergeCandidate>, MergeAfter> heap;
  for (auto [u, v] : g.edges()) {
    const NodeId a = *t.leaf_of(u);
    const NodeId b = *t.leaf_of(v);
    links[a][b] = 1;
    links[b][a] = 1;
    heap.push(candidate(a, b, 1));
  }

  while (t.node(root).children.size() > 2) {
    std::optional<MergeCandidate> pick;
    while (!heap.empty()) {
      MergeCandidate top = heap.top();
      heap.pop();
      if (is_root_child(top.a) && is_root_child(top.b)) {
        pick = top;
        break;
      }
    }
    NodeId a;
    NodeId b;
    std::int64_t cut = 0;
    double delta = 0.0;
    if (pick) {
      a = pick->a;
      b = pick->b;
      cut = links[a].at(b);
      delta = pick->delta;
    } else {
      // No root children share an edge: join the two with the smallest leaves.
      a = t.node(root).children[0];
      b = t.node(root).children[1];
    }
    const NodeId merged = t.merge(a, b, cut);
    trace.stage1_deltas.push_back(delta);
    if (links.size() <= merged) links.resize(merged + 1);

    // Small-to-large union of the two neighbour maps.
    if (links[a].size() < links[b].size()) std::swap(a, b);
    auto joined = std::move(links[a]);
    joined.erase(b);
    for (auto [w, c] : links[b]) {
      if (w != a) joined[w] += c;
    }
    links[a].clear();
    links[b].clear();
    for (auto [w, c] : joined) {
      auto& back = links[w];
      back.erase(a);
      back.erase(b);
      back[merged] = c;
      heap.push(candidate(merged, w, c));
    }
    links[merged] = std::move(joined);
  }
  trace.h_max = t.height();
}

void squeeze_to_height(const Graph& g, CodingTree& t, int k, CircaTrace& trace) {
  std::vector<std::uint32_t> version(t.capacity(), 0);
  std::priority_queue<DeleteCandidate, std::vector<DeleteCandidate>, DeleteAfter> heap;
  auto push = [&](NodeId id) {
    const TreeNode& n = t.node(id);
    if (!n.parent || n.is_leaf()) return;
    heap.push({delete_delta(g, t, id), n.min_leaf, n.max_leaf, id, ++version[id]});
  };
  if (t.height() > k) {
    for (NodeId id : t.node_ids()) push(id);
  }
  while (t.height() > k) {
    if (heap.empty()) throw Error("circa: no internal node left to delete");
    DeleteCandidate top = heap.top();
    heap.pop();
    if (!t.contains(top.node) || top.version != version[top.node]) continue;
    const NodeId parent = *t.node(top.node).parent;
    const std::vector<NodeId> orphans = t.node(top.node).children;
    t.remove(top.node);
    trace.stage2_deltas.push_back(top.delta);
    push(parent);
    for (NodeId c : orphans) push(c);
  }
}

void align_layers(CodingTree& t, int k, CircaTrace& trace) {
  std::vector<NodeId> stack{t.root()};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    const std::vector<NodeId> kids = t.node(v).children;
    for (NodeId c : kids) {
      NodeId top = c;
      while (t.node(v).height - t.node(top).height > 1) {
        top = t.shift(top);
        ++trace.shifts;
      }
      stack.push_back(c);
    }
  }
  while (t.height() < k) {
    t.add_layer_below_root();
    ++trace.padded_layers;
  }
}

CircaResult circa(const Graph& g, int k) {
  check_inputs(g, k);
  CircaResult result{CodingTree::star(g), {}};
  merge_to_binary(g, result.tree, result.trace);
  squeeze_to_height(g, result.tree, k, result.trace);
  align_layers(result.tree, k, result.trace);
  result.tree = result.tree.compacted();
  result.trace.final_entropy = structural_entropy(g, result.tree).total;
  return result;
}

CodingTree random_tree(const Graph& g, int k, std::uint64_t seed) {
  check_inputs(g, k);
  CodingTree t = CodingTree::star(g);
  std::mt19937_64 rng(seed);
  std::vector<NodeId> current = t.node(t.root()).children;
  for (int round = 1; round < k; ++round) {
    for (std::size_t i = current.size(); i > 1; --i) {
      std::swap(current[i - 1], current[draw_below(rng, i)]);
    }
    std::vector<NodeId> next;
    next.reserve(current.size() / 2 + 1);
    for (std::size_t i = 0; i < current.size(); i += 2) {
      next.push_back(i + 1 < current.size() ? t.merge(g, current[i], current[i + 1]) : current[i]);
    }
    current = std::move(next);
  }
  CircaTrace unused;
  align_layers(t, k, unused);
  return t.compacted();
}

}  // namespace sectree
