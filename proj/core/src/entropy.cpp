#include "sectree/entropy.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "sectree/error.hpp"

namespace sectree {

namespace {

void require_volume(const Graph& g) {
  if (g.volume() == 0) throw Error("entropy: graph has no edges, structural entropy is undefined");
}

void require_same_graph(const Graph& g, const CodingTree& t) {
  if (t.graph_fingerprint() != g.fingerprint()) throw Error("entropy: tree was built for a different graph");
}

}  // namespace

double entropy_term(std::int64_t graph_volume, std::int64_t volume, std::int64_t parent_volume,
                    std::int64_t out_degree) {
  if (out_degree == 0 || volume == 0) return 0.0;
  return -(static_cast<double>(out_degree) / static_cast<double>(graph_volume)) *
         std::log2(static_cast<double>(volume) / static_cast<double>(parent_volume));
}

EntropyReport structural_entropy(const Graph& g, const CodingTree& t) {
  require_volume(g);
  require_same_graph(g, t);
  const std::size_t cap = t.capacity();
  std::vector<int> depth(cap, 0);
  std::vector<NodeId> order{t.root()};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (NodeId c : t.node(order[i]).children) {
      depth[c] = depth[order[i]] + 1;
      order.push_back(c);
    }
  }

  std::vector<std::int64_t> volume(cap, 0);
  std::vector<std::int64_t> out_degree(cap, 0);
  std::vector<NodeId> leaf(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto l = t.leaf_of(v);
    if (!l) throw Error("entropy: vertex " + std::to_string(v) + " has no leaf in the tree");
    leaf[v] = *l;
    volume[*l] += g.degree(v);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (auto p = t.node(*it).parent) volume[*p] += volume[*it];
  }
  // An edge leaves every marker on the two leaf-to-LCA paths, LCA excluded.
  for (auto [u, v] : g.edges()) {
    NodeId a = leaf[u];
    NodeId b = leaf[v];
    while (a != b) {
      const bool step_a = depth[a] >= depth[b];
      const bool step_b = depth[b] >= depth[a];
      if (step_a) {
        ++out_degree[a];
        a = *t.node(a).parent;
      }
      if (step_b) {
        ++out_degree[b];
        b = *t.node(b).parent;
      }
    }
  }

  EntropyReport report;
  for (NodeId id : t.node_ids()) {
    const auto& n = t.node(id);
    if (!n.parent) continue;
    const double term = entropy_term(g.volume(), volume[id], volume[*n.parent], out_degree[id]);
    report.terms.push_back({id, term});
    report.total += term;
  }
  return report;
}

double one_dim_entropy(const Graph& g) {
  require_volume(g);
  double total = 0.0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    total += entropy_term(g.volume(), g.degree(v), g.volume(), g.degree(v));
  }
  return total;
}

double merge_delta(std::int64_t graph_volume, std::int64_t merged_volume, std::int64_t cut) {
  if (cut == 0 || merged_volume == 0) return 0.0;
  return (2.0 * static_cast<double>(cut) / static_cast<double>(graph_volume)) *
         std::log2(static_cast<double>(merged_volume) / static_cast<double>(graph_volume));
}

double merge_delta(const Graph& g, const CodingTree& t, NodeId a, NodeId b) {
  require_volume(g);
  if (a == b) throw Error("merge: both arguments are node " + std::to_string(a));
  for (NodeId id : {a, b}) {
    if (t.node(id).parent != t.root()) {
      throw Error("merge: node " + std::to_string(id) + " is not a child of the root");
    }
  }
  return merge_delta(g.volume(), t.node(a).volume + t.node(b).volume, t.cut_between(g, a, b));
}

double delete_delta(const Graph& g, const CodingTree& t, NodeId v) {
  require_volume(g);
  const TreeNode& n = t.node(v);
  if (!n.parent) throw Error("delete: node " + std::to_string(v) + " is the root");
  if (n.is_leaf()) throw Error("delete: node " + std::to_string(v) + " is a leaf");
  if (n.volume == 0) return 0.0;
  std::int64_t children_out = 0;
  for (NodeId c : n.children) children_out += t.node(c).out_degree;
  const double parent_volume = static_cast<double>(t.node(*n.parent).volume);
  return (static_cast<double>(children_out - n.out_degree) / static_cast<double>(g.volume())) *
         std::log2(parent_volume / static_cast<double>(n.volume));
}

namespace {

std::size_t oracle_vertex_limit(int k) {
  if (k == 2) return 8;
  if (k == 3) return 6;
  if (k == 4) return 5;
  return 4;
}

class PartitionSearch {
 public:
  PartitionSearch(const Graph& g) : n_(g.vertex_count()), graph_volume_(g.volume()) {
    const std::size_t masks = std::size_t{1} << n_;
    volume_.assign(masks, 0);
    cut_.assign(masks, 0);
    for (std::size_t m = 1; m < masks; ++m) {
      for (VertexId v = 0; v < n_; ++v) {
        if (!(m >> v & 1u)) continue;
        volume_[m] += g.degree(v);
        for (VertexId w : g.neighbors(v)) {
          if (!(m >> w & 1u)) ++cut_[m];
        }
      }
    }
  }

  void run(int k) {
    std::vector<std::uint32_t> singletons;
    for (VertexId v = 0; v < n_; ++v) singletons.push_back(1u << v);
    std::vector<std::vector<std::uint32_t>> chain;
    descend(singletons, k - 1, 0.0, chain);
  }

  double best() const { return best_; }
  const std::vector<std::vector<std::uint32_t>>& best_chain() const { return best_chain_; }

 private:
  double term(std::uint32_t child, std::uint32_t parent) const {
    return entropy_term(graph_volume_, volume_[child], volume_[parent], cut_[child]);
  }

  void descend(const std::vector<std::uint32_t>& items, int levels_left, double acc,
               std::vector<std::vector<std::uint32_t>>& chain) {
    if (levels_left == 0) {
      const std::uint32_t all = static_cast<std::uint32_t>((std::size_t{1} << n_) - 1);
      for (std::uint32_t item : items) acc += term(item, all);
      if (acc < best_) {
        best_ = acc;
        best_chain_ = chain;
      }
      return;
    }
    std::vector<std::uint32_t> groups;
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
      if (i == items.size()) {
        double sum = acc;
        for (std::uint32_t item : items) {
          for (std::uint32_t grp : groups) {
            if (item & grp) {
              sum += term(item, grp);
              break;
            }
          }
        }
        chain.push_back(groups);
        descend(groups, levels_left - 1, sum, chain);
        chain.pop_back();
        return;
      }
      for (std::size_t j = 0; j < groups.size(); ++j) {
        groups[j] |= items[i];
        assign(i + 1);
        groups[j] ^= items[i];
      }
      groups.push_back(items[i]);
      assign(i + 1);
      groups.pop_back();
    };
    assign(0);
  }

  std::size_t n_;
  std::int64_t graph_volume_;
  std::vector<std::int64_t> volume_;
  std::vector<std::int64_t> cut_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::uint32_t>> best_chain_;
};

}  // namespace

OptimalTree brute_force_k_entropy(const Graph& g, int k) {
  require_volume(g);
  if (k < 1) throw Error("oracle: height must be at least 1");
  const std::size_t n = g.vertex_count();
  if (k == 1) return {one_dim_entropy(g), CodingTree::star(g)};
  if (n > oracle_vertex_limit(k)) {
    throw Error("oracle: " + std::to_string(n) + " vertices is too large for exhaustive search at height " +
                std::to_string(k) + " (limit " + std::to_string(oracle_vertex_limit(k)) + ")");
  }
  PartitionSearch search(g);
  search.run(k);

  // Witness: leaves, then one node per block of each layer, then the root.
  const auto& chain = search.best_chain();
  std::vector<NodeLink> links(n);
  for (VertexId v = 0; v < n; ++v) links[v].leaf_vertex = v;
  std::vector<std::uint32_t> below(n);
  std::vector<NodeId> below_ids(n);
  for (VertexId v = 0; v < n; ++v) {
    below[v] = 1u << v;
    below_ids[v] = v;
  }
  for (const auto& layer : chain) {
    std::vector<NodeId> ids;
    for (std::uint32_t block : layer) {
      const NodeId id = static_cast<NodeId>(links.size());
      links.emplace_back();
      ids.push_back(id);
      for (std::size_t i = 0; i < below.size(); ++i) {
        if (below[i] & block) links[below_ids[i]].parent = id;
      }
    }
    below = layer;
    below_ids = std::move(ids);
  }
  const NodeId root = static_cast<NodeId>(links.size());
  links.emplace_back();
  for (NodeId id : below_ids) links[id].parent = root;
  return {search.best(), CodingTree::from_links(g, links).compacted()};
}

}  // namespace sectree
