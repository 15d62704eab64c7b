#include "sectree/graph.hpp"

#include <algorithm>
#include <functional>

#include "sectree/error.hpp"
#include "text_util.hpp"

namespace sectree {

namespace {

class TokenTable {
 public:
  VertexId intern(std::string_view token) {
    auto [it, inserted] = index_.try_emplace(std::string(token), static_cast<VertexId>(names_.size()));
    if (inserted) names_.emplace_back(token);
    return it->second;
  }
  std::size_t size() const { return names_.size(); }
  std::vector<std::string> take_names() { return std::move(names_); }

 private:
  std::unordered_map<std::string, VertexId> index_;
  std::vector<std::string> names_;
};

std::uint64_t compute_fingerprint(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& edges) {
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xffu;
      h *= kPrime;
    }
  };
  mix(n);
  for (auto [u, v] : edges) {
    mix(u);
    mix(v);
  }
  return h;
}

}  // namespace

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges,
                        std::vector<std::string> names) {
  if (!names.empty() && names.size() != n) {
    throw Error("graph: " + std::to_string(names.size()) + " names given for " +
                std::to_string(n) + " vertices");
  }
  Graph g;
  g.adjacency_.resize(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw Error("graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                  ") references a vertex outside 0.." + std::to_string(n == 0 ? 0 : n - 1));
    }
    if (u == v) throw Error("graph: self-loop on vertex " + std::to_string(u));
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  std::size_t endpoints = 0;
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    endpoints += adj.size();
  }
  g.edge_count_ = endpoints / 2;
  g.names_ = std::move(names);
  for (VertexId v = 0; v < g.names_.size(); ++v) {
    if (!g.index_.emplace(g.names_[v], v).second) {
      throw Error("graph: duplicate vertex name '" + g.names_[v] + "'");
    }
  }
  g.fingerprint_ = compute_fingerprint(n, g.edges());
  return g;
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  auto adj = neighbors(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<std::pair<VertexId, VertexId>> Graph::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(edge_count_);
  for (VertexId u = 0; u < adjacency_.size(); ++u) {
    for (VertexId v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::string Graph::name(VertexId v) const {
  if (v >= vertex_count()) throw Error("graph: vertex " + std::to_string(v) + " out of range");
  return names_.empty() ? std::to_string(v) : names_[v];
}

std::optional<VertexId> Graph::find(std::string_view name) const {
  if (names_.empty()) return std::nullopt;
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Graph::Graph() : fingerprint_(compute_fingerprint(0, {})) {}

Graph from_edge_list(std::string_view text) {
  TokenTable tokens;
  std::vector<std::pair<VertexId, VertexId>> edges;
  detail::for_each_line(text, [&](std::string_view line, std::size_t number) {
    auto fields = detail::split_tokens(line);
    if (fields.empty() || fields.front().front() == '#') return;
    if (fields.size() != 2) {
      throw ParseError("expected two vertex tokens, found " + std::to_string(fields.size()),
                       number);
    }
    if (fields[0] == fields[1]) {
      throw ParseError("self-loop on '" + std::string(fields[0]) + "'", number);
    }
    VertexId u = tokens.intern(fields[0]);
    VertexId v = tokens.intern(fields[1]);
    edges.emplace_back(u, v);
  });
  std::size_t n = tokens.size();
  return Graph::from_edges(n, edges, tokens.take_names());
}

std::size_t Taxonomy::depth() const {
  const std::size_t n = graph.vertex_count();
  if (n == 0) return 0;
  std::vector<std::vector<VertexId>> children(n);
  for (VertexId v = 0; v < n; ++v) {
    for (VertexId p : parents[v]) children[p].push_back(v);
  }
  // Parents precede children in a reverse DFS postorder; the hierarchy is acyclic.
  std::vector<std::size_t> longest(n, 0);
  std::vector<char> done(n, 0);
  std::function<std::size_t(VertexId)> visit = [&](VertexId v) -> std::size_t {
    if (done[v]) return longest[v];
    std::size_t best = 0;
    for (VertexId c : children[v]) best = std::max(best, 1 + visit(c));
    done[v] = 1;
    return longest[v] = best;
  };
  return visit(root);
}

Taxonomy from_taxonomy(std::string_view text) {
  TokenTable tokens;
  std::vector<std::pair<VertexId, VertexId>> links;  // (parent, child)
  std::vector<std::size_t> link_lines;
  detail::for_each_line(text, [&](std::string_view line, std::size_t number) {
    auto fields = detail::split_tokens(line);
    if (fields.empty()) return;
    if (fields.size() < 2) {
      throw ParseError("label '" + std::string(fields[0]) + "' is listed without children", number);
    }
    VertexId parent = tokens.intern(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      VertexId child = tokens.intern(fields[i]);
      if (child == parent) {
        throw ParseError("cycle: label '" + std::string(fields[i]) + "' is its own child", number);
      }
      links.emplace_back(parent, child);
      link_lines.push_back(number);
    }
  });

  Taxonomy tax;
  const std::size_t n = tokens.size();
  auto names = tokens.take_names();
  tax.parents.assign(n, {});
  std::vector<std::vector<VertexId>> children(n);
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto [p, c] = links[i];
    auto& ps = tax.parents[c];
    if (std::find(ps.begin(), ps.end(), p) != ps.end()) continue;
    ps.push_back(p);
    children[p].push_back(c);
  }

  // Directed cycle check: iterative three-colour DFS.
  std::vector<char> colour(n, 0);
  for (VertexId start = 0; start < n; ++start) {
    if (colour[start]) continue;
    std::vector<std::pair<VertexId, std::size_t>> stack{{start, 0}};
    colour[start] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < children[v].size()) {
        VertexId c = children[v][next++];
        if (colour[c] == 1) {
          throw ParseError("cycle through labels '" + names[v] + "' and '" + names[c] + "'", 0);
        }
        if (colour[c] == 0) {
          colour[c] = 1;
          stack.emplace_back(c, 0);
        }
      } else {
        colour[v] = 2;
        stack.pop_back();
      }
    }
  }

  for (VertexId v = 0; v < n; ++v) {
    if (tax.parents[v].size() > 1) {
      std::string msg = "label '" + names[v] + "' has " + std::to_string(tax.parents[v].size()) +
                        " parents:";
      for (VertexId p : tax.parents[v]) msg += " '" + names[p] + "'";
      tax.warnings.push_back(std::move(msg));
    }
  }

  tax.root = 0;
  if (n > 0) {
    if (!tax.parents[0].empty()) {
      tax.warnings.push_back("root label '" + names[0] + "' has a parent");
    }
    std::vector<char> reached(n, 0);
    std::vector<VertexId> frontier{0};
    reached[0] = 1;
    while (!frontier.empty()) {
      VertexId v = frontier.back();
      frontier.pop_back();
      for (VertexId c : children[v]) {
        if (!reached[c]) {
          reached[c] = 1;
          frontier.push_back(c);
        }
      }
    }
    for (VertexId v = 0; v < n; ++v) {
      if (!reached[v]) tax.warnings.push_back("label '" + names[v] + "' is unreachable from the root");
    }
  }

  std::vector<std::pair<VertexId, VertexId>> edges;
  for (VertexId c = 0; c < n; ++c) {
    for (VertexId p : tax.parents[c]) edges.emplace_back(p, c);
  }
  tax.graph = Graph::from_edges(n, edges, std::move(names));
  return tax;
}

VertexSubset subset_stats(const Graph& g, std::span<const VertexId> members) {
  VertexSubset s;
  s.members.assign(members.begin(), members.end());
  std::sort(s.members.begin(), s.members.end());
  s.members.erase(std::unique(s.members.begin(), s.members.end()), s.members.end());
  if (!s.members.empty() && s.members.back() >= g.vertex_count()) {
    throw Error("subset: vertex " + std::to_string(s.members.back()) + " out of range");
  }
  std::vector<char> inside(g.vertex_count(), 0);
  for (VertexId v : s.members) inside[v] = 1;
  for (VertexId v : s.members) {
    s.volume += g.degree(v);
    for (VertexId w : g.neighbors(v)) {
      if (!inside[w]) ++s.cut;
    }
  }
  return s;
}

}  // namespace sectree
