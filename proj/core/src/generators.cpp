#include "sectree/generators.hpp"

#include <random>
#include <unordered_set>
#include <vector>

#include "sectree/error.hpp"

namespace sectree {

namespace {

using Edges = std::vector<std::pair<VertexId, VertexId>>;

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Graph complete_graph(std::size_t n) {
  Edges edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw Error("cycle graph needs at least 3 vertices");
  Edges edges;
  for (VertexId u = 0; u < n; ++u) edges.emplace_back(u, static_cast<VertexId>((u + 1) % n));
  return Graph::from_edges(n, edges);
}

Graph path_graph(std::size_t n) {
  Edges edges;
  for (VertexId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return Graph::from_edges(n, edges);
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Edges edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (unit_draw(rng) < p) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

Graph random_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 2 ? m > 0 : m > n * (n - 1) / 2) {
    throw Error("random graph: " + std::to_string(m) + " edges do not fit on " + std::to_string(n) + " vertices");
  }
  std::mt19937_64 rng(seed);
  std::unordered_set<std::uint64_t> seen;
  Edges edges;
  edges.reserve(m);
  while (edges.size() < m) {
    auto u = static_cast<VertexId>(rng() % n);
    auto v = static_cast<VertexId>(rng() % n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

}  // namespace sectree
