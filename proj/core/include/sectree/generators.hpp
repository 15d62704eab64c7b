#pragma once

#include <cstdint>

#include "sectree/graph.hpp"

namespace sectree {

Graph complete_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);

/// G(n, p): each pair joined independently with probability p. Seeded
/// mt19937_64, so a seed gives the same graph on every platform.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// G(n, m): `m` distinct edges drawn uniformly. Throws `Error` if m exceeds
/// n(n-1)/2.
Graph random_graph(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace sectree
