#pragma once

#include "rainbow/graph.hpp"

#include <cstdint>

namespace rainbow {

/// Q_k on vertices 0..2^k-1; the edge {v, v | 1<<i} (bit i clear in v) has
/// colour i.  Edge ids run over v ascending, then i ascending.
ColouredGraph hypercube_coloured(int k);

/// G(n, p): pairs (u, v), u < v, visited in lexicographic order.
Graph random_graph(int n, double p, std::uint64_t seed);

/// Random bipartite graph: sides 0..a-1 and a..a+b-1, each cross pair kept
/// with probability p.
Graph random_bipartite_graph(int a, int b, double p, std::uint64_t seed);

/// Greedy over a seeded shuffle of the edges; each edge takes the smallest
/// colour free at both endpoints, so at most 2*Delta - 1 colours appear and
/// the palette is 0..C-1 without gaps.
ColouredGraph greedy_proper_colouring(const Graph& g, std::uint64_t seed);

/// C_k[r]: vertex i*r + a is copy a of cycle vertex i; consecutive groups
/// (cyclically) are joined completely.
Graph blowup_cycle(int k, int r);

/// A copy of C_j[r] as its j groups, in cyclic order.
using BlowupCycleCopy = std::vector<std::vector<Vertex>>;

struct CrFreeResult {
  Graph graph;
  int r = 1;
  int kmax = 3;
  double p = 0.0;
  int initial_edges = 0;
  int removed_edges = 0;
  double c = 0.2;
  double edge_bound = 0.0;  // c * n^{2 - 1/r}
  bool meets_bound = false;
  std::int64_t search_nodes = 0;
};

/// First copy of C_j[r] in g in search order, if any.  The search fixes the
/// group holding the smallest vertex of the copy first, so each copy is
/// found from one anchor only.  `nodes` accumulates visited search states;
/// exceeding `budget` throws BudgetExceeded.
std::optional<BlowupCycleCopy> find_blowup_cycle(const Graph& g, int j, int r,
                                                 std::int64_t& nodes, std::int64_t budget);

/// Samples G(n, n^{-1/r}) and removes the lowest-index edge of a copy of
/// C_j[r] (3 <= j <= kmax) until none is left.
CrFreeResult crfree_construction(int n, int r, int kmax, std::uint64_t seed, double c = 0.2,
                                 std::int64_t budget = 400'000'000);

}  // namespace rainbow
