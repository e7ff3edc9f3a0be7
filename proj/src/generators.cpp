#include "rainbow/generators.hpp"

#include "rainbow/error.hpp"
#include "rainbow/seed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace rainbow {

ColouredGraph hypercube_coloured(int k) {
  if (k < 1 || k > 16)
    throw Error(ErrorKind::DimensionTooLarge, "hypercube dimension must lie in [1, 16], got " + std::to_string(k));
  const int n = 1 << k;
  std::vector<Edge> edges;
  std::vector<Colour> colours;
  edges.reserve(static_cast<std::size_t>(k) << (k - 1));
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < k; ++i)
      if (!((v >> i) & 1)) {
        edges.push_back({v, v | (1 << i)});
        colours.push_back(i);
      }
  return ColouredGraph(Graph(n, std::move(edges)), std::move(colours));
}

Graph random_graph(int n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::PreconditionViolated, "edge probability must lie in [0, 1]");
  if (n < 0) throw Error(ErrorKind::PreconditionViolated, "vertex count must be non-negative");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (unit(rng) < p) edges.push_back({u, v});
  return Graph(n, std::move(edges));
}

Graph random_bipartite_graph(int a, int b, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorKind::PreconditionViolated, "edge probability must lie in [0, 1]");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (int u = 0; u < a; ++u)
    for (int v = 0; v < b; ++v)
      if (unit(rng) < p) edges.push_back({u, a + v});
  return Graph(a + b, std::move(edges));
}

ColouredGraph greedy_proper_colouring(const Graph& g, std::uint64_t seed) {
  std::vector<EdgeId> order(static_cast<std::size_t>(g.num_edges()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[uniform_below(rng, i)]);

  std::vector<Colour> colour(order.size(), -1);
  std::vector<std::vector<char>> seen(static_cast<std::size_t>(g.num_vertices()));
  for (EdgeId e : order) {
    const Edge& ed = g.edge(e);
    auto& a = seen[static_cast<std::size_t>(ed.u)];
    auto& b = seen[static_cast<std::size_t>(ed.v)];
    Colour c = 0;
    while ((c < static_cast<Colour>(a.size()) && a[static_cast<std::size_t>(c)]) ||
           (c < static_cast<Colour>(b.size()) && b[static_cast<std::size_t>(c)]))
      ++c;
    for (auto* s : {&a, &b}) {
      if (s->size() <= static_cast<std::size_t>(c)) s->resize(static_cast<std::size_t>(c) + 1, 0);
      (*s)[static_cast<std::size_t>(c)] = 1;
    }
    colour[static_cast<std::size_t>(e)] = c;
  }
  return ColouredGraph(g, std::move(colour));
}

Graph blowup_cycle(int k, int r) {
  if (k < 3 || r < 1) throw Error(ErrorKind::PreconditionViolated, "blow-up cycle needs k >= 3 and r >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i < k; ++i) {
    const int j = (i + 1) % k;
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) edges.push_back({i * r + a, j * r + b});
  }
  return Graph(k * r, std::move(edges));
}

namespace {

std::vector<Vertex> intersect_sorted(std::span<const Vertex> a, std::span<const Vertex> b) {
  std::vector<Vertex> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Common neighbourhood of a group, restricted to vertices above `floor`
// that are not yet used.
std::vector<Vertex> common_candidates(const Graph& g, const std::vector<Vertex>& group, Vertex floor,
                                      const std::vector<char>& used) {
  std::vector<Vertex> cand(g.neighbours(group[0]).begin(), g.neighbours(group[0]).end());
  for (std::size_t i = 1; i < group.size() && !cand.empty(); ++i) cand = intersect_sorted(cand, g.neighbours(group[i]));
  std::erase_if(cand, [&](Vertex v) { return v <= floor || used[static_cast<std::size_t>(v)]; });
  return cand;
}

struct CycleSearch {
  const Graph& g;
  int j;
  int r;
  std::int64_t& nodes;
  std::int64_t budget;
  std::vector<char> used;
  BlowupCycleCopy groups;
  Vertex anchor = 0;

  void tick() {
    if (++nodes > budget)
      throw Error(ErrorKind::BudgetExceeded, "blow-up cycle enumeration exceeded " + std::to_string(budget) + " states");
  }

  // Choose r vertices out of `cand` (from position `from`) into `pick`, then continue.
  bool choose(const std::vector<Vertex>& cand, std::size_t from, std::vector<Vertex>& pick) {
    if (static_cast<int>(pick.size()) == r) return extend(pick);
    for (std::size_t i = from; i + (static_cast<std::size_t>(r) - pick.size()) <= cand.size(); ++i) {
      tick();
      pick.push_back(cand[i]);
      if (choose(cand, i + 1, pick)) return true;
      pick.pop_back();
    }
    return false;
  }

  bool extend(const std::vector<Vertex>& group) {
    for (Vertex v : group) used[static_cast<std::size_t>(v)] = 1;
    groups.push_back(group);
    if (static_cast<int>(groups.size()) == j) return true;
    std::vector<Vertex> cand = common_candidates(g, group, anchor, used);
    if (static_cast<int>(groups.size()) == j - 1) {
      // The last group must also close the cycle back to the first one.
      std::vector<Vertex> closing = common_candidates(g, groups.front(), anchor, used);
      cand = intersect_sorted(cand, closing);
    }
    std::vector<Vertex> pick;
    if (static_cast<int>(cand.size()) >= r && choose(cand, 0, pick)) return true;
    groups.pop_back();
    for (Vertex v : group) used[static_cast<std::size_t>(v)] = 0;
    return false;
  }

  bool run() {
    used.assign(static_cast<std::size_t>(g.num_vertices()), 0);
    for (anchor = 0; anchor < g.num_vertices(); ++anchor) {
      if (g.degree(anchor) < r) continue;
      // First group: the anchor plus r-1 larger vertices sharing at least r neighbours.
      std::vector<Vertex> rest;
      for (Vertex v = anchor + 1; v < g.num_vertices(); ++v) rest.push_back(v);
      std::vector<Vertex> pick{anchor};
      std::function<bool(std::size_t)> first = [&](std::size_t from) -> bool {
        if (static_cast<int>(pick.size()) == r) return extend(pick);
        for (std::size_t i = from; i < rest.size(); ++i) {
          tick();
          pick.push_back(rest[i]);
          if (first(i + 1)) return true;
          pick.pop_back();
        }
        return false;
      };
      if (first(0)) return true;
    }
    return false;
  }
};

}  // namespace

std::optional<BlowupCycleCopy> find_blowup_cycle(const Graph& g, int j, int r, std::int64_t& nodes,
                                                 std::int64_t budget) {
  if (j < 3 || r < 1) throw Error(ErrorKind::PreconditionViolated, "blow-up cycle needs j >= 3 and r >= 1");
  CycleSearch search{g, j, r, nodes, budget, {}, {}, 0};
  if (search.run()) return search.groups;
  return std::nullopt;
}

CrFreeResult crfree_construction(int n, int r, int kmax, std::uint64_t seed, double c, std::int64_t budget) {
  if (r < 1 || kmax < 3 || n < 1)
    throw Error(ErrorKind::PreconditionViolated, "crfree construction needs n >= 1, r >= 1 and kmax >= 3");
  CrFreeResult out;
  out.r = r;
  out.kmax = kmax;
  out.c = c;
  out.p = std::pow(static_cast<double>(n), -1.0 / r);
  Graph g = random_graph(n, out.p, derive_seed(seed, "crfree-sample"));
  out.initial_edges = g.num_edges();

  for (int j = 3; j <= kmax; ++j) {
    for (;;) {
      auto copy = find_blowup_cycle(g, j, r, out.search_nodes, budget);
      if (!copy) break;
      EdgeId lowest = -1;
      for (int i = 0; i < j; ++i)
        for (Vertex a : (*copy)[static_cast<std::size_t>(i)])
          for (Vertex b : (*copy)[static_cast<std::size_t>((i + 1) % j)]) {
            EdgeId e = *g.find_edge(a, b);
            if (lowest < 0 || g.edge(e) < g.edge(lowest)) lowest = e;
          }
      std::vector<EdgeId> keep;
      keep.reserve(static_cast<std::size_t>(g.num_edges()));
      for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (e != lowest) keep.push_back(e);
      g = g.with_edges(keep);
      ++out.removed_edges;
    }
  }
  // Deleting edges never creates a copy, so one pass per j suffices.
  out.graph = std::move(g);
  out.edge_bound = c * std::pow(static_cast<double>(n), 2.0 - 1.0 / r);
  out.meets_bound = out.graph.num_edges() >= out.edge_bound;
  return out;
}

}  // namespace rainbow
