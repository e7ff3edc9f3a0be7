#pragma once
// Independent brute-force reference implementations used only by tests.
// They share nothing with the library beyond the graph containers.

#include "rainbow/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace oracle {

using rainbow::ColouredGraph;
using rainbow::Graph;
using rainbow::Vertex;

inline bool is_proper(const ColouredGraph& g) {
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    std::set<int> seen;
    for (auto e : g.graph().incident(v))
      if (!seen.insert(g.colour(e)).second) return false;
  }
  return true;
}

/// Number of rainbow cycles (as subgraphs).
inline std::int64_t count_rainbow_cycles(const ColouredGraph& g) {
  const Graph& h = g.graph();
  std::int64_t twice = 0;
  std::vector<char> on(static_cast<std::size_t>(h.num_vertices()), 0);
  std::set<int> used;
  std::function<void(Vertex, Vertex, int)> dfs = [&](Vertex start, Vertex cur, int len) {
    auto nb = h.neighbours(cur);
    auto inc = h.incident(cur);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      Vertex w = nb[i];
      int c = g.colour(inc[i]);
      if (used.count(c)) continue;
      if (w == start && len >= 2) {
        ++twice;
        continue;
      }
      if (w <= start || on[static_cast<std::size_t>(w)]) continue;
      on[static_cast<std::size_t>(w)] = 1;
      used.insert(c);
      dfs(start, w, len + 1);
      used.erase(c);
      on[static_cast<std::size_t>(w)] = 0;
    }
  };
  for (Vertex s = 0; s < h.num_vertices(); ++s) {
    on[static_cast<std::size_t>(s)] = 1;
    dfs(s, s, 0);
    on[static_cast<std::size_t>(s)] = 0;
  }
  return twice / 2;
}

/// Plain backtracking search for a (not necessarily induced) copy of `pattern`.
inline bool has_subgraph(const Graph& host, const Graph& pattern) {
  const int p = pattern.num_vertices();
  // Order pattern vertices so that each one after the first has an earlier neighbour.
  std::vector<Vertex> order{0};
  std::vector<char> placed(static_cast<std::size_t>(p), 0);
  placed[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (Vertex w : pattern.neighbours(order[i]))
      if (!placed[static_cast<std::size_t>(w)]) {
        placed[static_cast<std::size_t>(w)] = 1;
        order.push_back(w);
      }
  std::vector<Vertex> image(static_cast<std::size_t>(p), -1);
  std::vector<char> taken(static_cast<std::size_t>(host.num_vertices()), 0);
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == order.size()) return true;
    Vertex pv = order[i];
    // Candidates: all host vertices for the first pattern vertex, otherwise
    // the neighbours of the image of some already placed pattern neighbour.
    std::vector<Vertex> cand;
    Vertex anchor = -1;
    for (Vertex pw : pattern.neighbours(pv))
      if (image[static_cast<std::size_t>(pw)] >= 0) anchor = image[static_cast<std::size_t>(pw)];
    if (anchor < 0)
      for (Vertex hv = 0; hv < host.num_vertices(); ++hv) cand.push_back(hv);
    else
      cand.assign(host.neighbours(anchor).begin(), host.neighbours(anchor).end());
    for (Vertex hv : cand) {
      if (taken[static_cast<std::size_t>(hv)]) continue;
      bool ok = true;
      for (Vertex pw : pattern.neighbours(pv)) {
        Vertex hw = image[static_cast<std::size_t>(pw)];
        if (hw >= 0 && !host.has_edge(hv, hw)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      image[static_cast<std::size_t>(pv)] = hv;
      taken[static_cast<std::size_t>(hv)] = 1;
      if (go(i + 1)) return true;
      taken[static_cast<std::size_t>(hv)] = 0;
      image[static_cast<std::size_t>(pv)] = -1;
    }
    return false;
  };
  return go(0);
}

inline Graph blown_up_cycle_pattern(int j, int r) {
  std::vector<rainbow::Edge> e;
  for (int i = 0; i < j; ++i)
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        Vertex u = i * r + a, v = ((i + 1) % j) * r + b;
        e.push_back({std::min(u, v), std::max(u, v)});
      }
  return Graph(j * r, e);
}

inline bool has_blowup_cycle(const Graph& g, int j, int r) {
  return has_subgraph(g, blown_up_cycle_pattern(j, r));
}

inline bool is_blowup_cycle_copy(const Graph& g, const std::vector<std::vector<Vertex>>& groups, int r) {
  std::set<Vertex> all;
  for (const auto& grp : groups) {
    if (static_cast<int>(grp.size()) != r) return false;
    for (Vertex v : grp)
      if (!all.insert(v).second) return false;
  }
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (Vertex a : groups[i])
      for (Vertex b : groups[(i + 1) % groups.size()])
        if (!g.has_edge(a, b)) return false;
  return true;
}

/// (A^k)_{x,y} by plain integer matrix multiplication.
inline std::vector<std::vector<__int128>> adjacency_power(const Graph& g, int k) {
  const std::size_t n = static_cast<std::size_t>(g.num_vertices());
  std::vector<std::vector<__int128>> a(n, std::vector<__int128>(n, 0)), p(n, std::vector<__int128>(n, 0));
  for (const auto& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1;
  for (std::size_t i = 0; i < n; ++i) p[i][i] = 1;
  for (int step = 0; step < k; ++step) {
    std::vector<std::vector<__int128>> q(n, std::vector<__int128>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        if (p[i][l])
          for (std::size_t j = 0; j < n; ++j) q[i][j] += p[i][l] * a[l][j];
    p.swap(q);
  }
  return p;
}

/// Every closed 2k-walk with x at step 0 and y at step k, by plain recursion.
inline std::vector<std::vector<Vertex>> closed_walks(const Graph& g, Vertex x, Vertex y, int k) {
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> w{x};
  std::function<void()> go = [&] {
    const int len = static_cast<int>(w.size()) - 1;
    if (len == 2 * k) {
      if (w.back() == x) out.push_back(w);
      return;
    }
    if (len == k && w.back() != y) return;
    for (Vertex u : g.neighbours(w.back())) {
      w.push_back(u);
      go();
      w.pop_back();
    }
  };
  go();
  std::erase_if(out, [&](const std::vector<Vertex>& c) { return c[static_cast<std::size_t>(k)] != y; });
  return out;
}

/// A closed walk w_0..w_2k is a rainbow 2k-cycle iff its 2k vertices and 2k colours are distinct.
inline bool is_rainbow_cycle(const ColouredGraph& g, const std::vector<Vertex>& w) {
  std::set<Vertex> vs(w.begin(), w.end() - 1);
  std::set<int> cs;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) cs.insert(*g.colour(w[i], w[i + 1]));
  return vs.size() + 1 == w.size() && cs.size() + 1 == w.size();
}

inline ColouredGraph fully_rainbow(const Graph& g) {
  std::vector<int> c(static_cast<std::size_t>(g.num_edges()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<int>(i);
  return ColouredGraph(g, c);
}

inline Graph cycle_graph(int n) {
  std::vector<rainbow::Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({std::min(i, (i + 1) % n), std::max(i, (i + 1) % n)});
  return Graph(n, e);
}

inline Graph complete_bipartite(int a, int b) {
  std::vector<rainbow::Edge> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.push_back({i, a + j});
  return Graph(a + b, e);
}

inline Graph complete_graph(int n) {
  std::vector<rainbow::Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph(n, e);
}

/// Independent check of a rainbow K_m-subdivision: one path per branch pair,
/// edges present, union rainbow, paths internally disjoint and clear of the
/// branch set.
inline bool is_rainbow_subdivision(const ColouredGraph& g, const std::vector<Vertex>& branch,
                                   const std::vector<std::vector<Vertex>>& paths, bool check_colours = true) {
  std::set<std::pair<Vertex, Vertex>> ends;
  std::set<Vertex> inner;
  std::set<int> colours;
  const std::set<Vertex> z(branch.begin(), branch.end());
  for (const auto& p : paths) {
    if (p.size() < 2 || !z.count(p.front()) || !z.count(p.back()) || p.front() == p.back()) return false;
    ends.insert(std::minmax(p.front(), p.back()));
    if (std::set<Vertex>(p.begin(), p.end()).size() != p.size()) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      auto c = g.colour(p[i], p[i + 1]);
      if (!c) return false;
      if (check_colours && !colours.insert(*c).second) return false;
      if (i > 0 && (z.count(p[i]) || !inner.insert(p[i]).second)) return false;
    }
  }
  return z.size() == branch.size() && ends.size() == branch.size() * (branch.size() - 1) / 2 &&
         paths.size() == ends.size();
}

}  // namespace oracle
