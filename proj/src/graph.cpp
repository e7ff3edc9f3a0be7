#include "rainbow/graph.hpp"

#include "rainbow/error.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace rainbow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ImproperColouring: return "ImproperColouring";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::InvalidVertex: return "InvalidVertex";
    case ErrorKind::OddCycle: return "OddCycle";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ThresholdUnreachable: return "ThresholdUnreachable";
    case ErrorKind::RetriesExhausted: return "RetriesExhausted";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorKind::IsolatedVertex: return "IsolatedVertex";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::ViolationFound: return "ViolationFound";
    case ErrorKind::NoWalk: return "NoWalk";
    case ErrorKind::RoundsExhausted: return "RoundsExhausted";
    case ErrorKind::IterationCapExceeded: return "IterationCapExceeded";
    case ErrorKind::NoGoodPair: return "NoGoodPair";
    case ErrorKind::NoCliqueOfGoodPairs: return "NoCliqueOfGoodPairs";
    case ErrorKind::SpecError: return "SpecError";
  }
  return "Unknown";
}

Graph::Graph(int n) : n_(n) {
  if (n < 0) throw Error(ErrorKind::InvalidVertex, "negative vertex count");
  labels_.resize(static_cast<std::size_t>(n));
  std::iota(labels_.begin(), labels_.end(), 0);
  build_adjacency();
}

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n < 0) throw Error(ErrorKind::InvalidVertex, "negative vertex count");
  for (auto& e : edges_) {
    if (!valid(e.u) || !valid(e.v)) {
      std::ostringstream msg;
      msg << "edge (" << e.u << ", " << e.v << ") outside 0.." << n - 1;
      throw Error(ErrorKind::InvalidVertex, msg.str());
    }
    if (e.u == e.v) throw Error(ErrorKind::InvalidVertex, "self-loop at " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  labels_.resize(static_cast<std::size_t>(n));
  std::iota(labels_.begin(), labels_.end(), 0);
  build_adjacency();
}

void Graph::build_adjacency() {
  std::vector<int> deg(static_cast<std::size_t>(n_) + 1, 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int v = 0; v < n_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  adjacency_.assign(static_cast<std::size_t>(offsets_[n_]), 0);
  adjacency_edge_.assign(adjacency_.size(), 0);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < num_edges(); ++id) {
    const auto& e = edges_[id];
    adjacency_[fill[e.u]] = e.v;
    adjacency_edge_[fill[e.u]++] = id;
    adjacency_[fill[e.v]] = e.u;
    adjacency_edge_[fill[e.v]++] = id;
  }
  std::vector<std::pair<Vertex, EdgeId>> buf;
  for (int v = 0; v < n_; ++v) {
    buf.clear();
    for (int i = offsets_[v]; i < offsets_[v + 1]; ++i) buf.emplace_back(adjacency_[i], adjacency_edge_[i]);
    std::sort(buf.begin(), buf.end());
    for (std::size_t i = 0; i < buf.size(); ++i) {
      if (i > 0 && buf[i].first == buf[i - 1].first) {
        std::ostringstream msg;
        msg << "edge (" << std::min(v, buf[i].first) << ", " << std::max(v, buf[i].first)
            << ") listed twice";
        throw Error(ErrorKind::DuplicateEdge, msg.str());
      }
      adjacency_[offsets_[v] + static_cast<int>(i)] = buf[i].first;
      adjacency_edge_[offsets_[v] + static_cast<int>(i)] = buf[i].second;
    }
  }
}

std::span<const Vertex> Graph::neighbours(Vertex v) const {
  return {adjacency_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
}

std::span<const EdgeId> Graph::incident(Vertex v) const {
  return {adjacency_edge_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
}

int Graph::degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

int Graph::min_degree() const {
  int best = n_ == 0 ? 0 : degree(0);
  for (int v = 1; v < n_; ++v) best = std::min(best, degree(v));
  return best;
}

int Graph::max_degree() const {
  int best = 0;
  for (int v = 0; v < n_; ++v) best = std::max(best, degree(v));
  return best;
}

std::optional<EdgeId> Graph::find_edge(Vertex u, Vertex v) const {
  if (!valid(u) || !valid(v)) return std::nullopt;
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbours(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return std::nullopt;
  return incident(u)[static_cast<std::size_t>(it - nb.begin())];
}

void Graph::set_labels(std::vector<Vertex> labels) {
  if (static_cast<int>(labels.size()) != n_) throw Error(ErrorKind::InvalidVertex, "label count mismatch");
  labels_ = std::move(labels);
}

std::optional<Vertex> Graph::find_label(Vertex label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Vertex>(it - labels_.begin());
}

Graph Graph::induced(std::span<const Vertex> keep, std::vector<EdgeId>* edge_origin) const {
  std::vector<Vertex> index(static_cast<std::size_t>(n_), -1);
  for (Vertex v : keep) {
    if (!valid(v)) throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(v));
    index[v] = 0;
  }
  std::vector<Vertex> new_labels;
  int next = 0;
  for (Vertex v = 0; v < n_; ++v) {
    if (index[v] == 0) {
      index[v] = next++;
      new_labels.push_back(labels_[v]);
    }
  }
  std::vector<Edge> kept;
  if (edge_origin) edge_origin->clear();
  for (EdgeId id = 0; id < num_edges(); ++id) {
    const auto& e = edges_[id];
    if (index[e.u] >= 0 && index[e.v] >= 0) {
      kept.push_back({index[e.u], index[e.v]});
      if (edge_origin) edge_origin->push_back(id);
    }
  }
  Graph sub(next, std::move(kept));
  sub.labels_ = std::move(new_labels);
  return sub;
}

Graph Graph::with_edges(std::span<const EdgeId> keep) const {
  std::vector<Edge> kept;
  kept.reserve(keep.size());
  for (EdgeId id : keep) kept.push_back(edges_.at(static_cast<std::size_t>(id)));
  Graph sub(n_, std::move(kept));
  sub.labels_ = labels_;
  return sub;
}

ColouredGraph::ColouredGraph(Graph graph, std::vector<Colour> colours)
    : graph_(std::move(graph)), colours_(std::move(colours)) {
  if (static_cast<int>(colours_.size()) != graph_.num_edges())
    throw Error(ErrorKind::ParseError, "colour count does not match edge count");
  std::unordered_map<std::int64_t, EdgeId> seen;
  seen.reserve(colours_.size() * 2);
  for (EdgeId id = 0; id < graph_.num_edges(); ++id) {
    Colour c = colours_[id];
    if (c < 0) throw Error(ErrorKind::ParseError, "negative colour on edge " + std::to_string(id));
    num_colours_ = std::max(num_colours_, c + 1);
    for (Vertex end : {graph_.edge(id).u, graph_.edge(id).v}) {
      auto key = (static_cast<std::int64_t>(end) << 32) | static_cast<std::uint32_t>(c);
      auto [it, inserted] = seen.emplace(key, id);
      if (!inserted) {
        const auto& a = graph_.edge(it->second);
        const auto& b = graph_.edge(id);
        std::ostringstream msg;
        msg << "edges (" << graph_.label(a.u) << ", " << graph_.label(a.v) << ") and ("
            << graph_.label(b.u) << ", " << graph_.label(b.v) << ") share vertex "
            << graph_.label(end) << " and colour " << c;
        throw Error(ErrorKind::ImproperColouring, msg.str());
      }
    }
  }
}

std::optional<Colour> ColouredGraph::colour(Vertex u, Vertex v) const {
  auto e = graph_.find_edge(u, v);
  if (!e) return std::nullopt;
  return colours_[*e];
}

ColouredGraph ColouredGraph::induced(std::span<const Vertex> keep) const {
  std::vector<EdgeId> origin;
  Graph sub = graph_.induced(keep, &origin);
  std::vector<Colour> cols;
  cols.reserve(origin.size());
  for (EdgeId id : origin) cols.push_back(colours_[id]);
  return ColouredGraph(std::move(sub), std::move(cols));
}

ColouredGraph ColouredGraph::with_edges(std::span<const EdgeId> keep) const {
  Graph sub = graph_.with_edges(keep);
  std::vector<Colour> cols;
  cols.reserve(keep.size());
  for (EdgeId id : keep) cols.push_back(colours_[id]);
  return ColouredGraph(std::move(sub), std::move(cols));
}

namespace {

// BFS 2-colouring; on failure returns the clashing edge and BFS parents.
struct TwoColourResult {
  std::vector<int> side;
  std::vector<Vertex> parent;
  std::optional<Edge> clash;
};

TwoColourResult bfs_two_colour(const Graph& g) {
  TwoColourResult r;
  const int n = g.num_vertices();
  r.side.assign(static_cast<std::size_t>(n), -1);
  r.parent.assign(static_cast<std::size_t>(n), -1);
  std::queue<Vertex> queue;
  for (Vertex s = 0; s < n; ++s) {
    if (r.side[s] >= 0) continue;
    r.side[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      Vertex u = queue.front();
      queue.pop();
      for (Vertex w : g.neighbours(u)) {
        if (r.side[w] < 0) {
          r.side[w] = 1 - r.side[u];
          r.parent[w] = u;
          queue.push(w);
        } else if (r.side[w] == r.side[u] && !r.clash) {
          r.clash = Edge{u, w};
        }
      }
    }
  }
  return r;
}

}  // namespace

std::optional<std::vector<int>> two_colouring(const Graph& g) {
  auto r = bfs_two_colour(g);
  if (r.clash) return std::nullopt;
  return r.side;
}

std::vector<Vertex> odd_cycle(const Graph& g) {
  auto r = bfs_two_colour(g);
  if (!r.clash) return {};
  // Walk both endpoints up the BFS tree to their lowest common ancestor.
  std::vector<Vertex> left{r.clash->u};
  std::vector<Vertex> right{r.clash->v};
  auto depth = [&](Vertex v) {
    int d = 0;
    while (r.parent[v] >= 0) {
      v = r.parent[v];
      ++d;
    }
    return d;
  };
  Vertex a = r.clash->u, b = r.clash->v;
  int da = depth(a), db = depth(b);
  while (da > db) { a = r.parent[a]; left.push_back(a); --da; }
  while (db > da) { b = r.parent[b]; right.push_back(b); --db; }
  while (a != b) {
    a = r.parent[a];
    b = r.parent[b];
    left.push_back(a);
    right.push_back(b);
  }
  right.pop_back();  // common ancestor already in `left`
  std::reverse(right.begin(), right.end());
  left.insert(left.end(), right.begin(), right.end());
  return left;
}

Bipartition bipartition(const Graph& g) {
  auto r = bfs_two_colour(g);
  if (r.clash) {
    auto cycle = odd_cycle(g);
    std::ostringstream msg;
    msg << "odd cycle of length " << cycle.size() << ":";
    for (Vertex v : cycle) msg << ' ' << g.label(v);
    throw Error(ErrorKind::OddCycle, msg.str());
  }
  if (!is_connected(g)) throw Error(ErrorKind::Disconnected, "bipartition needs a connected graph");
  Bipartition b;
  for (Vertex v = 0; v < g.num_vertices(); ++v) (r.side[v] == 0 ? b.x : b.y).push_back(v);
  if (b.x.size() < b.y.size() || (b.x.size() == b.y.size() && !b.y.empty() && b.y.front() < b.x.front()))
    std::swap(b.x, b.y);
  b.in_x.assign(static_cast<std::size_t>(g.num_vertices()), 0);
  for (Vertex v : b.x) b.in_x[v] = 1;
  return b;
}

Rational average_degree(const Graph& g) {
  if (g.num_vertices() == 0) return Rational(0);
  return Rational(2 * static_cast<std::int64_t>(g.num_edges()), g.num_vertices());
}

double average_degree_value(const Graph& g) {
  return g.num_vertices() == 0 ? 0.0 : 2.0 * g.num_edges() / g.num_vertices();
}

CutDensity cut_and_density(const Graph& g, std::span<const Vertex> subset) {
  std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
  std::int64_t size = 0;
  for (Vertex v : subset) {
    if (!g.valid(v)) throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(v));
    if (!in[v]) {
      in[v] = 1;
      ++size;
    }
  }
  CutDensity out;
  for (const auto& e : g.edges()) {
    if (in[e.u] && in[e.v]) ++out.inside;
    else if (in[e.u] != in[e.v]) ++out.crossing;
  }
  out.density = size == 0 ? Rational(0) : Rational(2 * out.inside, size);
  return out;
}

std::vector<std::vector<Vertex>> connected_components(const Graph& g) {
  std::vector<int> comp(static_cast<std::size_t>(g.num_vertices()), -1);
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.num_vertices(); ++s) {
    if (comp[s] >= 0) continue;
    out.emplace_back();
    comp[s] = static_cast<int>(out.size()) - 1;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      out.back().push_back(u);
      for (Vertex w : g.neighbours(u)) {
        if (comp[w] < 0) {
          comp[w] = comp[s];
          stack.push_back(w);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

std::vector<Vertex> non_isolated_vertices(const Graph& g) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (g.degree(v) > 0) out.push_back(v);
  return out;
}

std::vector<Colour> canonical_palette(std::span<const Colour> colours) {
  std::vector<Colour> distinct(colours.begin(), colours.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<Colour> out;
  out.reserve(colours.size());
  for (Colour c : colours)
    out.push_back(static_cast<Colour>(std::lower_bound(distinct.begin(), distinct.end(), c) - distinct.begin()));
  return out;
}

}  // namespace rainbow
