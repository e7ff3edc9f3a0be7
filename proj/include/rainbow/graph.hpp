#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rainbow {

using Vertex = int;
using EdgeId = int;
using Colour = int;
// Compare only against other Rationals: the mixed integer operators of older
// Boost recurse forever under C++20 reversed-operator rewriting.
using Rational = boost::rational<std::int64_t>;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on vertices 0..n-1 in compressed adjacency form.
///
/// Edges are stored with u < v and receive dense ids in insertion order.
/// Neighbour lists are sorted, and `incident(v)[i]` is the id of the edge to
/// `neighbours(v)[i]`.  A graph produced by taking a subgraph remembers, for
/// every vertex, the label it had in the root graph, so certificates can be
/// written in the vertex numbering of the file that was loaded.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);
  /// Throws InvalidVertex on out-of-range endpoints or self-loops and
  /// DuplicateEdge on parallel edges.
  Graph(int n, std::vector<Edge> edges);

  int num_vertices() const noexcept { return n_; }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

  std::span<const Vertex> neighbours(Vertex v) const;
  std::span<const EdgeId> incident(Vertex v) const;
  int degree(Vertex v) const;
  int min_degree() const;
  int max_degree() const;

  bool has_edge(Vertex u, Vertex v) const { return find_edge(u, v).has_value(); }
  std::optional<EdgeId> find_edge(Vertex u, Vertex v) const;

  bool valid(Vertex v) const noexcept { return v >= 0 && v < n_; }

  Vertex label(Vertex v) const { return labels_[static_cast<std::size_t>(v)]; }
  const std::vector<Vertex>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<Vertex> labels);
  std::optional<Vertex> find_label(Vertex label) const;

  /// Induced subgraph on `keep` (any order, duplicates ignored).  New vertex
  /// ids follow increasing old id.  `edge_origin`, when given, receives the
  /// old edge id of every new edge.
  Graph induced(std::span<const Vertex> keep, std::vector<EdgeId>* edge_origin = nullptr) const;

  /// Spanning subgraph keeping only the listed edge ids (vertex set unchanged).
  Graph with_edges(std::span<const EdgeId> keep) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_;
  std::vector<Vertex> adjacency_;
  std::vector<EdgeId> adjacency_edge_;
  std::vector<Vertex> labels_;

  void build_adjacency();
};

/// Graph with a proper edge-colouring; `colour(e)` is indexed by edge id.
class ColouredGraph {
 public:
  ColouredGraph() = default;
  /// Validates properness (throws ImproperColouring naming the first clash).
  ColouredGraph(Graph graph, std::vector<Colour> colours);

  const Graph& graph() const noexcept { return graph_; }
  Colour colour(EdgeId e) const { return colours_[static_cast<std::size_t>(e)]; }
  std::optional<Colour> colour(Vertex u, Vertex v) const;
  const std::vector<Colour>& colours() const noexcept { return colours_; }
  int num_colours() const noexcept { return num_colours_; }

  int num_vertices() const noexcept { return graph_.num_vertices(); }
  int num_edges() const noexcept { return graph_.num_edges(); }

  ColouredGraph induced(std::span<const Vertex> keep) const;
  ColouredGraph with_edges(std::span<const EdgeId> keep) const;

 private:
  Graph graph_;
  std::vector<Colour> colours_;
  int num_colours_ = 0;
};

/// Two-colour classes of a connected bipartite graph, larger class first.
struct Bipartition {
  std::vector<Vertex> x;
  std::vector<Vertex> y;
  std::vector<char> in_x;  // indexed by vertex

  bool contains_x(Vertex v) const { return in_x[static_cast<std::size_t>(v)] != 0; }
};

struct CutDensity {
  std::int64_t inside = 0;   // e(S)
  std::int64_t crossing = 0; // e(S, S^c)
  Rational density;          // d(S) = 2 e(S) / |S|, 0 for empty S
};

/// Throws OddCycle (message lists a witness cycle) or Disconnected.
Bipartition bipartition(const Graph& g);
/// Odd cycle witness, when the graph is not bipartite.
std::vector<Vertex> odd_cycle(const Graph& g);
/// Per-vertex side (0/1) of a 2-colouring of every component, if bipartite.
std::optional<std::vector<int>> two_colouring(const Graph& g);

Rational average_degree(const Graph& g);
double average_degree_value(const Graph& g);
CutDensity cut_and_density(const Graph& g, std::span<const Vertex> subset);

bool is_connected(const Graph& g);
std::vector<std::vector<Vertex>> connected_components(const Graph& g);
/// Vertices with at least one incident edge.
std::vector<Vertex> non_isolated_vertices(const Graph& g);

/// Remaps colour ids to 0..C-1 preserving their order.
std::vector<Colour> canonical_palette(std::span<const Colour> colours);

}  // namespace rainbow
