#pragma once

#include "rainbow/expander.hpp"
#include "rainbow/graph.hpp"
#include "rainbow/params.hpp"
#include "rainbow/walkcount.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rainbow {

/// Vertices and colours a path must stay clear of.  Its size |F| counts both.
struct AvoidSet {
  std::set<Vertex> vertices;
  std::set<Colour> colours;

  std::size_t size() const { return vertices.size() + colours.size(); }
  bool has_vertex(Vertex v) const { return vertices.count(v) != 0; }
  bool has_colour(Colour c) const { return colours.count(c) != 0; }
};

/// A path with the colour of each of its edges; colours[i] is the colour of
/// vertices[i] -- vertices[i + 1].
struct RainbowPath {
  std::vector<Vertex> vertices;
  std::vector<Colour> colours;

  int length() const { return static_cast<int>(colours.size()); }
  Vertex front() const { return vertices.front(); }
  Vertex back() const { return vertices.back(); }
};

/// Reads the colours off `g`; throws ViolationFound unless the vertex sequence
/// is a rainbow path of `g`.
RainbowPath make_rainbow_path(const ColouredGraph& g, std::vector<Vertex> vertices);
bool is_rainbow_path(const ColouredGraph& g, const std::vector<Vertex>& vertices);

/// Deletion-only shortcutting of a walk: at the first vertex that occurs
/// again, cut everything up to its last occurrence; repeat.  Colours of the
/// surviving edges are kept, so a walk without repeated colours becomes a
/// rainbow path between the same ends.
RainbowPath shortcut_walk(const RainbowPath& walk);

struct ReachSet {
  Vertex source = 0;
  std::vector<Vertex> reached;           // U, ascending, source included
  std::map<Vertex, RainbowPath> path_of;  // designated path from the source
  std::map<Colour, int> colour_usage;     // number of designated paths per colour
  int max_usage = 0;
  // Robust variant bookkeeping.
  std::vector<Colour> bad_colours;  // C_bad at the fixed point
  std::size_t max_bad_colours = 0;  // largest C_bad seen during the run
  int iterations = 1;

  bool contains(Vertex v) const { return path_of.count(v) != 0; }
};

/// Layered growth for ell + 1 rounds.  A frontier edge (u, w) extends when w
/// is new, not in F, its colour is not in F and not on u's designated path.
/// Frontier vertices are scanned in increasing index, their edges in
/// increasing colour.
ReachSet rainbow_reach(const ColouredGraph& g, Vertex x, const AvoidSet& F, int ell);

/// Reach sets in which no colour lies on more than n/q designated paths:
/// colours over the cap are banned and the growth re-run until none is, with
/// at most 2 q ell banned colours (IterationCapExceeded otherwise).
ReachSet rainbow_reach_robust(const ColouredGraph& g, Vertex x, const AvoidSet& F, int ell, int q);

/// Bad-pair predicate over two x-y walks of the same length.
using WalkPairPredicate = std::function<bool(const Walk&, const Walk&)>;
using WalkFilter = std::function<bool(const Walk&)>;

struct ThetaStats {
  int rounds = 0;
  std::int64_t pairs_checked = 0;
  std::int64_t pairs_bad = 0;
  std::int64_t walks_rejected = 0;
};

/// Rounds of s independent uniform x-y walks of length k; a round is accepted
/// when every walk passes `accept` (if given) and no two walks form a bad
/// pair.  Throws RoundsExhausted with the measured bad-pair share.
std::vector<Walk> theta_sampler(const Graph& g, Vertex x, Vertex y, int k, int s, const WalkPairPredicate& bad,
                                std::uint64_t seed, int max_rounds, const WalkFilter& accept = {},
                                ThetaStats* stats = nullptr);

/// s pairwise colour-disjoint, internally vertex-disjoint rainbow x-y paths of
/// length k: theta-sampling where a pair is bad unless its concatenation is a
/// rainbow 2k-cycle.
std::vector<RainbowPath> disjoint_rainbow_paths(const ColouredGraph& g, Vertex x, Vertex y, int k, int s,
                                                std::uint64_t seed, int max_rounds = 200,
                                                ThetaStats* stats = nullptr);

/// What "disjoint" means for the connectors of a search.
enum class PathMode {
  Rainbow,         // vertices and colours
  VertexDisjoint,  // vertices only (uncoloured graphs)
  RSetDisjoint,    // host vertices of the r-sets behind each vertex
};

const char* to_string(PathMode m);

/// The graph a subdivision search runs on.
struct SearchGraph {
  ColouredGraph graph;
  PathMode mode = PathMode::Rainbow;
  std::vector<std::vector<Vertex>> rsets;  // RSetDisjoint: host r-set per vertex
  int universe = 0;                        // host vertex count behind the r-sets
};

/// Edge ids as colours: the only proper colouring that never constrains.
ColouredGraph colour_by_edge_id(const Graph& g);

/// Colours of `parent` transported to `sub`, whose labels are vertex ids of
/// `parent`.
ColouredGraph restrict_to(const ColouredGraph& parent, const Graph& sub);

/// Spanning bipartite subgraph with at least half the edges (and half of
/// every vertex's degree): seeded random sides improved by single-vertex
/// flips until none increases the cut.  Edges are listed in sorted order.
Graph bipartite_subgraph(const Graph& g, std::uint64_t seed);

/// The almost-regular bipartite expander a search works inside.
struct ExpanderStage {
  ColouredGraph coloured;           // expander, coloured from the search graph
  std::vector<Vertex> to_search;    // expander vertex -> search-graph vertex
  std::vector<Vertex> from_search;  // search-graph vertex -> expander vertex or -1
  Bipartition bip;
  AlmostRegularResult expander;
  std::vector<std::vector<Vertex>> rsets;  // per expander vertex (RSetDisjoint)
  PathMode mode = PathMode::Rainbow;
  int universe = 0;
  int input_vertices = 0;
  int input_edges = 0;
  int bipartite_edges = 0;
  bool took_largest_component = false;

  const Graph& graph() const { return coloured.graph(); }
  ClosedWalkRule rule() const;
  nlohmann::json summary() const;
};

/// Isolated vertices dropped, a bipartite subgraph taken, then the
/// almost-regular expander iteration (relaxed as configured).
ExpanderStage prepare_expander(const SearchGraph& sg, const SearchParams& p, std::uint64_t seed);

/// Lazily classified pairs of expander vertices, memoised symmetrically.
class PairOracle {
 public:
  PairOracle(const ExpanderStage& stage, int k, int s, const PairOptions& opt);
  Verdict verdict(Vertex a, Vertex b);
  int evaluated() const { return static_cast<int>(cache_.size()); }
  int good() const { return good_; }
  nlohmann::json summary() const;

 private:
  const ExpanderStage* stage_;
  ClosedWalkRule rule_;
  int k_;
  int s_;
  PairOptions opt_;
  std::map<std::pair<Vertex, Vertex>, Verdict> cache_;
  int good_ = 0;
  int bad_ = 0;
  int unknown_ = 0;
};

/// Z of size m inside X with every pair good: greedy independent set in the
/// bad-pair graph, restarted from successive start vertices.  Expander ids.
std::vector<Vertex> greedy_good_clique(const ExpanderStage& stage, PairOracle& oracle, int m, int max_starts);

struct SubdivisionCertificate {
  std::vector<Vertex> branch;               // Z
  std::vector<std::pair<int, int>> pairs;   // indices into branch, lexicographic
  std::vector<std::vector<Vertex>> paths;   // connector i joins branch[pairs[i]]
  std::vector<std::vector<Colour>> colours; // edge colours along each connector
  int length_bound = 0;
  bool rooted = false;
  nlohmann::json params;
  nlohmann::json evidence;
};

enum class VerifyFailure {
  None,
  Shape,
  WrongEndpoints,
  MissingEdge,
  ColourMismatch,
  RepeatedVertex,
  ColourCollision,
  VertexCollision,
  InteriorHitsBranch,
  TooLong,
  RSetOverlap,
  MissingBicliqueEdge,
};

const char* to_string(VerifyFailure f);

struct VerifyResult {
  VerifyFailure reason = VerifyFailure::None;
  std::string detail;

  bool ok() const { return reason == VerifyFailure::None; }
  explicit operator bool() const { return ok(); }
};

/// Never throws.  With `rainbow` unset the colour checks are skipped (paths
/// must still use edges of g).
VerifyResult verify_subdivision(const ColouredGraph& g, const SubdivisionCertificate& cert, bool rainbow = true);

/// Edges of all connectors, u < v, sorted.
std::vector<Edge> expanded_edges(const SubdivisionCertificate& cert);

nlohmann::json to_json(const SubdivisionCertificate& cert);
SubdivisionCertificate subdivision_from_json(const nlohmann::json& j);

/// Shared engine: good-pair clique in the expander, then one connector per
/// pair picked from s theta-sampled spares clear of everything used so far.
/// Certificate vertices are search-graph ids.
SubdivisionCertificate find_subdivision_in(const SearchGraph& sg, int m, const SearchParams& p, std::uint64_t seed);

SubdivisionCertificate find_subdivision(const ColouredGraph& g, int m, const SearchParams& p, std::uint64_t seed);
/// Colours are edge ids and only vertex repetitions are degenerate.
SubdivisionCertificate find_subdivision_uncoloured(const Graph& g, int m, const SearchParams& p,
                                                   std::uint64_t seed);

struct ConnectStats {
  std::size_t reach_x = 0;
  std::size_t reach_y = 0;
  int pairs_tried = 0;
  int colour_bad_skipped = 0;
  int not_good_skipped = 0;
  int rounds = 0;
  Vertex u = -1;
  Vertex v = -1;
};

/// Rainbow x-y path of length <= L avoiding M: robust reach sets from both
/// ends, a pair (u, v) of X that is neither colour-bad nor s-bad, a connector
/// T(u, v) clear of the colours of P(u), Q(v) and of M, spliced and shortcut.
/// `g` must be the graph `stage` was prepared from.
RainbowPath rainbow_connect(const ColouredGraph& g, const ExpanderStage& stage, PairOracle& oracle, Vertex x,
                            Vertex y, const AvoidSet& M, const SearchParams& p, std::uint64_t seed,
                            ConnectStats* stats = nullptr);

/// Connectors for the pairs of Z in lexicographic order, each avoiding the
/// vertices and colours already used and the other branch vertices.
SubdivisionCertificate find_rooted_subdivision(const ColouredGraph& g, const std::vector<Vertex>& Z,
                                               const SearchParams& p, std::uint64_t seed);

}  // namespace rainbow
