#pragma once

#include "rainbow/graph.hpp"
#include "rainbow/subdivision.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <vector>

namespace rainbow {

/// Sorted r-set of host vertices.
using RSet = std::vector<Vertex>;

/// A copy of K_{r,r}: every a-b pair is an edge.  Stored with a < b.
struct KrrCopy {
  RSet a;
  RSet b;

  friend bool operator==(const KrrCopy&, const KrrCopy&) = default;
};

inline constexpr int kUnboundedCap = std::numeric_limits<int>::max();

struct KrrOptions {
  int cap = kUnboundedCap;          // copies per (r-set, outside vertex) incidence
  std::int64_t budget = 50'000'000;  // candidate copies examined
  std::uint64_t seed = 0;
  int pool = 0;  // 0: every r-set is a candidate side; else this many sampled r-sets
};

struct KrrCollection {
  int r = 1;
  int cap = kUnboundedCap;
  std::vector<KrrCopy> copies;  // admission order
  std::int64_t examined = 0;
  std::int64_t rejected_by_cap = 0;
  bool budget_exhausted = false;
  int pool_size = 0;  // candidate sides considered
  bool exhaustive = true;
  /// alpha^{r^2} n^r with alpha = e(G) / n^{2-1/r}: the supersaturation size
  /// scale (constant factor omitted), informational only.
  double benchmark = 0;
};

/// Greedy admission: candidate copies in seeded random order, each admitted
/// unless some (A, u) incidence would exceed the cap.  Candidate sides are
/// all r-sets (exhaustive) or a sampled pool; for a side A the other side
/// ranges over r-subsets of the common neighbourhood of A (within the pool
/// when sampling).  Stops, flagged, once `budget` candidates were examined.
KrrCollection build_krr_collection(const Graph& g, int r, const KrrOptions& opt = {});

/// Largest number of admitted copies (A, B) with a fixed side A and a fixed
/// vertex u in B, over both orientations of every copy.
int max_codegree(const KrrCollection& col);

/// One copy per line, "a1 .. ar | b1 .. br".
void write_collection(std::ostream& out, const KrrCollection& col);
KrrCollection parse_collection(std::istream& in);

struct AuxiliaryGraph {
  Graph graph;              // vertex i stands for rsets[i]; edges sorted
  std::vector<RSet> rsets;  // lexicographic
  int universe = 0;         // host vertex count
};

/// Vertices are the r-sets that occur in a copy, in lexicographic order, so
/// for r = 1 vertex i is the i-th non-isolated host vertex.
AuxiliaryGraph auxiliary_graph(const KrrCollection& col, int universe);

struct IntersectionReport {
  int max_count = 0;  // max over (u, v) of #{w ~ v : R_u and R_w meet}
  Vertex u = -1;
  Vertex v = -1;
  double t = 0;
  double margin = 0;  // t - max_count
};

IntersectionReport intersection_relation_check(const AuxiliaryGraph& aux, double t);

struct BlowupOptions {
  KrrOptions collection;
  /// Neighbour bound t for the intersection relation; 0 derives r * cap
  /// (a finite cap forces it) or, with no cap, the observed maximum.
  double t = 0;
  bool check_hom = true;
  std::int64_t hom_budget = 2'000'000;
};

struct BlowupCertificate {
  int r = 1;
  SubdivisionCertificate base;   // over auxiliary vertex ids
  std::map<Vertex, RSet> rsets;  // every auxiliary vertex the base uses
  nlohmann::json params;
  nlohmann::json evidence;
};

/// Collection, auxiliary graph, then the shared subdivision engine with the
/// r-set intersection relation as degeneracy and r-set disjointness for the
/// connectors.  `p.s` is used as given (see desk_blowup_s).
BlowupCertificate find_blowup_subdivision(const Graph& g, int r, int m, const SearchParams& p, std::uint64_t seed,
                                          const BlowupOptions& opt = {});

/// Never throws.  RSetOverlap when two used auxiliary vertices share a host
/// vertex, MissingBicliqueEdge when consecutive r-sets do not span K_{r,r}.
VerifyResult verify_blowup(const Graph& g, const BlowupCertificate& cert);

/// Host edges of the blow-up, u < v, sorted.
std::vector<Edge> expanded_host_edges(const BlowupCertificate& cert);

nlohmann::json to_json(const BlowupCertificate& cert);
BlowupCertificate blowup_from_json(const nlohmann::json& j);

}  // namespace rainbow
