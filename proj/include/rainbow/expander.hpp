#pragma once

#include "rainbow/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rainbow {

/// (d, eta, eps): every S with |S| <= (1 - eps) n has d(S) <= (1 - eta) d,
/// on top of d-minimality.
struct ExpanderParams {
  Rational d{1};
  double eta = 0.1;
  double eps = 0.5;

  /// Throws PreconditionViolated unless 0 < eta < 1, 0 < eps <= 1/2, d >= 1.
  void validate() const;
};

enum class Evidence { ExactSubsetCheck, ConductanceSufficient, HeuristicNoViolationFound };
const char* to_string(Evidence e);

enum class Violation { None, AverageDegree, Minimality, Expansion };
const char* to_string(Violation v);

struct ExpanderCertificate {
  ExpanderParams params;
  Evidence evidence = Evidence::ExactSubsetCheck;
  bool passed = false;
  std::int64_t checked_subsets = 0;
  std::optional<double> lambda2;          // when the spectral route was used
  std::optional<double> conductance_lower;
  /// A genuinely violating set (vertex ids of the checked graph): for
  /// Minimality a proper subset T with d(T) >= d, for Expansion a small S
  /// with d(S) > (1 - eta) d, for AverageDegree the whole vertex set.
  std::optional<std::vector<Vertex>> witness_violation;
  Violation violation = Violation::None;
  /// Paper thresholds that were bypassed under the relaxed flag.
  std::vector<std::string> bypasses;
};

inline constexpr int kExactSubsetMaxN = 18;

/// Greedy single-vertex peel (lowest index first) while e(G - v) >= d(n-1)/2,
/// moving to the densest component when the graph falls apart.  Up to
/// `exact_max_n` vertices the smallest subset of average degree >= d is
/// taken, which is d-minimal by construction.
Graph extract_d_minimal(const Graph& g, const Rational& d, int exact_max_n = kExactSubsetMaxN);

/// delta(g) >= d / 2, the cheap consequence of d-minimality.
bool min_degree_of_minimal(const Graph& g, const Rational& d);

ExpanderCertificate verify_expander(const Graph& g, const ExpanderParams& p, int exact_max_n = kExactSubsetMaxN);

struct EdgeExpansionReport {
  double min_slack = 0;  // min over S of e(S, S^c) - (eta d / 2)|S|
  std::vector<Vertex> tightest;
  std::int64_t checked = 0;
  bool exhaustive = false;
};

/// Throws ViolationFound when some S with |S| <= (1 - eps) n has
/// e(S, S^c) < (eta d / 2)|S|.  Exhaustive up to `exact_max_n` vertices,
/// sweep and peeling candidates above.
EdgeExpansionReport edge_expansion_check(const Graph& g, const ExpanderParams& p,
                                         int exact_max_n = kExactSubsetMaxN);

struct ExtractedExpander {
  Graph graph;  // labels point into the input graph's label space
  ExpanderCertificate certificate;
  int rounds = 0;
  bool exact_search = true;  // every violation search was exhaustive
};

struct ExtractOptions {
  int exact_max_n = kExactSubsetMaxN;
  std::uint64_t seed = 0;
};

/// Density-increment loop with eta = eps / (2 log n): take a d(H)-minimal
/// subgraph, look for a small dense set, recurse into it, until none is found.
ExtractedExpander extract_expander(const Graph& g, double eps, const ExtractOptions& opt = {});

/// Looks for S with |S| <= (1 - eps) n and 2 e(S) > (1 - eta) d |S|.  Exact
/// (densest such S, then smallest, then lowest bitmask) up to `exact_max_n`
/// vertices; otherwise the first hit among eigenvector sweeps and greedy
/// peeling.
std::optional<std::vector<Vertex>> find_dense_small_set(const Graph& g, const ExpanderParams& p,
                                                        int exact_max_n = kExactSubsetMaxN,
                                                        std::uint64_t seed = 0);

/// Spanning subgraph with maximum degree <= cap: repeatedly drop the edge from
/// the highest-degree vertex (lowest index) to its highest-degree neighbour.
Graph cap_max_degree(const Graph& g, int cap);

struct RegularizeResult {
  Graph graph;
  int attempts = 0;      // sampling rounds used (0 when no sampling was needed)
  int bucket = 0;        // dyadic degree class i of the chosen B-bucket
  bool sampled = false;  // the random A-subsample branch was taken
  std::vector<std::string> bypasses;
};

/// Bounded-degree subgraph of a bipartite graph with delta >= d: output has
/// max degree <= d and average degree >= d / (12 log n).  Isolated vertices
/// are dropped from the output.
RegularizeResult regularize_bipartite(const Graph& g, int d, std::uint64_t seed, bool relaxed = false);

struct AlmostRegularStep {
  int n = 0;
  double d = 0;
  int capped_n = 0;
  double capped_d = 0;
  int capped_max_degree = 0;
  bool used_regularization = false;
  int expander_n = 0;
  double expander_d = 0;
};

struct AlmostRegularResult {
  Graph graph;
  ExpanderCertificate certificate;
  double mu = 0;  // max degree / average degree
  int iterations = 0;
  std::vector<AlmostRegularStep> trace;
  bool degree_floor_holds = false;   // d' >= d / (2500 log^2 n)
  bool degree_ratio_holds = false;   // Delta <= 2500 log^2 n' d'
  std::vector<std::string> bypasses;
};

struct AlmostRegularOptions {
  bool relaxed = false;
  std::uint64_t seed = 0;
  int exact_max_n = kExactSubsetMaxN;
};

/// Alternates degree bounding and expander extraction until the stopping rule
/// 48 log n_l >= sqrt(48 log n_{l-1}) fires.
AlmostRegularResult almost_regular_expander(const Graph& g, double eps, const AlmostRegularOptions& opt = {});

/// log base 2, clamped so that log of 0 or 1 vertices is 1.
double log2n(int n);

}  // namespace rainbow
