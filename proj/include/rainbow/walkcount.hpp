#pragma once

#include "rainbow/graph.hpp"
#include "rainbow/seed.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rainbow {

using BigInt = boost::multiprecision::cpp_int;
using Walk = std::vector<Vertex>;

double to_double(const BigInt& x);
/// Exact a/b as a double, well defined even when both overflow a double.
double ratio(const BigInt& a, const BigInt& b);

/// hom_{x,y}(P_k) for every ordered pair; hom_{x,y}(C_2k) is its square.
class WalkTable {
 public:
  WalkTable(int n, int k, std::vector<BigInt> paths) : n_(n), k_(k), paths_(std::move(paths)) {}

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  const BigInt& paths(Vertex x, Vertex y) const { return paths_[index(x, y)]; }
  BigInt cycles(Vertex x, Vertex y) const { return paths(x, y) * paths(x, y); }
  /// hom(P_k) and hom(C_2k) summed over all ordered pairs.
  BigInt total_paths() const;
  BigInt total_cycles() const;

 private:
  int n_;
  int k_;
  std::vector<BigInt> paths_;
  std::size_t index(Vertex x, Vertex y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(y);
  }
};

WalkTable count_paths(const Graph& g, int k);

/// counts[j][v] = number of walks of length j from v to `target`, j = 0..k.
std::vector<std::vector<BigInt>> walks_to(const Graph& g, Vertex target, int k);

/// Which closed walks count as degenerate.  A closed 2k-walk is degenerate
/// when two of its positions clash under any enabled test:
///   * distinct_vertices: the same vertex appears twice;
///   * edge_colours: two edges share a colour (indexed by edge id);
///   * rsets: the r-sets of two vertices intersect (r-sets indexed by vertex).
/// With nothing enabled no walk is degenerate.
struct ClosedWalkRule {
  bool distinct_vertices = false;
  const std::vector<Colour>* edge_colours = nullptr;
  const std::vector<std::vector<Vertex>>* rsets = nullptr;
  int rset_universe = 0;  // host vertex count behind the r-sets
};

/// Repeated vertex or repeated colour: the walks that are not rainbow cycles.
ClosedWalkRule rainbow_rule(const ColouredGraph& g);
ClosedWalkRule vertex_rule();
ClosedWalkRule colour_rule(const ColouredGraph& g);
ClosedWalkRule rset_rule(const std::vector<std::vector<Vertex>>& rsets, int universe);

/// `closed` lists w_0..w_{2k} with w_{2k} = w_0.
bool is_degenerate(const Graph& g, const ClosedWalkRule& rule, std::span<const Vertex> closed);

enum class StatsMode { Exact, MonteCarlo };

struct DegenerateStats {
  StatsMode mode = StatsMode::Exact;
  BigInt hom;           // hom_{x,y}(C_2k)
  BigInt degenerate;    // exact mode only
  double fraction = 0;  // degenerate / hom (or its estimate)
  double ci_low = 0;
  double ci_high = 0;
  std::int64_t samples = 0;
  std::int64_t degenerate_samples = 0;
  std::int64_t visited = 0;  // exact mode: enumerated prefixes
};

inline constexpr std::int64_t kDefaultEnumerationBudget = 10'000'000;

/// Exhaustive count of degenerate closed 2k-walks with x at step 0 and y at
/// step k.  Throws BudgetExceeded past `budget` visited prefixes.
DegenerateStats count_degenerate_exact(const Graph& g, const ClosedWalkRule& rule, Vertex x, Vertex y, int k,
                                       std::int64_t budget = kDefaultEnumerationBudget);
DegenerateStats count_degenerate_exact(const ColouredGraph& g, Vertex x, Vertex y, int k,
                                       std::int64_t budget = kDefaultEnumerationBudget);

/// Number of closed 2k-walks (any start) that are not degenerate.
BigInt count_clean_closed_walks(const Graph& g, const ClosedWalkRule& rule, int k,
                                std::int64_t budget = kDefaultEnumerationBudget);

/// Exact uniform sampler over walks of length k ending at a fixed target.
class WalkSampler {
 public:
  WalkSampler(const Graph& g, Vertex target, int k);
  const BigInt& count_from(Vertex x) const { return counts_[static_cast<std::size_t>(k_)][static_cast<std::size_t>(x)]; }
  /// Throws NoWalk when no walk from x reaches the target in k steps.
  Walk sample(Vertex x, Rng& rng) const;

 private:
  const Graph* g_;
  Vertex target_;
  int k_;
  std::vector<std::vector<BigInt>> counts_;
  std::vector<std::vector<std::uint64_t>> small_;  // same table when it fits in 62 bits
};

Walk sample_uniform_walk(const Graph& g, Vertex x, Vertex y, int k, std::uint64_t seed);

/// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t n);

DegenerateStats estimate_degenerate(const Graph& g, const ClosedWalkRule& rule, Vertex x, Vertex y, int k,
                                    std::int64_t samples, std::uint64_t seed);
DegenerateStats estimate_degenerate(const ColouredGraph& g, Vertex x, Vertex y, int k, std::int64_t samples,
                                    std::uint64_t seed);

enum class Verdict { Good, Bad, Unknown };
enum class PairMode { Exact, MonteCarlo, Auto };

const char* to_string(Verdict v);

struct PairOptions {
  PairMode mode = PairMode::Auto;
  std::int64_t budget = 200'000;  // exact prefixes before Auto falls back to sampling
  std::int64_t samples = 400;
  std::uint64_t seed = 0;
};

/// Good when the degenerate share of hom_{x,y}(C_2k) is at most 1/s^2.  A
/// pair with no closed walks at all is Bad.  A Monte-Carlo interval that
/// straddles the threshold is Unknown.
Verdict classify_pair(const Graph& g, const ClosedWalkRule& rule, Vertex x, Vertex y, int k, int s,
                      const PairOptions& opt, DegenerateStats* stats = nullptr);

struct GoodPairReport {
  int k = 0;
  int s = 0;
  std::vector<Vertex> side;                // the vertices of X, ascending
  std::vector<Verdict> verdicts;           // side.size()^2, row-major over (x, y)
  std::vector<double> fractions;           // degenerate fraction per pair
  int good = 0;
  int bad = 0;
  int unknown = 0;
  Rational fraction_bad;                   // bad / pairs

  Verdict verdict(std::size_t i, std::size_t j) const { return verdicts[i * side.size() + j]; }
};

/// Classifies every ordered pair of X (diagonal included).  Pairs are
/// symmetric, so each unordered pair is evaluated once.
GoodPairReport good_pairs(const Graph& g, const ClosedWalkRule& rule, const Bipartition& bip, int k, int s,
                          const PairOptions& opt);
GoodPairReport good_pairs(const ColouredGraph& g, const Bipartition& bip, int k, int s, const PairOptions& opt);

enum class Relation { EdgeColour, VertexEquality, RSetIntersection, Nothing };

struct JanzerReport {
  int k = 0;
  int t = 1;
  BigInt hom;   // hom(C_2k)
  BigInt lhs;   // closed walks containing a related pair
  double rhs = 0;
  double margin = 0;
};

/// Right-hand side 32 k^{3/2} t^{1/2} Delta^{1/2} n^{1/(2k)} hom^{1-1/(2k)}.
double janzer_bound(int k, int t, int max_degree, int n, const BigInt& hom);

/// Throws BoundViolated if the count exceeds the bound.
JanzerReport janzer_inequality_check(const Graph& g, const ClosedWalkRule& related, int k, int t,
                                     std::int64_t budget = 50'000'000);
JanzerReport janzer_inequality_check(const ColouredGraph& g, int k, Relation relation,
                                     std::int64_t budget = 50'000'000);

struct RhoReport {
  BigInt rho_min;
  BigInt rho_max;
  double ratio = 0;  // +inf when rho_min = 0
  bool certified_regime = false;
  std::optional<double> bound;  // 2^12 mu^4, when asserted
};

/// Certified-regime inputs: the expansion parameter and mu = Delta / d of an
/// exactly certified expander.
struct CertifiedExpanderInfo {
  double eta = 0;
  double mu = 1;
};

RhoReport rho_ratio(const Graph& g, const Bipartition& bip, int k,
                    std::optional<CertifiedExpanderInfo> certified = std::nullopt);

struct DegenerateBoundReport {
  BigInt hom;
  BigInt hom_star;
  double target = 1;  // S
  double margin = 0;  // hom / S - hom*
  double required_degree = 0;  // 2^14 k^3 S^2 mu n^{1/k}
  bool precondition_met = false;
};

/// Aggregate hom* against hom / S.  With `relaxed` unset a failing degree
/// hypothesis (d, mu) throws PreconditionViolated; otherwise both sides are
/// only reported.
DegenerateBoundReport degenerate_fraction_bound_check(const ColouredGraph& g, int k, double target, double d,
                                                      double mu, bool relaxed,
                                                      std::int64_t budget = 50'000'000);
/// Same check for any degeneracy rule (hom** for the r-set relation).
DegenerateBoundReport degenerate_fraction_bound_check(const Graph& g, const ClosedWalkRule& rule, int k,
                                                      double target, double d, double mu, bool relaxed,
                                                      std::int64_t budget = 50'000'000);

/// Both sides of hom(C_2k) = 2 * sum_{x,y in X} hom_{x,y}(C_2k).  The
/// identity holds for even k only: for odd k the midpoint of a walk from X
/// lies in Y and the right-hand side vanishes.
std::pair<BigInt, BigInt> bipartite_hom_identity(const WalkTable& table, const Bipartition& bip);

}  // namespace rainbow
