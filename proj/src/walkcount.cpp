#include "rainbow/walkcount.hpp"

#include "rainbow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace rainbow {

double to_double(const BigInt& x) { return x.convert_to<double>(); }

double ratio(const BigInt& a, const BigInt& b) {
  if (b == 0) return a == 0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
  const std::size_t bits = std::max(a == 0 ? 0 : msb(a), msb(b));
  if (bits < 1000) return to_double(a) / to_double(b);
  const unsigned shift = static_cast<unsigned>(bits - 1000);
  return to_double(a >> shift) / to_double(b >> shift);
}

BigInt WalkTable::total_paths() const {
  BigInt t = 0;
  for (const auto& p : paths_) t += p;
  return t;
}

BigInt WalkTable::total_cycles() const {
  BigInt t = 0;
  for (const auto& p : paths_) t += p * p;
  return t;
}

namespace {

void require_k(int k) {
  if (k < 1) throw Error(ErrorKind::PreconditionViolated, "walk length must be at least 1");
}

void require_vertex(const Graph& g, Vertex v) {
  if (!g.valid(v)) throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(v) + " out of range");
}

// True when Delta^k stays below 2^62, so fixed-width counting is exact.
bool fits_small(const Graph& g, int k) {
  const double bits = k * std::log2(std::max(1, g.max_degree()));
  return bits < 62.0;
}

// One step of row propagation: next[v] = sum over neighbours u of cur[u].
template <typename T>
void step(const Graph& g, const std::vector<T>& cur, std::vector<T>& next) {
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    T s = 0;
    for (Vertex u : g.neighbours(v)) s += cur[static_cast<std::size_t>(u)];
    next[static_cast<std::size_t>(v)] = s;
  }
}

template <typename T>
std::vector<std::vector<T>> walk_levels(const Graph& g, Vertex target, int k) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<std::vector<T>> levels(static_cast<std::size_t>(k) + 1, std::vector<T>(n, 0));
  levels[0][static_cast<std::size_t>(target)] = 1;
  for (int j = 1; j <= k; ++j) step(g, levels[static_cast<std::size_t>(j) - 1], levels[static_cast<std::size_t>(j)]);
  return levels;
}

std::vector<int> bfs_distances(const Graph& g, Vertex s) {
  std::vector<int> dist(static_cast<std::size_t>(g.num_vertices()), std::numeric_limits<int>::max() / 2);
  std::queue<Vertex> q;
  dist[static_cast<std::size_t>(s)] = 0;
  q.push(s);
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop();
    for (Vertex w : g.neighbours(v))
      if (dist[static_cast<std::size_t>(w)] > dist[static_cast<std::size_t>(v)] + 1) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        q.push(w);
      }
  }
  return dist;
}

// Depth-first enumeration of closed 2k-walks with no clashing positions.
class CleanWalkCounter {
 public:
  CleanWalkCounter(const Graph& g, const ClosedWalkRule& rule, int k, std::int64_t budget)
      : g_(g), rule_(rule), k_(k), budget_(budget) {
    vertex_used_.assign(static_cast<std::size_t>(g.num_vertices()), 0);
    if (rule.edge_colours) {
      int top = 0;
      for (Colour c : *rule.edge_colours) top = std::max(top, c + 1);
      colour_used_.assign(static_cast<std::size_t>(top), 0);
    }
    if (rule.rsets) host_used_.assign(static_cast<std::size_t>(rule.rset_universe), 0);
  }

  // Walks with x at step 0 and, when `mid` is set, mid at step k.
  std::int64_t count(Vertex x, std::optional<Vertex> mid) {
    x_ = x;
    mid_ = mid;
    dist_x_ = bfs_distances(g_, x);
    if (mid) dist_mid_ = bfs_distances(g_, *mid);
    if (!take_vertex(x)) return 0;
    std::int64_t c = extend(x, 0);
    release_vertex(x);
    return c;
  }

  std::int64_t visited() const { return visited_; }

 private:
  const Graph& g_;
  const ClosedWalkRule& rule_;
  int k_;
  std::int64_t budget_;
  std::int64_t visited_ = 0;
  Vertex x_ = 0;
  std::optional<Vertex> mid_;
  std::vector<int> dist_x_, dist_mid_;
  std::vector<char> vertex_used_, colour_used_, host_used_;

  bool take_vertex(Vertex w) {
    if (rule_.distinct_vertices && vertex_used_[static_cast<std::size_t>(w)]) return false;
    if (rule_.rsets) {
      const auto& rs = (*rule_.rsets)[static_cast<std::size_t>(w)];
      for (Vertex h : rs)
        if (host_used_[static_cast<std::size_t>(h)]) return false;
      for (Vertex h : rs) host_used_[static_cast<std::size_t>(h)] = 1;
    }
    vertex_used_[static_cast<std::size_t>(w)] = 1;
    return true;
  }

  void release_vertex(Vertex w) {
    vertex_used_[static_cast<std::size_t>(w)] = 0;
    if (rule_.rsets)
      for (Vertex h : (*rule_.rsets)[static_cast<std::size_t>(w)]) host_used_[static_cast<std::size_t>(h)] = 0;
  }

  std::int64_t extend(Vertex cur, int pos) {
    if (pos == 2 * k_) return 1;
    if (++visited_ > budget_)
      throw Error(ErrorKind::BudgetExceeded, "closed-walk enumeration exceeded " + std::to_string(budget_) + " prefixes");
    const int next = pos + 1;
    std::int64_t total = 0;
    auto nb = g_.neighbours(cur);
    auto inc = g_.incident(cur);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const Vertex w = nb[i];
      if (next == 2 * k_) {
        if (w != x_) continue;
      } else if (mid_ && next <= k_) {
        if (next == k_ ? w != *mid_ : dist_mid_[static_cast<std::size_t>(w)] > k_ - next) continue;
      } else if (dist_x_[static_cast<std::size_t>(w)] > 2 * k_ - next) {
        continue;
      }
      Colour c = -1;
      if (rule_.edge_colours) {
        c = (*rule_.edge_colours)[static_cast<std::size_t>(inc[i])];
        if (colour_used_[static_cast<std::size_t>(c)]) continue;
      }
      const bool closing = next == 2 * k_;
      if (!closing && !take_vertex(w)) continue;
      if (c >= 0) colour_used_[static_cast<std::size_t>(c)] = 1;
      total += extend(w, next);
      if (c >= 0) colour_used_[static_cast<std::size_t>(c)] = 0;
      if (!closing) release_vertex(w);
    }
    return total;
  }
};

BigInt random_below(const BigInt& bound, Rng& rng) {
  const std::size_t bits = msb(bound) + 1;
  for (;;) {
    BigInt r = 0;
    for (std::size_t got = 0; got < bits; got += 64) r = (r << 64) | BigInt(rng());
    r &= (BigInt(1) << bits) - 1;
    if (r < bound) return r;
  }
}

bool any_rule(const ClosedWalkRule& r) { return r.distinct_vertices || r.edge_colours || r.rsets; }

}  // namespace

WalkTable count_paths(const Graph& g, int k) {
  require_k(k);
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<BigInt> out(n * n);
  if (fits_small(g, k)) {
    std::vector<std::uint64_t> cur(n), next(n);
    for (std::size_t x = 0; x < n; ++x) {
      std::fill(cur.begin(), cur.end(), 0);
      cur[x] = 1;
      for (int j = 0; j < k; ++j) {
        step(g, cur, next);
        cur.swap(next);
      }
      for (std::size_t y = 0; y < n; ++y) out[x * n + y] = cur[y];
    }
  } else {
    std::vector<BigInt> cur(n), next(n);
    for (std::size_t x = 0; x < n; ++x) {
      std::fill(cur.begin(), cur.end(), 0);
      cur[x] = 1;
      for (int j = 0; j < k; ++j) {
        step(g, cur, next);
        cur.swap(next);
      }
      for (std::size_t y = 0; y < n; ++y) out[x * n + y] = cur[y];
    }
  }
  return WalkTable(g.num_vertices(), k, std::move(out));
}

std::vector<std::vector<BigInt>> walks_to(const Graph& g, Vertex target, int k) {
  require_vertex(g, target);
  if (k < 0) throw Error(ErrorKind::PreconditionViolated, "walk length must be non-negative");
  return walk_levels<BigInt>(g, target, k);
}

ClosedWalkRule rainbow_rule(const ColouredGraph& g) {
  ClosedWalkRule r;
  r.distinct_vertices = true;
  r.edge_colours = &g.colours();
  return r;
}

ClosedWalkRule vertex_rule() {
  ClosedWalkRule r;
  r.distinct_vertices = true;
  return r;
}

ClosedWalkRule colour_rule(const ColouredGraph& g) {
  ClosedWalkRule r;
  r.edge_colours = &g.colours();
  return r;
}

ClosedWalkRule rset_rule(const std::vector<std::vector<Vertex>>& rsets, int universe) {
  ClosedWalkRule r;
  r.rsets = &rsets;
  r.rset_universe = universe;
  return r;
}

bool is_degenerate(const Graph& g, const ClosedWalkRule& rule, std::span<const Vertex> closed) {
  if (closed.size() < 2 || closed.front() != closed.back())
    throw Error(ErrorKind::PreconditionViolated, "closed walk must start and end at the same vertex");
  const std::size_t len = closed.size() - 1;
  if (rule.distinct_vertices || rule.rsets) {
    std::vector<Vertex> seen;
    std::vector<Vertex> hosts;
    for (std::size_t i = 0; i < len; ++i) {
      if (rule.distinct_vertices) seen.push_back(closed[i]);
      if (rule.rsets)
        for (Vertex h : (*rule.rsets)[static_cast<std::size_t>(closed[i])]) hosts.push_back(h);
    }
    for (auto* list : {&seen, &hosts}) {
      std::sort(list->begin(), list->end());
      if (std::adjacent_find(list->begin(), list->end()) != list->end()) return true;
    }
  }
  if (rule.edge_colours) {
    std::vector<Colour> cs;
    for (std::size_t i = 0; i < len; ++i) {
      auto e = g.find_edge(closed[i], closed[i + 1]);
      if (!e) throw Error(ErrorKind::PreconditionViolated, "walk uses a non-edge");
      cs.push_back((*rule.edge_colours)[static_cast<std::size_t>(*e)]);
    }
    std::sort(cs.begin(), cs.end());
    if (std::adjacent_find(cs.begin(), cs.end()) != cs.end()) return true;
  }
  return false;
}

DegenerateStats count_degenerate_exact(const Graph& g, const ClosedWalkRule& rule, Vertex x, Vertex y, int k,
                                       std::int64_t budget) {
  require_k(k);
  require_vertex(g, x);
  require_vertex(g, y);
  DegenerateStats st;
  st.mode = StatsMode::Exact;
  const BigInt p = walks_to(g, y, k)[static_cast<std::size_t>(k)][static_cast<std::size_t>(x)];
  st.hom = p * p;
  BigInt clean = st.hom;
  if (any_rule(rule)) {
    CleanWalkCounter counter(g, rule, k, budget);
    clean = counter.count(x, y);
    st.visited = counter.visited();
  }
  st.degenerate = st.hom - clean;
  st.fraction = st.hom == 0 ? 0.0 : ratio(st.degenerate, st.hom);
  st.ci_low = st.ci_high = st.fraction;
  return st;
}

DegenerateStats count_degenerate_exact(const ColouredGraph& g, Vertex x, Vertex y, int k, std::int64_t budget) {
  return count_degenerate_exact(g.graph(), rainbow_rule(g), x, y, k, budget);
}

BigInt count_clean_closed_walks(const Graph& g, const ClosedWalkRule& rule, int k, std::int64_t budget) {
  require_k(k);
  if (!any_rule(rule)) return count_paths(g, k).total_cycles();
  CleanWalkCounter counter(g, rule, k, budget);
  BigInt total = 0;
  for (Vertex x = 0; x < g.num_vertices(); ++x) total += counter.count(x, std::nullopt);
  return total;
}

WalkSampler::WalkSampler(const Graph& g, Vertex target, int k) : g_(&g), target_(target), k_(k) {
  require_k(k);
  require_vertex(g, target);
  if (fits_small(g, k))
    small_ = walk_levels<std::uint64_t>(g, target, k);
  counts_ = walk_levels<BigInt>(g, target, k);
}

Walk WalkSampler::sample(Vertex x, Rng& rng) const {
  require_vertex(*g_, x);
  if (count_from(x) == 0)
    throw Error(ErrorKind::NoWalk, "no walk of length " + std::to_string(k_) + " from " + std::to_string(x) +
                                       " to " + std::to_string(target_));
  Walk w{x};
  Vertex cur = x;
  for (int i = 0; i < k_; ++i) {
    const auto rem = static_cast<std::size_t>(k_ - i);
    auto nb = g_->neighbours(cur);
    Vertex chosen = -1;
    if (!small_.empty()) {
      std::uint64_t r = uniform_below(rng, small_[rem][static_cast<std::size_t>(cur)]);
      for (Vertex u : nb) {
        const std::uint64_t wgt = small_[rem - 1][static_cast<std::size_t>(u)];
        if (r < wgt) {
          chosen = u;
          break;
        }
        r -= wgt;
      }
    } else {
      BigInt r = random_below(counts_[rem][static_cast<std::size_t>(cur)], rng);
      for (Vertex u : nb) {
        const BigInt& wgt = counts_[rem - 1][static_cast<std::size_t>(u)];
        if (r < wgt) {
          chosen = u;
          break;
        }
        r -= wgt;
      }
    }
    cur = chosen;
    w.push_back(cur);
  }
  return w;
}

Walk sample_uniform_walk(const Graph& g, Vertex x, Vertex y, int k, std::uint64_t seed) {
  WalkSampler sampler(g, y, k);
  Rng rng(seed);
  return sampler.sample(x, rng);
}

std::pair<double, double> wilson_interval(std::int64_t hits, std::int64_t n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

DegenerateStats estimate_degenerate(const Graph& g, const ClosedWalkRule& rule, Vertex x, Vertex y, int k,
                                    std::int64_t samples, std::uint64_t seed) {
  require_vertex(g, x);
  WalkSampler sampler(g, y, k);
  DegenerateStats st;
  st.mode = StatsMode::MonteCarlo;
  st.hom = sampler.count_from(x) * sampler.count_from(x);
  Rng rng(seed);
  Walk closed;
  for (std::int64_t i = 0; i < samples; ++i) {
    Walk p = sampler.sample(x, rng);
    Walk q = sampler.sample(x, rng);
    closed = p;
    for (auto it = q.rbegin() + 1; it != q.rend(); ++it) closed.push_back(*it);
    if (is_degenerate(g, rule, closed)) ++st.degenerate_samples;
  }
  st.samples = samples;
  st.fraction = samples ? static_cast<double>(st.degenerate_samples) / static_cast<double>(samples) : 0.0;
  std::tie(st.ci_low, st.ci_high) = wilson_interval(st.degenerate_samples, samples);
  return st;
}

DegenerateStats estimate_degenerate(const ColouredGraph& g, Vertex x, Vertex y, int k, std::int64_t samples,
                                    std::uint64_t seed) {
  return estimate_degenerate(g.graph(), rainbow_rule(g), x, y, k, samples, seed);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Good: return "good";
    case Verdict::Bad: return "bad";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

Verdict classify_pair(const Graph& g, const ClosedWalkRule& rule, Vertex x, Vertex y, int k, int s,
                      const PairOptions& opt, DegenerateStats* stats) {
  if (s < 1) throw Error(ErrorKind::PreconditionViolated, "s must be positive");
  DegenerateStats st;
  bool exact = opt.mode != PairMode::MonteCarlo;
  if (exact) {
    try {
      st = count_degenerate_exact(g, rule, x, y, k, opt.budget);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BudgetExceeded || opt.mode == PairMode::Exact) throw;
      exact = false;
    }
  }
  Verdict v;
  if (exact) {
    const BigInt s2 = BigInt(s) * s;
    v = (st.hom > 0 && st.degenerate * s2 <= st.hom) ? Verdict::Good : Verdict::Bad;
  } else {
    WalkSampler probe(g, y, k);
    if (probe.count_from(x) == 0) {
      st = DegenerateStats{};
      st.mode = StatsMode::MonteCarlo;
      v = Verdict::Bad;
    } else {
      st = estimate_degenerate(g, rule, x, y, k, opt.samples,
                               derive_seed(opt.seed, "pair", {static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(y)}));
      const double thr = 1.0 / (static_cast<double>(s) * s);
      v = st.ci_high < thr ? Verdict::Good : st.ci_low > thr ? Verdict::Bad : Verdict::Unknown;
    }
  }
  if (stats) *stats = std::move(st);
  return v;
}

GoodPairReport good_pairs(const Graph& g, const ClosedWalkRule& rule, const Bipartition& bip, int k, int s,
                          const PairOptions& opt) {
  if (!two_colouring(g)) throw Error(ErrorKind::PreconditionViolated, "good pairs need a bipartite graph");
  if (k % 2) throw Error(ErrorKind::PreconditionViolated, "good pairs need even k");
  GoodPairReport rep;
  rep.k = k;
  rep.s = s;
  rep.side = bip.x;
  const std::size_t m = rep.side.size();
  rep.verdicts.assign(m * m, Verdict::Unknown);
  rep.fractions.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      DegenerateStats st;
      const Verdict v = classify_pair(g, rule, rep.side[i], rep.side[j], k, s, opt, &st);
      for (auto idx : {i * m + j, j * m + i}) {
        rep.verdicts[idx] = v;
        rep.fractions[idx] = st.fraction;
      }
    }
  for (Verdict v : rep.verdicts) {
    if (v == Verdict::Good) ++rep.good;
    else if (v == Verdict::Bad) ++rep.bad;
    else ++rep.unknown;
  }
  rep.fraction_bad = m ? Rational(rep.bad, static_cast<std::int64_t>(m * m)) : Rational(0);
  return rep;
}

GoodPairReport good_pairs(const ColouredGraph& g, const Bipartition& bip, int k, int s, const PairOptions& opt) {
  return good_pairs(g.graph(), rainbow_rule(g), bip, k, s, opt);
}

double janzer_bound(int k, int t, int max_degree, int n, const BigInt& hom) {
  if (hom == 0) return 0.0;
  const double kk = k;
  const double log_hom = std::log(to_double(hom));
  return 32.0 * std::pow(kk, 1.5) * std::sqrt(static_cast<double>(t)) * std::sqrt(static_cast<double>(max_degree)) *
         std::pow(static_cast<double>(n), 1.0 / (2 * kk)) * std::exp((1.0 - 1.0 / (2 * kk)) * log_hom);
}

JanzerReport janzer_inequality_check(const Graph& g, const ClosedWalkRule& related, int k, int t,
                                     std::int64_t budget) {
  if (k < 2) throw Error(ErrorKind::PreconditionViolated, "the closed-walk counting bound needs k >= 2");
  JanzerReport rep;
  rep.k = k;
  rep.t = t;
  rep.hom = count_paths(g, k).total_cycles();
  rep.lhs = rep.hom - count_clean_closed_walks(g, related, k, budget);
  rep.rhs = janzer_bound(k, t, g.max_degree(), g.num_vertices(), rep.hom);
  rep.margin = rep.rhs - to_double(rep.lhs);
  if (rep.margin < 0)
    throw Error(ErrorKind::BoundViolated, "closed walks with a related pair exceed the counting bound by " +
                                              std::to_string(-rep.margin));
  return rep;
}

JanzerReport janzer_inequality_check(const ColouredGraph& g, int k, Relation relation, std::int64_t budget) {
  switch (relation) {
    case Relation::EdgeColour: return janzer_inequality_check(g.graph(), colour_rule(g), k, 1, budget);
    case Relation::VertexEquality: return janzer_inequality_check(g.graph(), vertex_rule(), k, 1, budget);
    case Relation::Nothing: return janzer_inequality_check(g.graph(), ClosedWalkRule{}, k, 1, budget);
    case Relation::RSetIntersection: break;
  }
  throw Error(ErrorKind::PreconditionViolated, "r-set relations need the auxiliary r-sets");
}

RhoReport rho_ratio(const Graph& g, const Bipartition& bip, int k, std::optional<CertifiedExpanderInfo> certified) {
  if (k % 2) throw Error(ErrorKind::PreconditionViolated, "rho ratio needs even k");
  if (bip.x.empty()) throw Error(ErrorKind::PreconditionViolated, "empty side");
  const WalkTable table = count_paths(g, k);
  RhoReport rep;
  bool first = true;
  for (Vertex x : bip.x)
    for (Vertex y : bip.x) {
      BigInt c = table.cycles(x, y);
      if (first || c < rep.rho_min) rep.rho_min = c;
      if (first || c > rep.rho_max) rep.rho_max = c;
      first = false;
    }
  rep.ratio = rep.rho_min == 0 ? std::numeric_limits<double>::infinity() : ratio(rep.rho_max, rep.rho_min);
  if (certified) {
    const double needed = std::ceil(512.0 * std::log2(static_cast<double>(g.num_vertices())) /
                                    (certified->eta * certified->eta));
    if (k >= needed) {
      rep.certified_regime = true;
      rep.bound = 4096.0 * std::pow(certified->mu, 4);
      if (rep.ratio > *rep.bound)
        throw Error(ErrorKind::BoundViolated, "rho ratio " + std::to_string(rep.ratio) + " exceeds " +
                                                  std::to_string(*rep.bound));
    }
  }
  return rep;
}

DegenerateBoundReport degenerate_fraction_bound_check(const Graph& h, const ClosedWalkRule& rule, int k,
                                                      double target, double d, double mu, bool relaxed,
                                                      std::int64_t budget) {
  require_k(k);
  DegenerateBoundReport rep;
  rep.target = target;
  const double n = h.num_vertices();
  rep.required_degree = 16384.0 * std::pow(k, 3) * target * target * mu * std::pow(n, 1.0 / k);
  rep.precondition_met = h.min_degree() >= d / 2 && h.max_degree() <= mu * d && d >= rep.required_degree;
  if (!rep.precondition_met && !relaxed)
    throw Error(ErrorKind::PreconditionViolated,
                "degree hypothesis fails: need d >= " + std::to_string(rep.required_degree) +
                    ", min degree >= d/2 and max degree <= mu d");
  rep.hom = count_paths(h, k).total_cycles();
  rep.hom_star = rep.hom - count_clean_closed_walks(h, rule, k, budget);
  rep.margin = to_double(rep.hom) / target - to_double(rep.hom_star);
  return rep;
}

DegenerateBoundReport degenerate_fraction_bound_check(const ColouredGraph& g, int k, double target, double d,
                                                      double mu, bool relaxed, std::int64_t budget) {
  return degenerate_fraction_bound_check(g.graph(), rainbow_rule(g), k, target, d, mu, relaxed, budget);
}

std::pair<BigInt, BigInt> bipartite_hom_identity(const WalkTable& table, const Bipartition& bip) {
  BigInt side = 0;
  for (Vertex x : bip.x)
    for (Vertex y : bip.x) side += table.cycles(x, y);
  return {table.total_cycles(), 2 * side};
}

}  // namespace rainbow
