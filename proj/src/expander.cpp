#include "rainbow/expander.hpp"

#include "rainbow/error.hpp"
#include "rainbow/seed.hpp"
#include "rainbow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace rainbow {

double log2n(int n) { return std::max(1.0, std::log2(static_cast<double>(std::max(n, 1)))); }

void ExpanderParams::validate() const {
  if (!(eta > 0 && eta < 1)) throw Error(ErrorKind::PreconditionViolated, "eta must lie in (0, 1)");
  if (!(eps > 0 && eps <= 0.5)) throw Error(ErrorKind::PreconditionViolated, "eps must lie in (0, 1/2]");
  if (d < Rational(1)) throw Error(ErrorKind::PreconditionViolated, "d must be at least 1");
}

const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::ExactSubsetCheck: return "ExactSubsetCheck";
    case Evidence::ConductanceSufficient: return "ConductanceSufficient";
    case Evidence::HeuristicNoViolationFound: return "HeuristicNoViolationFound";
  }
  return "?";
}

const char* to_string(Violation v) {
  switch (v) {
    case Violation::None: return "none";
    case Violation::AverageDegree: return "average-degree";
    case Violation::Minimality: return "minimality";
    case Violation::Expansion: return "expansion";
  }
  return "?";
}

namespace {

constexpr double kTol = 1e-9;
constexpr int kSubsetTableMaxN = 22;

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

// 2 e * den >= num * size, i.e. average degree of the set is at least d.
bool dense_at_least(std::int64_t inside, std::int64_t size, const Rational& d) {
  return 2 * inside * d.denominator() >= d.numerator() * size;
}

bool expansion_violated(std::int64_t inside, std::int64_t size, const ExpanderParams& p) {
  return 2.0 * static_cast<double>(inside) > (1.0 - p.eta) * to_double(p.d) * static_cast<double>(size) + kTol;
}

int small_limit(int n, double eps) { return static_cast<int>(std::floor((1.0 - eps) * n + kTol)); }

// e(S) for every bitmask S, by removing the lowest vertex.
std::vector<std::uint16_t> subset_edge_counts(const Graph& g) {
  const int n = g.num_vertices();
  if (n > kSubsetTableMaxN) throw Error(ErrorKind::TooLarge, "subset enumeration is capped at 22 vertices");
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
  for (const Edge& e : g.edges()) {
    adj[static_cast<std::size_t>(e.u)] |= 1u << e.v;
    adj[static_cast<std::size_t>(e.v)] |= 1u << e.u;
  }
  std::vector<std::uint16_t> inside(std::size_t{1} << n, 0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int v = __builtin_ctz(mask);
    const std::uint32_t rest = mask & (mask - 1);
    inside[mask] = static_cast<std::uint16_t>(inside[rest] + __builtin_popcount(adj[static_cast<std::size_t>(v)] & rest));
  }
  return inside;
}

std::vector<Vertex> mask_vertices(std::uint32_t mask) {
  std::vector<Vertex> out;
  for (Vertex v = 0; mask; ++v, mask >>= 1)
    if (mask & 1) out.push_back(v);
  return out;
}

std::vector<Vertex> all_vertices(int n) {
  std::vector<Vertex> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Candidate sets for large graphs: prefixes of the eigenvector sweep in both
// directions, then the sets left by min-degree peeling.  `visit(size, inside)`
// returns true to stop; the stopping set is returned.
template <typename Visit>
std::optional<std::vector<Vertex>> scan_candidates(const Graph& g, int limit, std::uint64_t seed, Visit&& visit) {
  const int n = g.num_vertices();
  if (n < 2 || limit < 1) return std::nullopt;
  if (is_connected(g)) {
    const SecondEigenpair pair = second_eigenpair(g, seed, 1024);
    std::vector<Vertex> order = sweep_order(g, pair);
    for (int dir = 0; dir < 2; ++dir) {
      if (dir == 1) std::reverse(order.begin(), order.end());
      std::vector<char> in(static_cast<std::size_t>(n), 0);
      std::int64_t inside = 0;
      for (int i = 0; i < limit; ++i) {
        const Vertex v = order[static_cast<std::size_t>(i)];
        for (Vertex u : g.neighbours(v)) inside += in[static_cast<std::size_t>(u)];
        in[static_cast<std::size_t>(v)] = 1;
        if (visit(i + 1, inside)) {
          std::vector<Vertex> s(order.begin(), order.begin() + i + 1);
          std::sort(s.begin(), s.end());
          return s;
        }
      }
    }
  } else {
    // Components are the natural candidates of a disconnected graph.
    for (const auto& comp : connected_components(g)) {
      if (static_cast<int>(comp.size()) > limit) continue;
      const CutDensity cd = cut_and_density(g, comp);
      if (visit(static_cast<int>(comp.size()), cd.inside)) return comp;
    }
  }
  // Min-degree peeling from the whole graph, lowest index on ties.
  std::vector<int> deg(static_cast<std::size_t>(n));
  std::set<std::pair<int, Vertex>> queue;
  for (Vertex v = 0; v < n; ++v) {
    deg[static_cast<std::size_t>(v)] = g.degree(v);
    queue.insert({g.degree(v), v});
  }
  std::vector<char> removed(static_cast<std::size_t>(n), 0);
  std::int64_t inside = g.num_edges();
  for (int size = n; size > 1; --size) {
    const auto [dv, v] = *queue.begin();
    queue.erase(queue.begin());
    removed[static_cast<std::size_t>(v)] = 1;
    inside -= dv;
    for (Vertex u : g.neighbours(v))
      if (!removed[static_cast<std::size_t>(u)]) {
        queue.erase({deg[static_cast<std::size_t>(u)], u});
        queue.insert({--deg[static_cast<std::size_t>(u)], u});
      }
    if (size - 1 <= limit && visit(size - 1, inside)) {
      std::vector<Vertex> s;
      for (Vertex u = 0; u < n; ++u)
        if (!removed[static_cast<std::size_t>(u)]) s.push_back(u);
      return s;
    }
  }
  return std::nullopt;
}

Graph drop_isolated(const Graph& g) {
  const std::vector<Vertex> keep = non_isolated_vertices(g);
  if (static_cast<int>(keep.size()) == g.num_vertices()) return g;
  return g.induced(keep);
}

// Single-vertex peel: remove the lowest-index v with e - d(v) >= d (n-1) / 2.
Graph peel(const Graph& g, const Rational& d) {
  const int n = g.num_vertices();
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  std::vector<int> deg(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) deg[static_cast<std::size_t>(v)] = g.degree(v);
  std::int64_t edges = g.num_edges();
  int count = n;
  bool changed = true;
  while (changed && count > 1) {
    changed = false;
    for (Vertex v = 0; v < n; ++v) {
      if (!alive[static_cast<std::size_t>(v)]) continue;
      if (dense_at_least(edges - deg[static_cast<std::size_t>(v)], count - 1, d)) {
        alive[static_cast<std::size_t>(v)] = 0;
        edges -= deg[static_cast<std::size_t>(v)];
        --count;
        for (Vertex u : g.neighbours(v))
          if (alive[static_cast<std::size_t>(u)]) --deg[static_cast<std::size_t>(u)];
        changed = true;
        break;
      }
    }
  }
  if (count == n) return g;
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < n; ++v)
    if (alive[static_cast<std::size_t>(v)]) keep.push_back(v);
  return g.induced(keep);
}

}  // namespace

Graph extract_d_minimal(const Graph& g, const Rational& d, int exact_max_n) {
  if (g.num_vertices() == 0) throw Error(ErrorKind::PreconditionViolated, "graph is empty");
  if (average_degree(g) < d)
    throw Error(ErrorKind::ThresholdUnreachable, "average degree is below the requested threshold");
  Graph cur = g;
  for (;;) {
    cur = peel(cur, d);
    if (!is_connected(cur)) {
      auto comps = connected_components(cur);
      std::size_t best = 0;
      Rational best_d = -1;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const Rational dc = cut_and_density(cur, comps[i]).density;
        if (dc > best_d) {
          best_d = dc;
          best = i;
        }
      }
      cur = cur.induced(comps[best]);
      continue;
    }
    const int n = cur.num_vertices();
    if (n <= std::min(exact_max_n, kSubsetTableMaxN) && n > 1) {
      const auto inside = subset_edge_counts(cur);
      std::uint32_t best = (1u << n) - 1;
      int best_size = n;
      for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        const int size = __builtin_popcount(mask);
        if (size < best_size && dense_at_least(inside[mask], size, d)) {
          best = mask;
          best_size = size;
        }
      }
      if (best_size < n) cur = cur.induced(mask_vertices(best));
    }
    return cur;
  }
}

bool min_degree_of_minimal(const Graph& g, const Rational& d) {
  return g.num_vertices() > 0 && Rational(2 * g.min_degree()) >= d;
}

ExpanderCertificate verify_expander(const Graph& g, const ExpanderParams& p, int exact_max_n) {
  p.validate();
  ExpanderCertificate cert;
  cert.params = p;
  const int n = g.num_vertices();
  if (n == 0) throw Error(ErrorKind::PreconditionViolated, "graph is empty");
  auto fail = [&](Violation v, std::vector<Vertex> witness) {
    cert.passed = false;
    cert.violation = v;
    cert.witness_violation = std::move(witness);
    return cert;
  };
  if (!dense_at_least(g.num_edges(), n, p.d)) {
    cert.evidence = n <= exact_max_n ? Evidence::ExactSubsetCheck : Evidence::HeuristicNoViolationFound;
    return fail(Violation::AverageDegree, all_vertices(n));
  }
  const int limit = small_limit(n, p.eps);

  if (n <= std::min(exact_max_n, kSubsetTableMaxN)) {
    cert.evidence = Evidence::ExactSubsetCheck;
    const auto inside = subset_edge_counts(g);
    const std::uint32_t full = (1u << n) - 1;
    cert.checked_subsets = static_cast<std::int64_t>(full);
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      const int size = __builtin_popcount(mask);
      if (dense_at_least(inside[mask], size, p.d)) return fail(Violation::Minimality, mask_vertices(mask));
      if (size <= limit && expansion_violated(inside[mask], size, p))
        return fail(Violation::Expansion, mask_vertices(mask));
    }
    cert.passed = true;
    return cert;
  }

  cert.evidence = Evidence::HeuristicNoViolationFound;
  // Any single vertex whose removal keeps the average degree at least d.
  for (Vertex v = 0; v < n; ++v)
    if (dense_at_least(g.num_edges() - g.degree(v), n - 1, p.d)) {
      std::vector<Vertex> rest = all_vertices(n);
      rest.erase(rest.begin() + v);
      return fail(Violation::Minimality, rest);
    }
  Violation found = Violation::None;
  auto witness = scan_candidates(g, n - 1, 0, [&](int size, std::int64_t inside) {
    ++cert.checked_subsets;
    if (dense_at_least(inside, size, p.d)) found = Violation::Minimality;
    else if (size <= limit && expansion_violated(inside, size, p)) found = Violation::Expansion;
    return found != Violation::None;
  });
  if (witness) return fail(found, *witness);

  if (n <= kDenseMaxN && is_connected(g)) {
    // Phi_G >= 1 - lambda_2 bounds every cut from below, so e(S) <=
    // vol(S) (1 - g (1 - vol(S)/2m)) / 2 with g = 1 - lambda_2.  The right-hand
    // side is convex in vol(S), so checking the extreme volumes for each size
    // covers every set of that size.
    const double lambda2 = normalized_eigenvalues<double>(g)(1);
    const double gap = std::max(0.0, 1.0 - lambda2 - 1e-9);
    cert.lambda2 = lambda2;
    cert.conductance_lower = gap;
    std::vector<int> degs(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) degs[static_cast<std::size_t>(v)] = g.degree(v);
    std::sort(degs.begin(), degs.end());
    const double two_m = 2.0 * g.num_edges();
    const double dd = to_double(p.d);
    auto twice_inside = [&](double vol) { return vol * (1.0 - gap * (1.0 - vol / two_m)); };
    double low = 0, high = 0;
    bool ok = true;
    for (int s = 1; s <= limit && ok; ++s) {
      low += degs[static_cast<std::size_t>(s - 1)];
      high += degs[static_cast<std::size_t>(n - s)];
      ok = std::max(twice_inside(low), twice_inside(high)) <= (1.0 - p.eta) * dd * s + kTol;
    }
    if (ok) cert.evidence = Evidence::ConductanceSufficient;
  }
  cert.passed = true;
  return cert;
}

EdgeExpansionReport edge_expansion_check(const Graph& g, const ExpanderParams& p, int exact_max_n) {
  p.validate();
  const int n = g.num_vertices();
  const int limit = small_limit(n, p.eps);
  const double per_vertex = p.eta * to_double(p.d) / 2.0;
  EdgeExpansionReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  if (n <= std::min(exact_max_n, kSubsetTableMaxN)) {
    rep.exhaustive = true;
    const auto inside = subset_edge_counts(g);
    std::vector<std::int32_t> vol(std::size_t{1} << n, 0);
    std::uint32_t tight = 0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      vol[mask] = vol[mask & (mask - 1)] + g.degree(__builtin_ctz(mask));
      const int size = __builtin_popcount(mask);
      if (size > limit) continue;
      ++rep.checked;
      const double slack = static_cast<double>(vol[mask] - 2 * inside[mask]) - per_vertex * size;
      if (slack < rep.min_slack) {
        rep.min_slack = slack;
        tight = mask;
      }
    }
    rep.tightest = mask_vertices(tight);
  } else {
    // Eigenvector sweeps in both directions; not exhaustive.
    const SecondEigenpair pair = second_eigenpair(g, 0, 1024);
    std::vector<Vertex> order = sweep_order(g, pair);
    for (int dir = 0; dir < 2; ++dir) {
      if (dir) std::reverse(order.begin(), order.end());
      std::vector<char> in(static_cast<std::size_t>(n), 0);
      std::int64_t cut = 0;
      for (int i = 0; i < limit; ++i) {
        const Vertex v = order[static_cast<std::size_t>(i)];
        int links = 0;
        for (Vertex u : g.neighbours(v)) links += in[static_cast<std::size_t>(u)];
        in[static_cast<std::size_t>(v)] = 1;
        cut += g.degree(v) - 2 * links;
        const double slack = static_cast<double>(cut) - per_vertex * (i + 1);
        ++rep.checked;
        if (slack < rep.min_slack) {
          rep.min_slack = slack;
          rep.tightest.assign(order.begin(), order.begin() + i + 1);
        }
      }
    }
    std::sort(rep.tightest.begin(), rep.tightest.end());
  }
  if (rep.min_slack < -kTol)
    throw Error(ErrorKind::ViolationFound, "a small set has fewer than eta d |S| / 2 leaving edges");
  return rep;
}

std::optional<std::vector<Vertex>> find_dense_small_set(const Graph& g, const ExpanderParams& p, int exact_max_n,
                                                        std::uint64_t seed) {
  const int n = g.num_vertices();
  const int limit = small_limit(n, p.eps);
  if (n <= std::min(exact_max_n, kSubsetTableMaxN)) {
    const auto inside = subset_edge_counts(g);
    std::optional<std::uint32_t> best;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      const int size = __builtin_popcount(mask);
      if (size > limit || !expansion_violated(inside[mask], size, p)) continue;
      if (!best) {
        best = mask;
        continue;
      }
      const std::int64_t lhs = static_cast<std::int64_t>(inside[mask]) * __builtin_popcount(*best);
      const std::int64_t rhs = static_cast<std::int64_t>(inside[*best]) * size;
      if (lhs > rhs || (lhs == rhs && size < __builtin_popcount(*best))) best = mask;
    }
    if (best) return mask_vertices(*best);
    return std::nullopt;
  }
  return scan_candidates(g, limit, seed,
                         [&](int size, std::int64_t inside) { return expansion_violated(inside, size, p); });
}

ExtractedExpander extract_expander(const Graph& g, double eps, const ExtractOptions& opt) {
  if (g.num_vertices() == 0) throw Error(ErrorKind::PreconditionViolated, "graph is empty");
  if (!(eps > 0 && eps <= 0.5)) throw Error(ErrorKind::PreconditionViolated, "eps must lie in (0, 1/2]");
  const double eta = eps / (2.0 * log2n(g.num_vertices()));
  ExtractedExpander out;
  Graph cur = g;
  for (;;) {
    ++out.rounds;
    Rational d = average_degree(cur);
    if (d == Rational(0)) {
      // Nothing but isolated vertices: a single vertex is the only expander.
      std::vector<Vertex> one{0};
      out.graph = cur.induced(one);
      out.certificate.params = {Rational(0), eta, eps};
      out.certificate.passed = true;
      out.certificate.evidence = Evidence::ExactSubsetCheck;
      return out;
    }
    if (d < Rational(1)) {
      // Without isolated vertices every component has average degree >= 1.
      cur = cur.induced(non_isolated_vertices(cur));
      continue;
    }
    Graph h = extract_d_minimal(cur, d, opt.exact_max_n);
    const ExpanderParams params{d, eta, eps};
    if (h.num_vertices() > opt.exact_max_n) out.exact_search = false;
    if (auto s = find_dense_small_set(h, params, opt.exact_max_n, opt.seed)) {
      cur = h.induced(*s);
      continue;
    }
    ExpanderCertificate cert = verify_expander(h, params, opt.exact_max_n);
    if (!cert.passed && cert.witness_violation && cert.witness_violation->size() < static_cast<std::size_t>(h.num_vertices())) {
      cur = h.induced(*cert.witness_violation);
      continue;
    }
    out.graph = std::move(h);
    out.certificate = std::move(cert);
    return out;
  }
}

Graph cap_max_degree(const Graph& g, int cap) {
  if (cap < 0) throw Error(ErrorKind::PreconditionViolated, "degree cap must be non-negative");
  const int n = g.num_vertices();
  std::vector<int> deg(static_cast<std::size_t>(n));
  std::set<std::pair<int, Vertex>> heavy;  // (-degree, vertex)
  for (Vertex v = 0; v < n; ++v) {
    deg[static_cast<std::size_t>(v)] = g.degree(v);
    if (g.degree(v) > cap) heavy.insert({-g.degree(v), v});
  }
  std::vector<char> alive(static_cast<std::size_t>(g.num_edges()), 1);
  auto update = [&](Vertex v) {
    heavy.erase({-(deg[static_cast<std::size_t>(v)] + 1), v});
    if (deg[static_cast<std::size_t>(v)] > cap) heavy.insert({-deg[static_cast<std::size_t>(v)], v});
  };
  while (!heavy.empty()) {
    const Vertex v = heavy.begin()->second;
    auto nb = g.neighbours(v);
    auto inc = g.incident(v);
    std::size_t pick = nb.size();
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (!alive[static_cast<std::size_t>(inc[i])]) continue;
      if (pick == nb.size() || deg[static_cast<std::size_t>(nb[i])] > deg[static_cast<std::size_t>(nb[pick])]) pick = i;
    }
    alive[static_cast<std::size_t>(inc[pick])] = 0;
    --deg[static_cast<std::size_t>(v)];
    --deg[static_cast<std::size_t>(nb[pick])];
    update(v);
    update(nb[pick]);
  }
  std::vector<EdgeId> keep;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (alive[static_cast<std::size_t>(e)]) keep.push_back(e);
  return g.with_edges(keep);
}

RegularizeResult regularize_bipartite(const Graph& g, int d, std::uint64_t seed, bool relaxed) {
  const auto side = two_colouring(g);
  if (!side) throw Error(ErrorKind::PreconditionViolated, "regularization needs a bipartite graph");
  const int n = g.num_vertices();
  if (d < 1) throw Error(ErrorKind::PreconditionViolated, "degree target must be at least 1");
  if (g.min_degree() < d)
    throw Error(ErrorKind::PreconditionViolated, "minimum degree " + std::to_string(g.min_degree()) +
                                                     " is below the target " + std::to_string(d));
  const double logn = log2n(n);
  RegularizeResult res;
  if (d < 36.0 * logn) {
    if (!relaxed) throw Error(ErrorKind::PreconditionViolated, "degree target below 36 log n");
    res.bypasses.push_back("d >= 36 log n");
  }
  const int count0 = static_cast<int>(std::count(side->begin(), side->end(), 0));
  const int a_side = count0 * 2 >= n ? 0 : 1;
  auto in_a = [&](Vertex v) { return (*side)[static_cast<std::size_t>(v)] == a_side; };

  // Keep exactly d edges at every A-vertex, preferring lightly loaded B-vertices.
  std::vector<int> load(static_cast<std::size_t>(n), 0);
  std::vector<EdgeId> kept;
  for (Vertex a = 0; a < n; ++a) {
    if (!in_a(a)) continue;
    auto nb = g.neighbours(a);
    auto inc = g.incident(a);
    std::vector<std::size_t> idx(nb.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
      return load[static_cast<std::size_t>(nb[x])] < load[static_cast<std::size_t>(nb[y])];
    });
    for (int i = 0; i < d; ++i) {
      kept.push_back(inc[idx[static_cast<std::size_t>(i)]]);
      ++load[static_cast<std::size_t>(nb[idx[static_cast<std::size_t>(i)]])];
    }
  }
  std::sort(kept.begin(), kept.end());
  const Graph truncated = g.with_edges(kept);
  if (truncated.max_degree() <= d) {
    res.graph = drop_isolated(truncated);
    return res;
  }

  const int buckets = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
  auto bucket_of = [](int deg) { return deg == 0 ? 0 : 1 + static_cast<int>(std::floor(std::log2(static_cast<double>(deg)))); };
  std::vector<std::int64_t> weight(static_cast<std::size_t>(buckets) + 2, 0);
  for (Vertex b = 0; b < n; ++b)
    if (!in_a(b)) weight[static_cast<std::size_t>(bucket_of(truncated.degree(b)))] += truncated.degree(b);
  int best = 1;
  for (int i = 2; i < static_cast<int>(weight.size()); ++i)
    if (weight[static_cast<std::size_t>(i)] > weight[static_cast<std::size_t>(best)]) best = i;
  res.bucket = best;
  const int t = 1 << (best - 1);
  auto in_bucket = [&](Vertex b) { return !in_a(b) && bucket_of(truncated.degree(b)) == best; };

  if (2 * t <= d) {
    std::vector<Vertex> keep;
    for (Vertex v = 0; v < n; ++v)
      if (in_a(v) || in_bucket(v)) keep.push_back(v);
    res.graph = drop_isolated(truncated.induced(keep));
    return res;
  }

  res.sampled = true;
  const double p = static_cast<double>(d) / (4.0 * t);
  const double d0 = d / (12.0 * logn);
  for (int attempt = 1; attempt <= 100; ++attempt) {
    res.attempts = attempt;
    Rng rng(derive_seed(seed, "regularize", {static_cast<std::uint64_t>(attempt)}));
    std::bernoulli_distribution coin(p);
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    int a_count = 0;
    for (Vertex v = 0; v < n; ++v)
      if (in_a(v) && coin(rng)) {
        chosen[static_cast<std::size_t>(v)] = 1;
        ++a_count;
      }
    std::vector<int> sub_deg(static_cast<std::size_t>(n), 0);
    for (const Edge& e : truncated.edges()) {
      const Vertex a = in_a(e.u) ? e.u : e.v;
      const Vertex b = in_a(e.u) ? e.v : e.u;
      if (chosen[static_cast<std::size_t>(a)] && in_bucket(b)) ++sub_deg[static_cast<std::size_t>(b)];
    }
    std::int64_t edges = 0;
    int b_count = 0;
    for (Vertex b = 0; b < n; ++b)
      if (in_bucket(b) && sub_deg[static_cast<std::size_t>(b)] <= d) {
        chosen[static_cast<std::size_t>(b)] = 1;
        ++b_count;
        edges += sub_deg[static_cast<std::size_t>(b)];
      }
    if (edges > 0 && static_cast<double>(edges) >= d0 * (a_count + b_count)) {
      std::vector<Vertex> keep;
      for (Vertex v = 0; v < n; ++v)
        if (chosen[static_cast<std::size_t>(v)]) keep.push_back(v);
      res.graph = drop_isolated(truncated.induced(keep));
      return res;
    }
  }
  throw Error(ErrorKind::RetriesExhausted, "no sample reached the density target in 100 attempts");
}

namespace {

// Largest subgraph of minimum degree >= k (iterated low-degree removal).
Graph min_degree_core(const Graph& g, double k) {
  const int n = g.num_vertices();
  std::vector<int> deg(static_cast<std::size_t>(n));
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  std::vector<Vertex> stack;
  for (Vertex v = 0; v < n; ++v) {
    deg[static_cast<std::size_t>(v)] = g.degree(v);
    if (deg[static_cast<std::size_t>(v)] < k) {
      alive[static_cast<std::size_t>(v)] = 0;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : g.neighbours(v))
      if (alive[static_cast<std::size_t>(u)] && --deg[static_cast<std::size_t>(u)] < k) {
        alive[static_cast<std::size_t>(u)] = 0;
        stack.push_back(u);
      }
  }
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < n; ++v)
    if (alive[static_cast<std::size_t>(v)]) keep.push_back(v);
  return g.induced(keep);
}

}  // namespace

AlmostRegularResult almost_regular_expander(const Graph& g, double eps, const AlmostRegularOptions& opt) {
  if (!two_colouring(g)) throw Error(ErrorKind::PreconditionViolated, "almost-regular extraction needs a bipartite graph");
  Graph cur = drop_isolated(g);
  if (cur.num_vertices() == 0) throw Error(ErrorKind::PreconditionViolated, "graph has no edges");
  AlmostRegularResult res;
  const double d = average_degree_value(cur);
  const double logn = log2n(cur.num_vertices());
  if (d < 1e7 * std::pow(logn, 3)) {
    if (!opt.relaxed)
      throw Error(ErrorKind::DegreeTooSmall, "average degree " + std::to_string(d) + " is below 10^7 log^3 n");
    res.bypasses.push_back("d >= 10^7 log^3 n");
  }
  ExtractedExpander last;
  for (int i = 0;; ++i) {
    AlmostRegularStep step;
    step.n = cur.num_vertices();
    step.d = average_degree_value(cur);
    const double li = log2n(step.n);
    if (step.d < 72.0 * li) {
      if (!opt.relaxed) throw Error(ErrorKind::DegreeTooSmall, "average degree fell below 72 log n during iteration");
      if (std::find(res.bypasses.begin(), res.bypasses.end(), "d_i >= 72 log n_i") == res.bypasses.end())
        res.bypasses.push_back("d_i >= 72 log n_i");
    }
    // (a) max degree <= d_i with average degree >= d_i / (24 log n_i): try
    // capping the d_i/2-core directly, fall back to the regularization lemma.
    const int cap = std::max(1, static_cast<int>(std::floor(step.d)));
    Graph core = min_degree_core(cur, step.d / 2.0);
    if (core.num_vertices() == 0) core = cur;
    Graph h = cap_max_degree(core, cap);
    if (average_degree_value(h) < step.d / (24.0 * li)) {
      step.used_regularization = true;
      const int target = std::max(1, std::min(core.min_degree(), cap));
      RegularizeResult r = regularize_bipartite(core, target, derive_seed(opt.seed, "almost-regular", {static_cast<std::uint64_t>(i)}),
                                                opt.relaxed);
      h = std::move(r.graph);
    }
    h = drop_isolated(h);
    step.capped_n = h.num_vertices();
    step.capped_d = average_degree_value(h);
    step.capped_max_degree = h.max_degree();
    // (b) expander inside H_i.
    last = extract_expander(h, eps, {opt.exact_max_n, derive_seed(opt.seed, "extract", {static_cast<std::uint64_t>(i)})});
    step.expander_n = last.graph.num_vertices();
    step.expander_d = average_degree_value(last.graph);
    res.trace.push_back(step);
    const int prev_n = cur.num_vertices();
    cur = last.graph;
    res.iterations = i + 1;
    if (cur.num_vertices() <= 1) break;
    if (48.0 * log2n(cur.num_vertices()) >= std::sqrt(48.0 * log2n(prev_n))) break;
  }
  res.graph = cur;
  res.certificate = last.certificate;
  for (const auto& b : res.bypasses) res.certificate.bypasses.push_back(b);
  const double dp = average_degree_value(cur);
  res.mu = dp > 0 ? cur.max_degree() / dp : 0.0;
  const double lp = log2n(cur.num_vertices());
  res.degree_floor_holds = dp >= d / (2500.0 * logn * logn);
  res.degree_ratio_holds = cur.max_degree() <= 2500.0 * lp * lp * dp;
  return res;
}

}  // namespace rainbow
