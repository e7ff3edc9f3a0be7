#include "rainbow/subdivision.hpp"

#include "rainbow/error.hpp"
#include "rainbow/seed.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace rainbow {

namespace {

// Resource keys: host vertices as themselves, colours shifted out of range.
using Resource = std::int64_t;
constexpr Resource kColourKey = Resource{1} << 40;

Resource colour_key(Colour c) { return kColourKey + c; }

std::string pair_name(Vertex x, Vertex y) { return "(" + std::to_string(x) + ", " + std::to_string(y) + ")"; }

Walk concatenate_closed(const Walk& a, const Walk& b) {
  Walk closed(a);
  closed.insert(closed.end(), b.rbegin() + 1, b.rend());
  return closed;
}

}  // namespace

// ---------------------------------------------------------------- paths

bool is_rainbow_path(const ColouredGraph& g, const std::vector<Vertex>& vs) {
  if (vs.empty()) return false;
  const Graph& h = g.graph();
  std::set<Vertex> seen;
  std::set<Colour> colours;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!h.valid(vs[i]) || !seen.insert(vs[i]).second) return false;
    if (i == 0) continue;
    auto c = g.colour(vs[i - 1], vs[i]);
    if (!c || !colours.insert(*c).second) return false;
  }
  return true;
}

RainbowPath make_rainbow_path(const ColouredGraph& g, std::vector<Vertex> vs) {
  if (!is_rainbow_path(g, vs)) throw Error(ErrorKind::ViolationFound, "vertex sequence is not a rainbow path");
  RainbowPath p;
  for (std::size_t i = 1; i < vs.size(); ++i) p.colours.push_back(*g.colour(vs[i - 1], vs[i]));
  p.vertices = std::move(vs);
  return p;
}

RainbowPath shortcut_walk(const RainbowPath& walk) {
  RainbowPath p = walk;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    std::size_t last = i;
    for (std::size_t j = i + 1; j < p.vertices.size(); ++j)
      if (p.vertices[j] == p.vertices[i]) last = j;
    if (last == i) continue;
    p.vertices.erase(p.vertices.begin() + static_cast<std::ptrdiff_t>(i + 1),
                     p.vertices.begin() + static_cast<std::ptrdiff_t>(last + 1));
    p.colours.erase(p.colours.begin() + static_cast<std::ptrdiff_t>(i),
                    p.colours.begin() + static_cast<std::ptrdiff_t>(last));
  }
  return p;
}

// ---------------------------------------------------------------- reach

ReachSet rainbow_reach(const ColouredGraph& g, Vertex x, const AvoidSet& F, int ell) {
  const Graph& h = g.graph();
  if (!h.valid(x)) throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(x));
  if (ell < 0) throw Error(ErrorKind::PreconditionViolated, "ell must be non-negative");
  const int n = h.num_vertices();
  std::vector<std::optional<RainbowPath>> paths(static_cast<std::size_t>(n));
  paths[static_cast<std::size_t>(x)] = RainbowPath{{x}, {}};
  std::vector<Vertex> frontier{x};
  for (int round = 0; round <= ell && !frontier.empty(); ++round) {
    std::vector<Vertex> next;
    for (Vertex u : frontier) {
      const RainbowPath& pu = *paths[static_cast<std::size_t>(u)];
      std::vector<std::pair<Colour, Vertex>> out;
      const auto nb = h.neighbours(u);
      const auto ids = h.incident(u);
      for (std::size_t i = 0; i < nb.size(); ++i) out.emplace_back(g.colour(ids[i]), nb[i]);
      std::sort(out.begin(), out.end());
      for (const auto& [c, w] : out) {
        if (paths[static_cast<std::size_t>(w)] || F.has_vertex(w) || F.has_colour(c)) continue;
        if (std::find(pu.colours.begin(), pu.colours.end(), c) != pu.colours.end()) continue;
        RainbowPath pw = pu;
        pw.vertices.push_back(w);
        pw.colours.push_back(c);
        paths[static_cast<std::size_t>(w)] = std::move(pw);
        next.push_back(w);
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  ReachSet r;
  r.source = x;
  for (Vertex v = 0; v < n; ++v) {
    if (!paths[static_cast<std::size_t>(v)]) continue;
    r.reached.push_back(v);
    for (Colour c : paths[static_cast<std::size_t>(v)]->colours) r.max_usage = std::max(r.max_usage, ++r.colour_usage[c]);
    r.path_of.emplace(v, std::move(*paths[static_cast<std::size_t>(v)]));
  }
  return r;
}

ReachSet rainbow_reach_robust(const ColouredGraph& g, Vertex x, const AvoidSet& F, int ell, int q) {
  if (q < 1) throw Error(ErrorKind::PreconditionViolated, "q must be positive");
  const double cap = static_cast<double>(g.num_vertices()) / q;
  const std::size_t bad_cap = static_cast<std::size_t>(2) * static_cast<std::size_t>(q) * static_cast<std::size_t>(ell);
  AvoidSet banned = F;
  std::vector<Colour> bad;
  std::size_t max_bad = 0;
  for (int iter = 1;; ++iter) {
    ReachSet r = rainbow_reach(g, x, banned, ell);
    std::vector<Colour> over;
    for (const auto& [c, uses] : r.colour_usage)
      if (uses > cap) over.push_back(c);
    if (over.empty()) {
      r.bad_colours = bad;
      r.max_bad_colours = max_bad;
      r.iterations = iter;
      return r;
    }
    for (Colour c : over) {
      bad.push_back(c);
      banned.colours.insert(c);
    }
    max_bad = std::max(max_bad, bad.size());
    if (bad.size() > bad_cap)
      throw Error(ErrorKind::IterationCapExceeded,
                  "more than 2 q ell = " + std::to_string(bad_cap) + " colours saturated");
  }
}

// ---------------------------------------------------------------- theta

std::vector<Walk> theta_sampler(const Graph& g, Vertex x, Vertex y, int k, int s, const WalkPairPredicate& bad,
                                std::uint64_t seed, int max_rounds, const WalkFilter& accept, ThetaStats* stats) {
  if (s < 1 || k < 1) throw Error(ErrorKind::PreconditionViolated, "need s >= 1 and k >= 1");
  WalkSampler sampler(g, y, k);
  if (sampler.count_from(x) == 0)
    throw Error(ErrorKind::NoWalk, "no walk of length " + std::to_string(k) + " joins " + pair_name(x, y));
  ThetaStats st;
  auto finish = [&] {
    if (stats) *stats = st;
  };
  for (int round = 0; round < max_rounds; ++round) {
    ++st.rounds;
    Rng rng = make_rng(derive_seed(seed, "theta-round", {static_cast<std::uint64_t>(round)}));
    std::vector<Walk> walks;
    bool ok = true;
    for (int i = 0; i < s && ok; ++i) {
      walks.push_back(sampler.sample(x, rng));
      if (accept && !accept(walks.back())) {
        ++st.walks_rejected;
        ok = false;
      }
    }
    if (!ok) continue;
    // Every pair is inspected so the bad-pair share is an unbiased estimate.
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j) {
        ++st.pairs_checked;
        if (bad(walks[static_cast<std::size_t>(i)], walks[static_cast<std::size_t>(j)])) {
          ++st.pairs_bad;
          ok = false;
        }
      }
    if (ok) {
      finish();
      return walks;
    }
  }
  finish();
  const double share = st.pairs_checked ? static_cast<double>(st.pairs_bad) / static_cast<double>(st.pairs_checked) : 1.0;
  throw Error(ErrorKind::RoundsExhausted, "no accepted sample for " + pair_name(x, y) + " in " +
                                              std::to_string(max_rounds) + " rounds; measured bad-pair share " +
                                              std::to_string(share));
}

std::vector<RainbowPath> disjoint_rainbow_paths(const ColouredGraph& g, Vertex x, Vertex y, int k, int s,
                                                std::uint64_t seed, int max_rounds, ThetaStats* stats) {
  const ClosedWalkRule rule = rainbow_rule(g);
  auto bad = [&](const Walk& a, const Walk& b) { return is_degenerate(g.graph(), rule, concatenate_closed(a, b)); };
  auto accept = [&](const Walk& w) { return is_rainbow_path(g, w); };
  std::vector<RainbowPath> out;
  for (Walk& w : theta_sampler(g.graph(), x, y, k, s, bad, seed, max_rounds, accept, stats))
    out.push_back(make_rainbow_path(g, std::move(w)));
  return out;
}

// ---------------------------------------------------------------- stages

const char* to_string(PathMode m) {
  switch (m) {
    case PathMode::Rainbow: return "rainbow";
    case PathMode::VertexDisjoint: return "vertex-disjoint";
    case PathMode::RSetDisjoint: return "rset-disjoint";
  }
  return "?";
}

ColouredGraph colour_by_edge_id(const Graph& g) {
  std::vector<Colour> c(static_cast<std::size_t>(g.num_edges()));
  std::iota(c.begin(), c.end(), 0);
  return ColouredGraph(g, std::move(c));
}

ColouredGraph restrict_to(const ColouredGraph& parent, const Graph& sub) {
  std::vector<Colour> colours;
  colours.reserve(static_cast<std::size_t>(sub.num_edges()));
  for (const Edge& e : sub.edges()) {
    auto c = parent.colour(sub.label(e.u), sub.label(e.v));
    if (!c) throw Error(ErrorKind::InvalidVertex, "subgraph edge missing from the parent graph");
    colours.push_back(*c);
  }
  return ColouredGraph(sub, std::move(colours));
}

Graph bipartite_subgraph(const Graph& g, std::uint64_t seed) {
  const int n = g.num_vertices();
  Rng rng = make_rng(seed);
  std::vector<int> side(static_cast<std::size_t>(n));
  for (int& s : side) s = static_cast<int>(uniform_below(rng, 2));
  for (bool improved = true; improved;) {
    improved = false;
    for (Vertex v = 0; v < n; ++v) {
      int same = 0;
      for (Vertex u : g.neighbours(v)) same += side[static_cast<std::size_t>(u)] == side[static_cast<std::size_t>(v)];
      if (2 * same > g.degree(v)) {
        side[static_cast<std::size_t>(v)] ^= 1;
        improved = true;
      }
    }
  }
  std::vector<Edge> kept;
  for (const Edge& e : g.edges())
    if (side[static_cast<std::size_t>(e.u)] != side[static_cast<std::size_t>(e.v)]) kept.push_back(e);
  std::sort(kept.begin(), kept.end());
  Graph b(n, std::move(kept));
  b.set_labels(g.labels());
  return b;
}

ClosedWalkRule ExpanderStage::rule() const {
  switch (mode) {
    case PathMode::Rainbow: return rainbow_rule(coloured);
    case PathMode::VertexDisjoint: return vertex_rule();
    case PathMode::RSetDisjoint: return rset_rule(rsets, universe);
  }
  return {};
}

nlohmann::json ExpanderStage::summary() const {
  const Graph& h = graph();
  nlohmann::json j = {{"input_vertices", input_vertices},
                      {"input_edges", input_edges},
                      {"bipartite_edges", bipartite_edges},
                      {"expander_vertices", h.num_vertices()},
                      {"expander_edges", h.num_edges()},
                      {"expander_average_degree", average_degree_value(h)},
                      {"expander_max_degree", h.max_degree()},
                      {"mu", expander.mu},
                      {"iterations", expander.iterations},
                      {"evidence", to_string(expander.certificate.evidence)},
                      {"certificate_passed", expander.certificate.passed},
                      {"degree_floor_holds", expander.degree_floor_holds},
                      {"degree_ratio_holds", expander.degree_ratio_holds},
                      {"bypasses", expander.bypasses},
                      {"side_x", bip.x.size()},
                      {"side_y", bip.y.size()},
                      {"took_largest_component", took_largest_component}};
  if (expander.certificate.lambda2) j["lambda2"] = *expander.certificate.lambda2;
  return j;
}

ExpanderStage prepare_expander(const SearchGraph& sg, const SearchParams& p, std::uint64_t seed) {
  const Graph& src = sg.graph.graph();
  std::vector<Edge> edges = src.edges();
  std::sort(edges.begin(), edges.end());
  const Graph base(src.num_vertices(), std::move(edges));  // identity labels = search ids
  const std::vector<Vertex> keep = non_isolated_vertices(base);
  if (keep.empty()) throw Error(ErrorKind::ThresholdUnreachable, "graph has no edges");
  const Graph trimmed = base.induced(keep);
  const Graph bip = bipartite_subgraph(trimmed, derive_seed(seed, "bipartite"));

  ExpanderStage st;
  st.mode = sg.mode;
  st.universe = sg.universe;
  st.input_vertices = src.num_vertices();
  st.input_edges = src.num_edges();
  st.bipartite_edges = bip.num_edges();
  st.expander = almost_regular_expander(bip, p.eps, {p.relaxed, derive_seed(seed, "almost-regular"), p.exact_max_n});
  Graph h = st.expander.graph;
  if (!is_connected(h)) {
    auto comps = connected_components(h);
    auto best = std::max_element(comps.begin(), comps.end(),
                                 [](const auto& a, const auto& b) { return a.size() < b.size(); });
    h = h.induced(*best);
    st.took_largest_component = true;
  }
  st.to_search = h.labels();
  st.from_search.assign(static_cast<std::size_t>(src.num_vertices()), -1);
  for (Vertex v = 0; v < h.num_vertices(); ++v) st.from_search[static_cast<std::size_t>(st.to_search[static_cast<std::size_t>(v)])] = v;
  st.bip = bipartition(h);
  if (sg.mode == PathMode::RSetDisjoint)
    for (Vertex v : st.to_search) st.rsets.push_back(sg.rsets.at(static_cast<std::size_t>(v)));
  st.coloured = restrict_to(sg.graph, h);
  return st;
}

// ---------------------------------------------------------------- pairs

PairOracle::PairOracle(const ExpanderStage& stage, int k, int s, const PairOptions& opt)
    : stage_(&stage), rule_(stage.rule()), k_(k), s_(s), opt_(opt) {}

Verdict PairOracle::verdict(Vertex a, Vertex b) {
  const auto key = std::minmax(a, b);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Verdict v = classify_pair(stage_->graph(), rule_, key.first, key.second, k_, s_, opt_);
  cache_.emplace(key, v);
  (v == Verdict::Good ? good_ : v == Verdict::Bad ? bad_ : unknown_)++;
  return v;
}

nlohmann::json PairOracle::summary() const {
  return {{"k", k_}, {"s", s_}, {"evaluated", evaluated()}, {"good", good_}, {"bad", bad_}, {"unknown", unknown_}};
}

std::vector<Vertex> greedy_good_clique(const ExpanderStage& stage, PairOracle& oracle, int m, int max_starts) {
  const std::vector<Vertex>& xs = stage.bip.x;
  const int size = static_cast<int>(xs.size());
  for (int start = 0; start < std::min(size, max_starts); ++start) {
    std::vector<Vertex> z{xs[static_cast<std::size_t>(start)]};
    for (int off = 1; off < size && static_cast<int>(z.size()) < m; ++off) {
      const Vertex x = xs[static_cast<std::size_t>((start + off) % size)];
      bool fits = true;
      for (Vertex w : z)
        if (oracle.verdict(x, w) != Verdict::Good) {
          fits = false;
          break;
        }
      if (fits) z.push_back(x);
    }
    if (static_cast<int>(z.size()) == m) return z;
  }
  throw Error(ErrorKind::NoCliqueOfGoodPairs, "no " + std::to_string(m) + " vertices of X are pairwise good (" +
                                                  std::to_string(oracle.evaluated()) + " pairs evaluated, " +
                                                  std::to_string(oracle.good()) + " good)");
}

// ---------------------------------------------------------------- certificates

const char* to_string(VerifyFailure f) {
  switch (f) {
    case VerifyFailure::None: return "none";
    case VerifyFailure::Shape: return "Shape";
    case VerifyFailure::WrongEndpoints: return "WrongEndpoints";
    case VerifyFailure::MissingEdge: return "MissingEdge";
    case VerifyFailure::ColourMismatch: return "ColourMismatch";
    case VerifyFailure::RepeatedVertex: return "RepeatedVertex";
    case VerifyFailure::ColourCollision: return "ColourCollision";
    case VerifyFailure::VertexCollision: return "VertexCollision";
    case VerifyFailure::InteriorHitsBranch: return "InteriorHitsBranch";
    case VerifyFailure::TooLong: return "TooLong";
    case VerifyFailure::RSetOverlap: return "RSetOverlap";
    case VerifyFailure::MissingBicliqueEdge: return "MissingBicliqueEdge";
  }
  return "?";
}

VerifyResult verify_subdivision(const ColouredGraph& g, const SubdivisionCertificate& c, bool rainbow) {
  auto fail = [](VerifyFailure f, std::string d) { return VerifyResult{f, std::move(d)}; };
  const Graph& h = g.graph();
  const std::size_t m = c.branch.size();
  if (m < 2) return fail(VerifyFailure::Shape, "fewer than two branch vertices");
  const std::set<Vertex> branch(c.branch.begin(), c.branch.end());
  if (branch.size() != m) return fail(VerifyFailure::Shape, "repeated branch vertex");
  for (Vertex z : c.branch)
    if (!h.valid(z)) return fail(VerifyFailure::Shape, "branch vertex " + std::to_string(z) + " out of range");
  if (c.pairs.size() != m * (m - 1) / 2 || c.paths.size() != c.pairs.size() || c.colours.size() != c.paths.size())
    return fail(VerifyFailure::Shape, "need one connector per pair of branch vertices");
  std::set<std::pair<int, int>> seen_pairs;
  for (auto [a, b] : c.pairs) {
    if (a == b || a < 0 || b < 0 || static_cast<std::size_t>(std::max(a, b)) >= m || !seen_pairs.insert(std::minmax(a, b)).second)
      return fail(VerifyFailure::Shape, "pair list does not cover every branch pair once");
  }
  std::set<Vertex> interiors;
  std::set<Colour> colours;
  for (std::size_t i = 0; i < c.paths.size(); ++i) {
    const auto& p = c.paths[i];
    const std::string tag = "connector " + std::to_string(i);
    if (p.size() < 2 || c.colours[i].size() != p.size() - 1) return fail(VerifyFailure::Shape, tag + " malformed");
    for (Vertex v : p)
      if (!h.valid(v)) return fail(VerifyFailure::Shape, tag + " leaves the vertex range");
    const Vertex za = c.branch[static_cast<std::size_t>(c.pairs[i].first)];
    const Vertex zb = c.branch[static_cast<std::size_t>(c.pairs[i].second)];
    if (!((p.front() == za && p.back() == zb) || (p.front() == zb && p.back() == za)))
      return fail(VerifyFailure::WrongEndpoints, tag + " does not join its branch pair");
    for (std::size_t j = 1; j < p.size(); ++j) {
      auto col = g.colour(p[j - 1], p[j]);
      if (!col) return fail(VerifyFailure::MissingEdge, tag + " uses non-edge " + pair_name(p[j - 1], p[j]));
      if (rainbow && *col != c.colours[i][j - 1])
        return fail(VerifyFailure::ColourMismatch, tag + " records a wrong colour on " + pair_name(p[j - 1], p[j]));
    }
    if (std::set<Vertex>(p.begin(), p.end()).size() != p.size())
      return fail(VerifyFailure::RepeatedVertex, tag + " repeats a vertex");
    if (c.length_bound > 0 && static_cast<int>(p.size()) - 1 > c.length_bound)
      return fail(VerifyFailure::TooLong, tag + " is longer than " + std::to_string(c.length_bound));
    for (std::size_t j = 1; j + 1 < p.size(); ++j) {
      if (branch.count(p[j])) return fail(VerifyFailure::InteriorHitsBranch, tag + " passes through a branch vertex");
      if (!interiors.insert(p[j]).second)
        return fail(VerifyFailure::VertexCollision, tag + " shares interior vertex " + std::to_string(p[j]));
    }
    if (rainbow)
      for (Colour col : c.colours[i])
        if (!colours.insert(col).second)
          return fail(VerifyFailure::ColourCollision, tag + " reuses colour " + std::to_string(col));
  }
  return {};
}

std::vector<Edge> expanded_edges(const SubdivisionCertificate& cert) {
  std::vector<Edge> out;
  for (const auto& p : cert.paths)
    for (std::size_t j = 1; j < p.size(); ++j) out.push_back({std::min(p[j - 1], p[j]), std::max(p[j - 1], p[j])});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::json to_json(const SubdivisionCertificate& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (auto [a, b] : c.pairs) pairs.push_back({a, b});
  return {{"branch_vertices", c.branch}, {"pairs", pairs},   {"paths", c.paths},       {"colours", c.colours},
          {"length_bound", c.length_bound}, {"rooted", c.rooted}, {"params", c.params}, {"evidence", c.evidence}};
}

SubdivisionCertificate subdivision_from_json(const nlohmann::json& j) {
  try {
    SubdivisionCertificate c;
    c.branch = j.at("branch_vertices").get<std::vector<Vertex>>();
    for (const auto& p : j.at("pairs")) c.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    c.paths = j.at("paths").get<std::vector<std::vector<Vertex>>>();
    c.colours = j.at("colours").get<std::vector<std::vector<Colour>>>();
    c.length_bound = j.value("length_bound", 0);
    c.rooted = j.value("rooted", false);
    c.params = j.value("params", nlohmann::json::object());
    c.evidence = j.value("evidence", nlohmann::json::object());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("certificate JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- engine

namespace {

// Resources a vertex of the expander occupies in the search graph.
void vertex_resources(const ExpanderStage& st, Vertex v, std::vector<Resource>& out) {
  if (st.mode == PathMode::RSetDisjoint) {
    for (Vertex h : st.rsets[static_cast<std::size_t>(v)]) out.push_back(h);
  } else {
    out.push_back(st.to_search[static_cast<std::size_t>(v)]);
  }
}

// Interior vertices plus, in rainbow mode, every edge colour.
std::vector<Resource> interior_resources(const ExpanderStage& st, const Walk& w) {
  std::vector<Resource> out;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) vertex_resources(st, w[i], out);
  if (st.mode == PathMode::Rainbow)
    for (std::size_t i = 1; i < w.size(); ++i) out.push_back(colour_key(*st.coloured.colour(w[i - 1], w[i])));
  return out;
}

// A walk is a usable path when none of its resources repeats.
bool clean_path(const ExpanderStage& st, const Walk& w) {
  std::vector<Resource> all;
  for (Vertex v : w) vertex_resources(st, v, all);
  if (st.mode == PathMode::Rainbow)
    for (std::size_t i = 1; i < w.size(); ++i) all.push_back(colour_key(*st.coloured.colour(w[i - 1], w[i])));
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

nlohmann::json params_json(const SearchParams& p, int n, int m, int r, std::uint64_t seed, PathMode mode) {
  nlohmann::json j = {{"mode", to_string(mode)}, {"m", m}, {"seed", seed}, {"used", to_json(p)}};
  if (n >= 2) j["paper"] = to_json(param_calculator(n, p.eps, m, r, p.scale))["asymptotic"];
  return j;
}

void check_search_params(const SearchParams& p, int m) {
  if (m < 2) throw Error(ErrorKind::PreconditionViolated, "m must be at least 2");
  if (p.k < 2 || p.k % 2) throw Error(ErrorKind::PreconditionViolated, "k must be even and at least 2");
  if (p.s < 1) throw Error(ErrorKind::PreconditionViolated, "s must be positive");
  if (p.max_rounds < 1) throw Error(ErrorKind::PreconditionViolated, "max_rounds must be positive");
}

}  // namespace

SubdivisionCertificate find_subdivision_in(const SearchGraph& sg, int m, const SearchParams& p, std::uint64_t seed) {
  check_search_params(p, m);
  const ExpanderStage st = prepare_expander(sg, p, derive_seed(seed, "expander"));
  PairOptions popt = p.pairs;
  popt.seed = derive_seed(seed, "pairs");
  PairOracle oracle(st, p.k, p.s, popt);
  const std::vector<Vertex> z = greedy_good_clique(st, oracle, m, p.max_greedy_starts);

  const Graph& h = st.graph();
  const ClosedWalkRule rule = st.rule();
  auto bad = [&](const Walk& a, const Walk& b) { return is_degenerate(h, rule, concatenate_closed(a, b)); };
  auto accept = [&](const Walk& w) { return clean_path(st, w); };

  std::unordered_set<Resource> used;
  std::vector<Resource> branch;
  for (Vertex v : z) vertex_resources(st, v, branch);
  used.insert(branch.begin(), branch.end());

  SubdivisionCertificate cert;
  for (Vertex v : z) cert.branch.push_back(st.to_search[static_cast<std::size_t>(v)]);
  cert.length_bound = p.k;
  nlohmann::json rounds = nlohmann::json::array();
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const Vertex x = z[static_cast<std::size_t>(a)];
      const Vertex y = z[static_cast<std::size_t>(b)];
      std::optional<Walk> chosen;
      ThetaStats total;
      int round = 0;
      for (; round < p.max_rounds && !chosen; ++round) {
        ThetaStats ts;
        std::vector<Walk> spares;
        try {
          spares = theta_sampler(h, x, y, p.k, p.s, bad,
                                 derive_seed(seed, "connector",
                                             {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b),
                                              static_cast<std::uint64_t>(round)}),
                                 1, accept, &ts);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::RoundsExhausted) throw;
        }
        total.pairs_checked += ts.pairs_checked;
        total.pairs_bad += ts.pairs_bad;
        total.walks_rejected += ts.walks_rejected;
        for (const Walk& w : spares) {
          const auto res = interior_resources(st, w);
          if (std::none_of(res.begin(), res.end(), [&](Resource r) { return used.count(r) != 0; })) {
            chosen = w;
            break;
          }
        }
      }
      if (!chosen) {
        const double share = total.pairs_checked ? static_cast<double>(total.pairs_bad) / static_cast<double>(total.pairs_checked) : 1.0;
        throw Error(ErrorKind::RoundsExhausted,
                    "connector " + pair_name(cert.branch[static_cast<std::size_t>(a)], cert.branch[static_cast<std::size_t>(b)]) +
                        " not found in " + std::to_string(p.max_rounds) + " rounds; measured bad-pair share " +
                        std::to_string(share));
      }
      for (Resource r : interior_resources(st, *chosen)) used.insert(r);
      std::vector<Vertex> path;
      std::vector<Colour> colours;
      for (std::size_t i = 0; i < chosen->size(); ++i) {
        path.push_back(st.to_search[static_cast<std::size_t>((*chosen)[i])]);
        if (i) colours.push_back(*st.coloured.colour((*chosen)[i - 1], (*chosen)[i]));
      }
      cert.pairs.emplace_back(a, b);
      cert.paths.push_back(std::move(path));
      cert.colours.push_back(std::move(colours));
      rounds.push_back(round);
    }
  cert.params = params_json(p, sg.graph.num_vertices(), m, 1, seed, sg.mode);
  cert.evidence = {{"expander", st.summary()},
                   {"pairs", oracle.summary()},
                   {"connector_rounds", rounds},
                   {"branch_in_expander", true}};
  return cert;
}

SubdivisionCertificate find_subdivision(const ColouredGraph& g, int m, const SearchParams& p, std::uint64_t seed) {
  SearchGraph sg{g, PathMode::Rainbow, {}, 0};
  SubdivisionCertificate c = find_subdivision_in(sg, m, p, seed);
  const VerifyResult v = verify_subdivision(g, c);
  if (!v) throw Error(ErrorKind::ViolationFound, std::string("self-check failed: ") + to_string(v.reason) + ", " + v.detail);
  return c;
}

SubdivisionCertificate find_subdivision_uncoloured(const Graph& g, int m, const SearchParams& p,
                                                   std::uint64_t seed) {
  SearchGraph sg{colour_by_edge_id(g), PathMode::VertexDisjoint, {}, 0};
  SubdivisionCertificate c = find_subdivision_in(sg, m, p, seed);
  const VerifyResult v = verify_subdivision(sg.graph, c);
  if (!v) throw Error(ErrorKind::ViolationFound, std::string("self-check failed: ") + to_string(v.reason) + ", " + v.detail);
  return c;
}

RainbowPath rainbow_connect(const ColouredGraph& g, const ExpanderStage& st, PairOracle& oracle, Vertex x, Vertex y,
                            const AvoidSet& M, const SearchParams& p, std::uint64_t seed, ConnectStats* stats) {
  const Graph& host = g.graph();
  if (!host.valid(x) || !host.valid(y)) throw Error(ErrorKind::InvalidVertex, "endpoint out of range");
  if (x == y) throw Error(ErrorKind::PreconditionViolated, "endpoints must differ");
  if (st.mode != PathMode::Rainbow) throw Error(ErrorKind::PreconditionViolated, "rainbow_connect needs a rainbow stage");
  ConnectStats cs;
  auto done = [&] {
    if (stats) *stats = cs;
  };
  if (M.has_vertex(x) || M.has_vertex(y)) {
    done();
    throw Error(ErrorKind::NoGoodPair, "an endpoint of " + pair_name(x, y) + " is excluded");
  }
  const ReachSet ux = rainbow_reach_robust(g, x, M, p.ell, p.q);
  const ReachSet uy = rainbow_reach_robust(g, y, M, p.ell, p.q);
  cs.reach_x = ux.reached.size();
  cs.reach_y = uy.reached.size();
  auto side_x = [&](const ReachSet& r) {
    std::vector<Vertex> out;
    for (Vertex u : r.reached) {
      const Vertex hu = st.from_search[static_cast<std::size_t>(u)];
      if (hu >= 0 && st.bip.contains_x(hu)) out.push_back(u);
    }
    return out;
  };
  const std::vector<Vertex> cu = side_x(ux);
  const std::vector<Vertex> cv = side_x(uy);
  const Graph& h = st.graph();
  const ClosedWalkRule rule = st.rule();
  auto bad = [&](const Walk& a, const Walk& b) { return is_degenerate(h, rule, concatenate_closed(a, b)); };
  auto accept = [&](const Walk& w) { return clean_path(st, w); };
  const int rounds_per_pair = std::max(1, p.max_rounds / 10);

  for (Vertex u : cu)
    for (Vertex v : cv) {
      if (u == v) continue;
      const RainbowPath& pu = ux.path_of.at(u);
      const RainbowPath& qv = uy.path_of.at(v);
      std::set<Colour> forbidden(pu.colours.begin(), pu.colours.end());
      bool colour_bad = false;
      for (Colour c : qv.colours) colour_bad |= !forbidden.insert(c).second;
      if (colour_bad) {
        ++cs.colour_bad_skipped;
        continue;
      }
      if (cs.pairs_tried >= p.max_connect_pairs) {
        done();
        throw Error(ErrorKind::NoGoodPair, "no usable pair for " + pair_name(x, y) + " among " +
                                               std::to_string(cs.pairs_tried) + " candidates");
      }
      ++cs.pairs_tried;
      const Vertex hu = st.from_search[static_cast<std::size_t>(u)];
      const Vertex hv = st.from_search[static_cast<std::size_t>(v)];
      if (oracle.verdict(hu, hv) != Verdict::Good) {
        ++cs.not_good_skipped;
        continue;
      }
      forbidden.insert(M.colours.begin(), M.colours.end());
      for (int round = 0; round < rounds_per_pair; ++round) {
        ++cs.rounds;
        std::vector<Walk> spares;
        try {
          spares = theta_sampler(h, hu, hv, p.k, p.s, bad,
                                 derive_seed(seed, "connect", {static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(v),
                                                               static_cast<std::uint64_t>(round)}),
                                 1, accept);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::RoundsExhausted) throw;
          continue;
        }
        for (const Walk& t : spares) {
          bool clear = true;
          for (std::size_t i = 0; i < t.size() && clear; ++i) {
            const Vertex gv = st.to_search[static_cast<std::size_t>(t[i])];
            if (i > 0 && i + 1 < t.size() && M.has_vertex(gv)) clear = false;
            if (i > 0 && forbidden.count(*st.coloured.colour(t[i - 1], t[i]))) clear = false;
          }
          if (!clear) continue;
          RainbowPath walk = pu;
          for (std::size_t i = 1; i < t.size(); ++i) {
            walk.vertices.push_back(st.to_search[static_cast<std::size_t>(t[i])]);
            walk.colours.push_back(*st.coloured.colour(t[i - 1], t[i]));
          }
          for (std::size_t i = qv.vertices.size() - 1; i > 0; --i) {
            walk.vertices.push_back(qv.vertices[i - 1]);
            walk.colours.push_back(qv.colours[i - 1]);
          }
          RainbowPath path = make_rainbow_path(g, shortcut_walk(walk).vertices);
          if (path.length() > p.L) continue;
          cs.u = u;
          cs.v = v;
          done();
          return path;
        }
      }
    }
  done();
  throw Error(ErrorKind::NoGoodPair, "no pair of reach-set vertices in X yields a connector for " + pair_name(x, y));
}

SubdivisionCertificate find_rooted_subdivision(const ColouredGraph& g, const std::vector<Vertex>& Z,
                                               const SearchParams& p, std::uint64_t seed) {
  const int m = static_cast<int>(Z.size());
  check_search_params(p, m);
  if (p.L < 2 * (p.ell + 1) + p.k) throw Error(ErrorKind::PreconditionViolated, "need L >= 2(ell + 1) + k");
  if (std::set<Vertex>(Z.begin(), Z.end()).size() != Z.size())
    throw Error(ErrorKind::PreconditionViolated, "root vertices must be distinct");
  for (Vertex z : Z)
    if (!g.graph().valid(z)) throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(z));
  const ExpanderStage st = prepare_expander(SearchGraph{g, PathMode::Rainbow, {}, 0}, p, derive_seed(seed, "expander"));
  PairOptions popt = p.pairs;
  popt.seed = derive_seed(seed, "pairs");
  PairOracle oracle(st, p.k, p.s, popt);

  SubdivisionCertificate cert;
  cert.branch = Z;
  cert.rooted = true;
  cert.length_bound = p.L;
  const std::size_t budget = static_cast<std::size_t>(m * (m - 1)) * static_cast<std::size_t>(p.L + 1);
  std::set<Vertex> used_vertices;
  std::set<Colour> used_colours;
  std::size_t max_avoid = 0;
  nlohmann::json steps = nlohmann::json::array();
  int index = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b, ++index) {
      const Vertex x = Z[static_cast<std::size_t>(a)];
      const Vertex y = Z[static_cast<std::size_t>(b)];
      AvoidSet M;
      M.vertices = used_vertices;
      M.vertices.insert(Z.begin(), Z.end());
      M.vertices.erase(x);
      M.vertices.erase(y);
      M.colours = used_colours;
      max_avoid = std::max(max_avoid, M.size());
      ConnectStats cs;
      RainbowPath path;
      try {
        path = rainbow_connect(g, st, oracle, x, y, M, p,
                               derive_seed(seed, "rooted", {static_cast<std::uint64_t>(index)}), &cs);
      } catch (const Error& e) {
        throw Error(e.kind(), "pair " + std::to_string(index) + " " + pair_name(x, y) + ": " + e.what());
      }
      used_vertices.insert(path.vertices.begin(), path.vertices.end());
      used_colours.insert(path.colours.begin(), path.colours.end());
      cert.pairs.emplace_back(a, b);
      cert.paths.push_back(path.vertices);
      cert.colours.push_back(path.colours);
      steps.push_back({{"avoid_size", M.size()},
                       {"reach_x", cs.reach_x},
                       {"reach_y", cs.reach_y},
                       {"pairs_tried", cs.pairs_tried},
                       {"colour_bad_skipped", cs.colour_bad_skipped},
                       {"not_good_skipped", cs.not_good_skipped},
                       {"rounds", cs.rounds},
                       {"u", cs.u},
                       {"v", cs.v},
                       {"length", path.length()}});
    }
  cert.params = params_json(p, g.num_vertices(), m, 1, seed, PathMode::Rainbow);
  cert.evidence = {{"expander", st.summary()},
                   {"pairs", oracle.summary()},
                   {"connectors", steps},
                   {"max_avoid_size", max_avoid},
                   {"avoid_budget", budget},
                   {"reach_sets_empirical", true}};
  const VerifyResult v = verify_subdivision(g, cert);
  if (!v) throw Error(ErrorKind::ViolationFound, std::string("self-check failed: ") + to_string(v.reason) + ", " + v.detail);
  return cert;
}

}  // namespace rainbow
