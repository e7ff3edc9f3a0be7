#include "rainbow/blowup.hpp"

#include "rainbow/error.hpp"
#include "rainbow/seed.hpp"
#include "rainbow/walkcount.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace rainbow {

namespace {

std::vector<Vertex> common_neighbourhood(const Graph& g, const RSet& a) {
  std::vector<Vertex> common(g.neighbours(a[0]).begin(), g.neighbours(a[0]).end());
  for (std::size_t i = 1; i < a.size() && !common.empty(); ++i) {
    std::vector<Vertex> next;
    const auto nb = g.neighbours(a[i]);
    std::set_intersection(common.begin(), common.end(), nb.begin(), nb.end(), std::back_inserter(next));
    common.swap(next);
  }
  return common;
}

// Calls f on every r-subset of `items` (sorted input gives sorted subsets)
// until f returns false.
template <class F>
bool for_each_subset(const std::vector<Vertex>& items, int r, F&& f) {
  const int n = static_cast<int>(items.size());
  if (r > n) return true;
  std::vector<int> idx(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
  RSet s(static_cast<std::size_t>(r));
  while (true) {
    for (int i = 0; i < r; ++i) s[static_cast<std::size_t>(i)] = items[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    if (!f(s)) return false;
    int i = r - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - r + i) --i;
    if (i < 0) return true;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

bool meets(const RSet& a, const RSet& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    a[i] < b[j] ? ++i : ++j;
  }
  return false;
}

using Incidence = std::map<std::pair<RSet, Vertex>, int>;

}  // namespace

KrrCollection build_krr_collection(const Graph& g, int r, const KrrOptions& opt) {
  if (r < 1) throw Error(ErrorKind::PreconditionViolated, "r must be at least 1");
  if (opt.cap < 1) throw Error(ErrorKind::PreconditionViolated, "cap must be positive");
  const int n = g.num_vertices();
  KrrCollection col;
  col.r = r;
  col.cap = opt.cap;
  col.exhaustive = opt.pool == 0;
  if (n > 0 && g.num_edges() > 0) {
    const double alpha = g.num_edges() / std::pow(n, 2.0 - 1.0 / r);
    col.benchmark = std::pow(alpha, r * r) * std::pow(n, r);
  }

  std::vector<KrrCopy> candidates;
  auto offer = [&](const RSet& a, const RSet& b) {
    if (++col.examined > opt.budget) {
      col.budget_exhausted = true;
      return false;
    }
    candidates.push_back({a, b});
    return true;
  };

  if (col.exhaustive) {
    std::vector<Vertex> all(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
    for_each_subset(all, r, [&](const RSet& a) {
      ++col.pool_size;
      const std::vector<Vertex> common = common_neighbourhood(g, a);
      return for_each_subset(common, r, [&](const RSet& b) { return a < b ? offer(a, b) : true; });
    });
  } else {
    if (opt.pool < 0) throw Error(ErrorKind::PreconditionViolated, "pool size must be non-negative");
    if (r > n) throw Error(ErrorKind::PreconditionViolated, "r exceeds the vertex count");
    Rng rng = make_rng(derive_seed(opt.seed, "krr-pool"));
    std::set<RSet> pool;
    // Distinct r-sets; the attempt bound only matters when the pool asks for
    // nearly every r-set of a tiny graph.
    for (std::int64_t tries = 0; static_cast<int>(pool.size()) < opt.pool && tries < 100LL * opt.pool; ++tries) {
      std::set<Vertex> s;
      while (static_cast<int>(s.size()) < r) s.insert(static_cast<Vertex>(uniform_below(rng, static_cast<std::uint64_t>(n))));
      pool.emplace(s.begin(), s.end());
    }
    const std::vector<RSet> sides(pool.begin(), pool.end());
    col.pool_size = static_cast<int>(sides.size());
    std::vector<char> in_common(static_cast<std::size_t>(n));
    bool going = true;
    for (std::size_t i = 0; i < sides.size() && going; ++i) {
      std::fill(in_common.begin(), in_common.end(), 0);
      for (Vertex v : common_neighbourhood(g, sides[i])) in_common[static_cast<std::size_t>(v)] = 1;
      for (std::size_t j = i + 1; j < sides.size() && going; ++j)
        if (std::all_of(sides[j].begin(), sides[j].end(), [&](Vertex v) { return in_common[static_cast<std::size_t>(v)]; }))
          going = offer(sides[i], sides[j]);
    }
  }

  Rng rng = make_rng(derive_seed(opt.seed, "krr-order"));
  for (std::size_t i = candidates.size(); i > 1; --i)
    std::swap(candidates[i - 1], candidates[uniform_below(rng, i)]);
  Incidence inc;
  for (KrrCopy& c : candidates) {
    bool fits = true;
    if (opt.cap != kUnboundedCap) {
      for (Vertex u : c.b) fits = fits && inc[{c.a, u}] < opt.cap;
      for (Vertex u : c.a) fits = fits && inc[{c.b, u}] < opt.cap;
    }
    if (!fits) {
      ++col.rejected_by_cap;
      continue;
    }
    if (opt.cap != kUnboundedCap) {
      for (Vertex u : c.b) ++inc[{c.a, u}];
      for (Vertex u : c.a) ++inc[{c.b, u}];
    }
    col.copies.push_back(std::move(c));
  }
  return col;
}

int max_codegree(const KrrCollection& col) {
  Incidence inc;
  int best = 0;
  for (const KrrCopy& c : col.copies) {
    for (Vertex u : c.b) best = std::max(best, ++inc[{c.a, u}]);
    for (Vertex u : c.a) best = std::max(best, ++inc[{c.b, u}]);
  }
  return best;
}

void write_collection(std::ostream& out, const KrrCollection& col) {
  for (const KrrCopy& c : col.copies) {
    for (std::size_t i = 0; i < c.a.size(); ++i) out << (i ? " " : "") << c.a[i];
    out << " |";
    for (Vertex v : c.b) out << ' ' << v;
    out << '\n';
  }
}

KrrCollection parse_collection(std::istream& in) {
  KrrCollection col;
  col.r = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    const auto bar = line.find('|');
    if (bar == std::string::npos) throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": missing '|'");
    auto read_side = [&](const std::string& text) {
      std::istringstream ss(text);
      RSet s;
      Vertex v;
      while (ss >> v) s.push_back(v);
      if (!ss.eof()) throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": bad vertex");
      std::sort(s.begin(), s.end());
      return s;
    };
    KrrCopy c{read_side(line.substr(0, bar)), read_side(line.substr(bar + 1))};
    if (c.a.empty() || c.a.size() != c.b.size() || meets(c.a, c.b) ||
        std::adjacent_find(c.a.begin(), c.a.end()) != c.a.end() || std::adjacent_find(c.b.begin(), c.b.end()) != c.b.end())
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": sides must be disjoint r-sets");
    if (col.r == 0) col.r = static_cast<int>(c.a.size());
    if (static_cast<int>(c.a.size()) != col.r)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": mixed r");
    if (c.b < c.a) std::swap(c.a, c.b);
    col.copies.push_back(std::move(c));
  }
  if (col.r == 0) col.r = 1;
  return col;
}

AuxiliaryGraph auxiliary_graph(const KrrCollection& col, int universe) {
  AuxiliaryGraph aux;
  aux.universe = universe;
  std::set<RSet> sets;
  for (const KrrCopy& c : col.copies) {
    sets.insert(c.a);
    sets.insert(c.b);
  }
  aux.rsets.assign(sets.begin(), sets.end());
  auto id = [&](const RSet& s) {
    return static_cast<Vertex>(std::lower_bound(aux.rsets.begin(), aux.rsets.end(), s) - aux.rsets.begin());
  };
  std::vector<Edge> edges;
  for (const KrrCopy& c : col.copies) {
    const Vertex a = id(c.a), b = id(c.b);
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  aux.graph = Graph(static_cast<int>(aux.rsets.size()), std::move(edges));
  return aux;
}

IntersectionReport intersection_relation_check(const AuxiliaryGraph& aux, double t) {
  const Graph& h = aux.graph;
  const int n = h.num_vertices();
  IntersectionReport rep;
  rep.t = t;
  // Per v: host vertex -> neighbours of v containing it; then for each u the
  // union over the host vertices of R_u, deduplicated by stamping.
  std::vector<int> stamp(static_cast<std::size_t>(n), -1);
  int clock = 0;
  std::map<Vertex, std::vector<Vertex>> holders;
  for (Vertex v = 0; v < n; ++v) {
    holders.clear();
    for (Vertex w : h.neighbours(v))
      for (Vertex x : aux.rsets[static_cast<std::size_t>(w)]) holders[x].push_back(w);
    for (Vertex u = 0; u < n; ++u) {
      ++clock;
      int count = 0;
      for (Vertex x : aux.rsets[static_cast<std::size_t>(u)]) {
        auto it = holders.find(x);
        if (it == holders.end()) continue;
        for (Vertex w : it->second)
          if (stamp[static_cast<std::size_t>(w)] != clock) {
            stamp[static_cast<std::size_t>(w)] = clock;
            ++count;
          }
      }
      if (count > rep.max_count) {
        rep.max_count = count;
        rep.u = u;
        rep.v = v;
      }
    }
  }
  rep.margin = t - rep.max_count;
  return rep;
}

// ---------------------------------------------------------------- pipeline

BlowupCertificate find_blowup_subdivision(const Graph& g, int r, int m, const SearchParams& p, std::uint64_t seed,
                                          const BlowupOptions& opt) {
  if (r < 1) throw Error(ErrorKind::PreconditionViolated, "r must be at least 1");
  KrrOptions kopt = opt.collection;
  kopt.seed = derive_seed(seed, "krr");
  const KrrCollection col = build_krr_collection(g, r, kopt);
  const AuxiliaryGraph aux = auxiliary_graph(col, g.num_vertices());
  if (aux.graph.num_edges() == 0) throw Error(ErrorKind::ThresholdUnreachable, "no copies of K_{r,r} admitted");

  double t = opt.t;
  std::string t_source = "given";
  if (t <= 0 && col.cap != kUnboundedCap) {
    t = static_cast<double>(r) * col.cap;
    t_source = "r * cap";
  }
  IntersectionReport rel = intersection_relation_check(aux, t > 0 ? t : 0);
  if (t <= 0) {
    t = rel.max_count;
    rel = intersection_relation_check(aux, t);
    t_source = "observed";
  }
  if (rel.margin < 0)
    throw Error(ErrorKind::PreconditionViolated, "intersection relation exceeds t = " + std::to_string(t) + " (count " +
                                                     std::to_string(rel.max_count) + ")");

  const SearchGraph sg{colour_by_edge_id(aux.graph), PathMode::RSetDisjoint, aux.rsets, g.num_vertices()};
  BlowupCertificate cert;
  cert.r = r;
  cert.base = find_subdivision_in(sg, m, p, seed);
  auto remember = [&](Vertex v) { cert.rsets.emplace(v, aux.rsets[static_cast<std::size_t>(v)]); };
  for (Vertex z : cert.base.branch) remember(z);
  for (const auto& path : cert.base.paths)
    for (Vertex v : path) remember(v);

  nlohmann::json hom = {{"attempted", opt.check_hom}};
  if (opt.check_hom) {
    // The engine's stage is rebuilt from the same derived seed.
    const ExpanderStage st = prepare_expander(sg, p, derive_seed(seed, "expander"));
    const Graph& f = st.graph();
    const double d = average_degree_value(f);
    const double mu = d > 0 ? f.max_degree() / d : 0;
    const double big_n = f.num_vertices();
    const double S = std::sqrt(d / (1024.0 * std::pow(p.k, 3) * std::max(t, 1.0) * mu * std::pow(big_n, 1.0 / p.k)));
    hom["S"] = S;
    try {
      const DegenerateBoundReport rep = degenerate_fraction_bound_check(f, st.rule(), p.k, S, d, mu, true, opt.hom_budget);
      hom["hom"] = rep.hom.str();
      hom["hom_star"] = rep.hom_star.str();
      hom["margin"] = rep.margin;
      hom["holds"] = rep.margin >= 0;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BudgetExceeded) throw;
      hom["skipped"] = "enumeration budget " + std::to_string(opt.hom_budget) + " exceeded";
    }
  }

  cert.params = cert.base.params;
  cert.params["r"] = r;
  cert.params["cap"] = col.cap == kUnboundedCap ? nlohmann::json("unbounded") : nlohmann::json(col.cap);
  cert.params["t"] = t;
  cert.params["t_source"] = t_source;
  cert.params["paper"] = to_json(param_calculator(std::max(2, g.num_vertices()), p.eps, m, r, p.scale))["asymptotic"];
  cert.evidence = {{"collection",
                    {{"copies", col.copies.size()},
                     {"examined", col.examined},
                     {"rejected_by_cap", col.rejected_by_cap},
                     {"budget_exhausted", col.budget_exhausted},
                     {"pool_size", col.pool_size},
                     {"exhaustive", col.exhaustive},
                     {"benchmark", col.benchmark},
                     {"max_codegree", max_codegree(col)}}},
                   {"auxiliary", {{"vertices", aux.graph.num_vertices()}, {"edges", aux.graph.num_edges()}}},
                   {"intersection", {{"max_count", rel.max_count}, {"t", t}, {"margin", rel.margin}}},
                   {"hom_star", hom},
                   {"search", cert.base.evidence}};
  const VerifyResult v = verify_blowup(g, cert);
  if (!v) throw Error(ErrorKind::ViolationFound, std::string("self-check failed: ") + to_string(v.reason) + ", " + v.detail);
  return cert;
}

VerifyResult verify_blowup(const Graph& g, const BlowupCertificate& cert) {
  auto fail = [](VerifyFailure f, std::string d) { return VerifyResult{f, std::move(d)}; };
  const SubdivisionCertificate& b = cert.base;
  const std::size_t m = b.branch.size();
  if (m < 2 || std::set<Vertex>(b.branch.begin(), b.branch.end()).size() != m)
    return fail(VerifyFailure::Shape, "need at least two distinct branch vertices");
  if (b.pairs.size() != m * (m - 1) / 2 || b.paths.size() != b.pairs.size())
    return fail(VerifyFailure::Shape, "need one connector per pair of branch vertices");
  std::set<std::pair<int, int>> seen;
  for (auto [x, y] : b.pairs)
    if (x == y || x < 0 || y < 0 || static_cast<std::size_t>(std::max(x, y)) >= m || !seen.insert(std::minmax(x, y)).second)
      return fail(VerifyFailure::Shape, "pair list does not cover every branch pair once");
  auto rset = [&](Vertex v) -> const RSet* {
    auto it = cert.rsets.find(v);
    return it == cert.rsets.end() ? nullptr : &it->second;
  };
  // Every auxiliary vertex occurrence: branch vertices once, interiors per path.
  std::vector<Vertex> used(b.branch.begin(), b.branch.end());
  for (std::size_t i = 0; i < b.paths.size(); ++i) {
    const auto& p = b.paths[i];
    const std::string tag = "connector " + std::to_string(i);
    if (p.size() < 2) return fail(VerifyFailure::Shape, tag + " malformed");
    const Vertex za = b.branch[static_cast<std::size_t>(b.pairs[i].first)];
    const Vertex zb = b.branch[static_cast<std::size_t>(b.pairs[i].second)];
    if (!((p.front() == za && p.back() == zb) || (p.front() == zb && p.back() == za)))
      return fail(VerifyFailure::WrongEndpoints, tag + " does not join its branch pair");
    if (b.length_bound > 0 && static_cast<int>(p.size()) - 1 > b.length_bound)
      return fail(VerifyFailure::TooLong, tag + " is longer than " + std::to_string(b.length_bound));
    if (std::set<Vertex>(p.begin(), p.end()).size() != p.size())
      return fail(VerifyFailure::RepeatedVertex, tag + " repeats an auxiliary vertex");
    for (Vertex v : p) {
      const RSet* s = rset(v);
      if (!s || static_cast<int>(s->size()) != cert.r)
        return fail(VerifyFailure::Shape, tag + ": no r-set recorded for " + std::to_string(v));
      for (Vertex h : *s)
        if (!g.valid(h)) return fail(VerifyFailure::Shape, tag + ": host vertex out of range");
    }
    for (std::size_t j = 1; j < p.size(); ++j)
      for (Vertex a : *rset(p[j - 1]))
        for (Vertex c : *rset(p[j]))
          if (!g.has_edge(a, c))
            return fail(VerifyFailure::MissingBicliqueEdge,
                        tag + " lacks host edge (" + std::to_string(a) + ", " + std::to_string(c) + ")");
    for (std::size_t j = 1; j + 1 < p.size(); ++j) used.push_back(p[j]);
  }
  for (Vertex z : b.branch)
    if (!rset(z)) return fail(VerifyFailure::Shape, "no r-set recorded for branch vertex " + std::to_string(z));
  std::map<Vertex, Vertex> owner;  // host vertex -> auxiliary vertex using it
  std::set<Vertex> distinct;
  for (Vertex v : used) {
    if (!distinct.insert(v).second)
      return fail(VerifyFailure::VertexCollision, "auxiliary vertex " + std::to_string(v) + " used twice");
    for (Vertex h : *rset(v)) {
      auto [it, fresh] = owner.emplace(h, v);
      if (!fresh)
        return fail(VerifyFailure::RSetOverlap, "r-sets of " + std::to_string(it->second) + " and " + std::to_string(v) +
                                                    " share host vertex " + std::to_string(h));
    }
  }
  return {};
}

std::vector<Edge> expanded_host_edges(const BlowupCertificate& cert) {
  std::vector<Edge> out;
  for (const auto& p : cert.base.paths)
    for (std::size_t j = 1; j < p.size(); ++j)
      for (Vertex a : cert.rsets.at(p[j - 1]))
        for (Vertex c : cert.rsets.at(p[j])) out.push_back({std::min(a, c), std::max(a, c)});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::json to_json(const BlowupCertificate& c) {
  nlohmann::json rsets = nlohmann::json::object();
  for (const auto& [v, s] : c.rsets) rsets[std::to_string(v)] = s;
  return {{"r", c.r}, {"base", to_json(c.base)}, {"rsets", rsets}, {"params", c.params}, {"evidence", c.evidence}};
}

BlowupCertificate blowup_from_json(const nlohmann::json& j) {
  try {
    BlowupCertificate c;
    c.r = j.at("r").get<int>();
    c.base = subdivision_from_json(j.at("base"));
    for (const auto& [key, s] : j.at("rsets").items()) c.rsets.emplace(std::stoi(key), s.get<RSet>());
    c.params = j.value("params", nlohmann::json::object());
    c.evidence = j.value("evidence", nlohmann::json::object());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("blow-up certificate JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorKind::ParseError, std::string("blow-up certificate JSON: ") + e.what());
  }
}

}  // namespace rainbow
