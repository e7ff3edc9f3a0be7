#include <doctest.h>

#include "oracles.hpp"
#include "rainbow/blowup.hpp"
#include "rainbow/error.hpp"
#include "rainbow/generators.hpp"

#include <cmath>
#include <sstream>

using namespace rainbow;

namespace {

// Codegree recount straight from the definition: for every r-set A and
// vertex u outside it, the copies (A, B) with u in B.
int recount_codegree(const KrrCollection& col) {
  std::map<std::pair<RSet, Vertex>, int> count;
  int best = 0;
  for (const KrrCopy& c : col.copies)
    for (int side = 0; side < 2; ++side) {
      const RSet& a = side ? c.b : c.a;
      const RSet& b = side ? c.a : c.b;
      for (Vertex u : b) best = std::max(best, ++count[{a, u}]);
    }
  return best;
}

bool is_biclique(const Graph& g, const KrrCopy& c) {
  for (Vertex a : c.a)
    for (Vertex b : c.b)
      if (!g.has_edge(a, b)) return false;
  return true;
}

int brute_intersection_count(const AuxiliaryGraph& aux) {
  int best = 0;
  const Graph& h = aux.graph;
  for (Vertex u = 0; u < h.num_vertices(); ++u)
    for (Vertex v = 0; v < h.num_vertices(); ++v) {
      int c = 0;
      for (Vertex w : h.neighbours(v)) {
        const RSet& ru = aux.rsets[static_cast<std::size_t>(u)];
        const RSet& rw = aux.rsets[static_cast<std::size_t>(w)];
        bool meet = false;
        for (Vertex x : ru) meet = meet || std::find(rw.begin(), rw.end(), x) != rw.end();
        c += meet;
      }
      best = std::max(best, c);
    }
  return best;
}

}  // namespace

TEST_CASE("K_{r,r} collections, worked examples") {
  Graph g = random_graph(30, 0.3, 2);
  KrrCollection edges = build_krr_collection(g, 1);
  CHECK(static_cast<int>(edges.copies.size()) == g.num_edges());

  Graph k44 = oracle::complete_bipartite(4, 4);
  KrrCollection col = build_krr_collection(k44, 2);
  CHECK(col.copies.size() == 36);
  CHECK_FALSE(col.budget_exhausted);
  for (const KrrCopy& c : col.copies) {
    CHECK(is_biclique(k44, c));
    CHECK(c.a < c.b);
  }

  AuxiliaryGraph aux = auxiliary_graph(col, 8);
  CHECK(aux.graph.num_vertices() == 12);
  CHECK(aux.graph.num_edges() == 36);
  for (const RSet& s : aux.rsets) CHECK(((s[0] < 4) == (s[1] < 4)));

  CHECK(auxiliary_graph(KrrCollection{}, 5).graph.num_vertices() == 0);
  CHECK(build_krr_collection(Graph(6), 2).copies.empty());

  KrrCollection cut = build_krr_collection(k44, 2, {kUnboundedCap, 10, 0, 0});
  CHECK(cut.budget_exhausted);
  CHECK(cut.copies.size() == 10);
}

TEST_CASE("r = 1 auxiliary graph is the input graph") {
  Graph g = random_graph(40, 0.2, 7);
  AuxiliaryGraph aux = auxiliary_graph(build_krr_collection(g, 1, {kUnboundedCap, 1'000'000, 3, 0}), 40);
  const std::vector<Vertex> keep = non_isolated_vertices(g);
  Graph trimmed = g.induced(keep);
  REQUIRE(aux.graph.num_vertices() == trimmed.num_vertices());
  for (std::size_t i = 0; i < keep.size(); ++i) CHECK(aux.rsets[i] == RSet{keep[i]});
  std::vector<Edge> a = aux.graph.edges(), b = trimmed.edges();
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(intersection_relation_check(aux, 1).max_count <= 1);
  CHECK(brute_intersection_count(aux) <= 1);
}

TEST_CASE("codegree cap holds under an independent recount") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Graph g = random_graph(40, 0.6, seed);
    for (int cap : {1, 2, 3, 5}) {
      KrrCollection col = build_krr_collection(g, 2, {cap, 2'000'000, seed, 0});
      CHECK(recount_codegree(col) <= cap);
      CHECK(max_codegree(col) == recount_codegree(col));
      for (const KrrCopy& c : col.copies) CHECK(is_biclique(g, c));
      // With t = r * cap the intersection relation is bounded as required.
      AuxiliaryGraph aux = auxiliary_graph(col, g.num_vertices());
      IntersectionReport rep = intersection_relation_check(aux, 2.0 * cap);
      CHECK(rep.margin >= 0);
      CHECK(rep.max_count == brute_intersection_count(aux));
    }
    KrrCollection pooled = build_krr_collection(g, 2, {4, 2'000'000, seed, 120});
    CHECK_FALSE(pooled.exhaustive);
    CHECK(pooled.pool_size == 120);
    CHECK(recount_codegree(pooled) <= 4);
  }
}

TEST_CASE("intersection relation on the K_{4,4} auxiliary graph") {
  AuxiliaryGraph aux = auxiliary_graph(build_krr_collection(oracle::complete_bipartite(4, 4), 2), 8);
  IntersectionReport rep = intersection_relation_check(aux, 5);
  CHECK(rep.max_count == brute_intersection_count(aux));
  CHECK(rep.max_count == 5);
  CHECK(rep.margin == 0);
}

TEST_CASE("collections serialise as 'A | B' lines") {
  KrrCollection col = build_krr_collection(oracle::complete_bipartite(3, 3), 2);
  std::ostringstream out;
  write_collection(out, col);
  CHECK(out.str().find(" | ") != std::string::npos);
  std::istringstream in(out.str());
  KrrCollection back = parse_collection(in);
  CHECK(back.r == 2);
  CHECK(back.copies == col.copies);
  std::istringstream bad("0 1 2\n");
  CHECK_THROWS_AS(parse_collection(bad), Error);
  std::istringstream overlap("0 1 | 1 2\n");
  CHECK_THROWS_AS(parse_collection(overlap), Error);
}

TEST_CASE("verify_blowup names the broken property") {
  Graph k44 = oracle::complete_bipartite(4, 4);
  BlowupCertificate c;
  c.r = 2;
  // Branch {0,1} and {2,3}; connector through {4,5}.
  c.base.branch = {0, 1};
  c.base.pairs = {{0, 1}};
  c.base.paths = {{0, 2, 1}};
  c.base.colours = {{0, 1}};
  c.rsets = {{0, {0, 1}}, {1, {2, 3}}, {2, {4, 5}}};
  CHECK(verify_blowup(k44, c));
  CHECK(expanded_host_edges(c).size() == 8);

  BlowupCertificate overlap = c;
  overlap.rsets[1] = {1, 3};
  CHECK(verify_blowup(k44, overlap).reason == VerifyFailure::RSetOverlap);

  std::vector<Edge> e = k44.edges();
  std::erase(e, Edge{1, 5});
  CHECK(verify_blowup(Graph(8, e), c).reason == VerifyFailure::MissingBicliqueEdge);

  BlowupCertificate wrong_ends = c;
  wrong_ends.base.paths = {{0, 2}};
  CHECK(verify_blowup(k44, wrong_ends).reason == VerifyFailure::WrongEndpoints);

  BlowupCertificate r1;
  r1.r = 1;
  r1.base.branch = {0, 1};
  r1.base.pairs = {{0, 1}};
  r1.base.paths = {{0, 1}};
  r1.rsets = {{0, {0}}, {1, {4}}};
  CHECK(verify_blowup(k44, r1));

  BlowupCertificate back = blowup_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(back).dump() == to_json(c).dump());
}

TEST_CASE("accepted samples have pairwise disjoint interior r-sets") {
  Graph g = random_graph(60, 0.8, 5);
  KrrCollection col = build_krr_collection(g, 2, {4, 2'000'000, 5, 150});
  AuxiliaryGraph aux = auxiliary_graph(col, 60);
  REQUIRE(aux.graph.num_edges() > 0);
  const ClosedWalkRule rule = rset_rule(aux.rsets, 60);
  auto bad = [&](const Walk& a, const Walk& b) {
    Walk closed(a);
    closed.insert(closed.end(), b.rbegin() + 1, b.rend());
    return is_degenerate(aux.graph, rule, closed);
  };
  int accepted = 0;
  const Vertex x = aux.graph.edges()[0].u;
  for (Vertex y = 0; y < aux.graph.num_vertices() && accepted < 5; ++y) {
    if (y == x || WalkSampler(aux.graph, y, 2).count_from(x) == 0) continue;
    std::vector<Walk> ws;
    try {
      ws = theta_sampler(aux.graph, x, y, 2, 3, bad, y, 20);
    } catch (const Error&) {
      continue;
    }
    ++accepted;
    std::vector<Vertex> interior;
    for (const Walk& w : ws) interior.insert(interior.end(), w.begin() + 1, w.end() - 1);
    for (std::size_t i = 0; i < interior.size(); ++i)
      for (std::size_t j = i + 1; j < interior.size(); ++j) {
        const RSet& a = aux.rsets[static_cast<std::size_t>(interior[i])];
        const RSet& b = aux.rsets[static_cast<std::size_t>(interior[j])];
        CHECK(interior[i] != interior[j]);
        for (Vertex h : a) CHECK(std::find(b.begin(), b.end(), h) == b.end());
      }
  }
  CHECK(accepted > 0);
}

TEST_CASE("r = 1 blow-up search matches the uncoloured search") {
  SearchParams p;
  BlowupOptions opt;
  opt.check_hom = false;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Graph g = random_graph(120, 0.3, seed);
    SubdivisionCertificate plain = find_subdivision_uncoloured(g, 3, p, seed);
    BlowupCertificate blow = find_blowup_subdivision(g, 1, 3, p, seed, opt);
    CHECK(verify_blowup(g, blow));
    CHECK(expanded_host_edges(blow) == expanded_edges(plain));
  }
}

TEST_CASE("blow-up searches verify") {
  SearchParams p;
  p.s = desk_blowup_s(3, 2, p.k, p.scale);
  BlowupOptions opt;
  opt.collection.pool = 300;
  opt.collection.cap = 6;
  int successes = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Graph g = random_graph(150, 0.8, seed);
    BlowupCertificate c;
    try {
      c = find_blowup_subdivision(g, 2, 3, p, seed, opt);
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::NoCliqueOfGoodPairs || e.kind() == ErrorKind::RoundsExhausted));
      continue;
    }
    ++successes;
    CHECK(verify_blowup(g, c));
    CHECK(c.params["t"] == 12.0);
    CHECK(c.evidence["intersection"]["margin"].get<double>() >= 0);
    const auto& hom = c.evidence["hom_star"];
    if (!hom.contains("skipped")) CHECK(hom["holds"].get<bool>());
    // Host check independent of the library verifier.
    std::set<Vertex> hosts;
    std::size_t used = 0;
    std::set<Vertex> aux_used(c.base.branch.begin(), c.base.branch.end());
    for (const auto& path : c.base.paths) aux_used.insert(path.begin(), path.end());
    for (Vertex v : aux_used) {
      used += c.rsets.at(v).size();
      hosts.insert(c.rsets.at(v).begin(), c.rsets.at(v).end());
    }
    CHECK(hosts.size() == used);
    for (const Edge& e : expanded_host_edges(c)) CHECK(g.has_edge(e.u, e.v));
  }
  CHECK(successes >= 2);
}

TEST_CASE("hom** counts closed walks with meeting r-sets") {
  AuxiliaryGraph aux = auxiliary_graph(build_krr_collection(oracle::complete_bipartite(4, 4), 2), 8);
  const ClosedWalkRule rule = rset_rule(aux.rsets, 8);
  const Graph& h = aux.graph;
  for (int k = 2; k <= 3; ++k) {
    const double d = average_degree_value(h);
    const double t = 5;
    const double S = std::sqrt(d / (1024.0 * k * k * k * t * 1.0 * std::pow(h.num_vertices(), 1.0 / k)));
    DegenerateBoundReport rep = degenerate_fraction_bound_check(h, rule, k, S, d, 1.0, true);
    BigInt brute = 0;
    for (Vertex x = 0; x < h.num_vertices(); ++x)
      for (Vertex y = 0; y < h.num_vertices(); ++y)
        for (const auto& w : oracle::closed_walks(h, x, y, k)) {
          bool meet = false;
          for (int i = 0; i < 2 * k && !meet; ++i)
            for (int j = i + 1; j < 2 * k && !meet; ++j) {
              const RSet& a = aux.rsets[static_cast<std::size_t>(w[static_cast<std::size_t>(i)])];
              const RSet& b = aux.rsets[static_cast<std::size_t>(w[static_cast<std::size_t>(j)])];
              for (Vertex v : a) meet = meet || std::find(b.begin(), b.end(), v) != b.end();
            }
          brute += meet;
        }
    CHECK(rep.hom_star == brute);
    CHECK(rep.margin >= 0);
  }
}
