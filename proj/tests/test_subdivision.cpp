#include <doctest.h>

#include "oracles.hpp"
#include "rainbow/error.hpp"
#include "rainbow/generators.hpp"
#include "rainbow/params.hpp"
#include "rainbow/subdivision.hpp"

#include <cmath>

using namespace rainbow;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::SpecError;
}

bool rainbow_walk_bad(const ColouredGraph& g, const Walk& a, const Walk& b) {
  Walk closed(a);
  closed.insert(closed.end(), b.rbegin() + 1, b.rend());
  return !oracle::is_rainbow_cycle(g, closed);
}

// Two K_5 blocks {0..4} and {5..9} joined by the single edge 4-5.
ColouredGraph bridged_blocks() {
  std::vector<Edge> e;
  for (int b = 0; b < 10; b += 5)
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) e.push_back({b + i, b + j});
  e.push_back({4, 5});
  return oracle::fully_rainbow(Graph(10, e));
}

}  // namespace

TEST_CASE("shortcutting keeps only deletions") {
  RainbowPath w{{0, 1, 2, 1, 3}, {10, 11, 12, 13}};
  RainbowPath p = shortcut_walk(w);
  CHECK(p.vertices == std::vector<Vertex>{0, 1, 3});
  CHECK(p.colours == std::vector<Colour>{10, 13});

  RainbowPath loop{{0, 1, 2, 0, 4, 2, 5}, {1, 2, 3, 4, 5, 6}};
  p = shortcut_walk(loop);
  CHECK(p.vertices == std::vector<Vertex>{0, 4, 2, 5});
  CHECK(p.colours == std::vector<Colour>{4, 5, 6});

  ColouredGraph c6 = oracle::fully_rainbow(oracle::cycle_graph(6));
  CHECK(is_rainbow_path(c6, {0, 1, 2}));
  CHECK_FALSE(is_rainbow_path(c6, {0, 2}));
  CHECK_FALSE(is_rainbow_path(c6, {0, 1, 0}));
  CHECK(kind_of([&] { make_rainbow_path(c6, {0, 1, 0}); }) == ErrorKind::ViolationFound);
  RainbowPath ok = make_rainbow_path(c6, {5, 0, 1});
  CHECK(ok.length() == 2);
  CHECK(ok.colours == std::vector<Colour>{*c6.colour(5, 0), *c6.colour(0, 1)});
}

TEST_CASE("theta sampler worked examples") {
  ColouredGraph c6 = oracle::fully_rainbow(oracle::cycle_graph(6));
  auto bad = [&](const Walk& a, const Walk& b) { return rainbow_walk_bad(c6, a, b); };

  // A single walk has no pairs to check.
  ThetaStats st;
  auto one = theta_sampler(c6.graph(), 0, 3, 3, 1, bad, 5, 1, {}, &st);
  CHECK(one.size() == 1);
  CHECK(st.rounds == 1);
  CHECK(st.pairs_checked == 0);

  // Only the two opposite arcs form a rainbow 6-cycle.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto two = theta_sampler(c6.graph(), 0, 3, 3, 2, bad, seed, 64);
    REQUIRE(two.size() == 2);
    CHECK(two[0] != two[1]);
    CHECK(std::set<Walk>{two[0], two[1]} == std::set<Walk>{{0, 1, 2, 3}, {0, 5, 4, 3}});
  }

  ColouredGraph q3 = hypercube_coloured(3);
  auto qbad = [&](const Walk& a, const Walk& b) { return rainbow_walk_bad(q3, a, b); };
  CHECK(kind_of([&] { theta_sampler(q3.graph(), 0, 3, 2, 2, qbad, 1, 50); }) == ErrorKind::RoundsExhausted);
  CHECK(kind_of([&] { theta_sampler(c6.graph(), 0, 1, 2, 2, bad, 1, 5); }) == ErrorKind::NoWalk);
}

TEST_CASE("theta sampler acceptance rate against the exact bad share") {
  ColouredGraph g = greedy_proper_colouring(random_graph(40, 0.5, 3), 4);
  const ClosedWalkRule rule = rainbow_rule(g);
  const int k = 2;
  const int s = 2;
  // First pair with a small but positive exact bad share.
  Vertex x = -1, y = -1;
  double b = 1;
  for (Vertex u = 0; u < g.num_vertices() && x < 0; ++u)
    for (Vertex v = u + 1; v < g.num_vertices(); ++v) {
      DegenerateStats ds = count_degenerate_exact(g, u, v, k);
      if (ds.hom > 0 && ds.fraction > 0 && ds.fraction < 1.0 / (s * s)) {
        x = u, y = v, b = ds.fraction;
        break;
      }
    }
  REQUIRE(x >= 0);
  auto bad = [&](const Walk& p, const Walk& q) {
    Walk closed(p);
    closed.insert(closed.end(), q.rbegin() + 1, q.rend());
    return is_degenerate(g.graph(), rule, closed);
  };
  const int trials = 600;
  int first_round = 0;
  int within_ten = 0;
  for (int t = 0; t < trials; ++t) {
    ThetaStats st;
    try {
      theta_sampler(g.graph(), x, y, k, s, bad, derive_seed(99, "trial", {static_cast<std::uint64_t>(t)}), 10, {}, &st);
      ++within_ten;
      first_round += st.rounds == 1;
    } catch (const Error&) {
    }
  }
  const double union_bound = 0.5 * s * (s - 1) * b;
  const double slack = 4 * std::sqrt(union_bound * (1 - union_bound) / trials) + 1.0 / trials;
  CHECK(static_cast<double>(first_round) / trials >= 1 - union_bound - slack);
  CHECK(static_cast<double>(within_ten) / trials >= 1 - std::pow(union_bound, 10) - slack);
}

TEST_CASE("disjoint rainbow paths") {
  ColouredGraph c6 = oracle::fully_rainbow(oracle::cycle_graph(6));
  auto arcs = disjoint_rainbow_paths(c6, 0, 3, 3, 2, 11);
  REQUIRE(arcs.size() == 2);
  CHECK(arcs[0].vertices != arcs[1].vertices);

  ColouredGraph k22 = oracle::fully_rainbow(oracle::complete_bipartite(2, 2));
  auto two = disjoint_rainbow_paths(k22, 0, 1, 2, 2, 3);
  REQUIRE(two.size() == 2);
  CHECK(std::set<Vertex>{two[0].vertices[1], two[1].vertices[1]} == std::set<Vertex>{2, 3});
  std::set<Colour> cs(two[0].colours.begin(), two[0].colours.end());
  cs.insert(two[1].colours.begin(), two[1].colours.end());
  CHECK(cs.size() == 4);

  CHECK(kind_of([&] { disjoint_rainbow_paths(c6, 0, 3, 3, 3, 1, 100); }) == ErrorKind::RoundsExhausted);

  // Every accepted sample is pairwise colour-disjoint and internally disjoint.
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    ColouredGraph g = greedy_proper_colouring(random_graph(60, 0.5, seed), seed);
    ThetaStats st;
    std::vector<RainbowPath> ps;
    try {
      ps = disjoint_rainbow_paths(g, 0, 1, 4, 3, seed, 200, &st);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::RoundsExhausted);
      continue;
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
      CHECK(oracle::is_rainbow_subdivision(g, {0, 1}, {ps[i].vertices}));
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        for (Colour c : ps[i].colours)
          CHECK(std::find(ps[j].colours.begin(), ps[j].colours.end(), c) == ps[j].colours.end());
        for (std::size_t a = 1; a + 1 < ps[i].vertices.size(); ++a)
          CHECK(std::find(ps[j].vertices.begin(), ps[j].vertices.end(), ps[i].vertices[a]) == ps[j].vertices.end());
      }
    }
  }
}

TEST_CASE("reach sets worked examples") {
  ColouredGraph star = oracle::fully_rainbow(oracle::complete_bipartite(1, 5));
  for (int ell = 0; ell < 3; ++ell) CHECK(rainbow_reach(star, 0, {}, ell).reached.size() == 6);

  ColouredGraph q3 = hypercube_coloured(3);
  for (Vertex x = 0; x < 8; ++x) CHECK(rainbow_reach(q3, x, {}, 3).reached.size() == 8);

  ColouredGraph c6 = oracle::fully_rainbow(oracle::cycle_graph(6));
  ReachSet r = rainbow_reach(c6, 2, {}, 2);
  CHECK(r.reached.size() == 6);
  CHECK(rainbow_reach(c6, 2, {}, 0).reached.size() == 3);
  CHECK(r.path_of.at(5).length() == 3);

  AvoidSet f;
  f.vertices.insert(1);
  f.colours.insert(*c6.colour(2, 3));
  ReachSet blocked = rainbow_reach(c6, 2, f, 5);
  CHECK(blocked.reached == std::vector<Vertex>{2});
}

TEST_CASE("reach set paths are rainbow, short, clear of F and monotone in ell") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    ColouredGraph g = greedy_proper_colouring(random_graph(40, 0.12, seed), seed);
    AvoidSet f;
    f.vertices = {3, 7};
    f.colours = {0, 5};
    std::vector<Vertex> prev;
    for (int ell = 0; ell <= 5; ++ell) {
      ReachSet r = rainbow_reach(g, 0, f, ell);
      CHECK(std::includes(r.reached.begin(), r.reached.end(), prev.begin(), prev.end()));
      prev = r.reached;
      std::map<Colour, int> usage;
      for (Vertex u : r.reached) {
        const RainbowPath& p = r.path_of.at(u);
        CHECK(p.front() == 0);
        CHECK(p.back() == u);
        CHECK(p.length() <= ell + 1);
        CHECK(is_rainbow_path(g, p.vertices));
        for (std::size_t i = 1; i < p.vertices.size(); ++i) {
          CHECK_FALSE(f.has_vertex(p.vertices[i]));
          CHECK(*g.colour(p.vertices[i - 1], p.vertices[i]) == p.colours[i - 1]);
        }
        for (Colour c : p.colours) {
          CHECK_FALSE(f.has_colour(c));
          ++usage[c];
        }
      }
      CHECK(usage == r.colour_usage);
    }
  }
}

TEST_CASE("robust reach sets respect the colour-usage cap") {
  ColouredGraph g = bridged_blocks();
  const Colour bridge = *g.colour(4, 5);
  ReachSet plain = rainbow_reach(g, 0, {}, 3);
  CHECK(plain.reached.size() == 10);
  CHECK(plain.colour_usage.at(bridge) == 5);

  for (int q : {1, 2, 3, 4}) {
    ReachSet r = rainbow_reach_robust(g, 0, {}, 3, q);
    const double cap = 10.0 / q;
    for (const auto& [c, uses] : r.colour_usage) CHECK(uses <= cap);
    CHECK(r.max_bad_colours <= static_cast<std::size_t>(2 * q * 3));
    if (q >= 3) {
      // The bridge cannot carry all five far vertices any more.
      CHECK(r.reached.size() < 10);
      CHECK_FALSE(r.bad_colours.empty());
    } else if (q == 1) {
      CHECK(r.iterations == 1);
      CHECK(r.reached == plain.reached);
    }
  }
  // With ell = 0 the bad-colour budget 2 q ell is empty, so any saturation is fatal.
  CHECK(kind_of([&] { rainbow_reach_robust(g, 0, {}, 0, 20); }) == ErrorKind::IterationCapExceeded);
}

TEST_CASE("verify_subdivision names the broken property") {
  // K_4 with its 1-factorisation colouring: 01,23 -> 0; 02,13 -> 1; 03,12 -> 2.
  Graph k4 = oracle::complete_graph(4);
  std::vector<Colour> cols;
  for (const Edge& e : k4.edges()) {
    const bool first = (e.u == 0 && e.v == 1) || (e.u == 2 && e.v == 3);
    const bool second = (e.u == 0 && e.v == 2) || (e.u == 1 && e.v == 3);
    cols.push_back(first ? 0 : second ? 1 : 2);
  }
  ColouredGraph g(k4, cols);
  ColouredGraph r = oracle::fully_rainbow(oracle::complete_graph(6));
  auto cert_of = [](const ColouredGraph& cg, std::vector<Vertex> z, std::vector<std::vector<Vertex>> paths) {
    SubdivisionCertificate c;
    c.branch = std::move(z);
    const int m = static_cast<int>(c.branch.size());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) c.pairs.emplace_back(a, b);
    for (const auto& p : paths) {
      std::vector<Colour> cs;
      for (std::size_t i = 1; i < p.size(); ++i) cs.push_back(cg.colour(p[i - 1], p[i]).value_or(-1));
      c.colours.push_back(cs);
    }
    c.paths = std::move(paths);
    return c;
  };

  SubdivisionCertificate valid = cert_of(r, {0, 1}, {{0, 2, 1}});
  CHECK(verify_subdivision(r, valid));
  valid.length_bound = 1;
  CHECK(verify_subdivision(r, valid).reason == VerifyFailure::TooLong);

  CHECK(verify_subdivision(g, cert_of(g, {0, 1, 2}, {{0, 1}, {0, 3, 2}, {1, 2}})).reason ==
        VerifyFailure::ColourCollision);
  ColouredGraph c6 = oracle::fully_rainbow(oracle::cycle_graph(6));
  CHECK(verify_subdivision(c6, cert_of(c6, {0, 2}, {{0, 2}})).reason == VerifyFailure::MissingEdge);
  CHECK(verify_subdivision(r, cert_of(r, {0, 1}, {{0, 2}})).reason == VerifyFailure::WrongEndpoints);
  CHECK(verify_subdivision(r, cert_of(r, {0, 1}, {{0, 2, 3, 2, 1}})).reason == VerifyFailure::RepeatedVertex);
  CHECK(verify_subdivision(r, cert_of(r, {0, 1, 2}, {{0, 1}, {0, 3, 2}, {1, 3, 2}})).reason ==
        VerifyFailure::VertexCollision);
  CHECK(verify_subdivision(r, cert_of(r, {0, 1, 2}, {{0, 2, 1}, {0, 2}, {1, 2}})).reason ==
        VerifyFailure::InteriorHitsBranch);
  CHECK(verify_subdivision(r, cert_of(r, {0, 1, 2}, {{0, 1}, {0, 2}})).reason == VerifyFailure::Shape);
  CHECK(verify_subdivision(r, cert_of(r, {0}, {})).reason == VerifyFailure::Shape);
  SubdivisionCertificate wrong = cert_of(r, {0, 1}, {{0, 3, 1}});
  wrong.colours[0][0] += 1;
  CHECK(verify_subdivision(r, wrong).reason == VerifyFailure::ColourMismatch);
  CHECK(verify_subdivision(r, wrong, false));
  CHECK(verify_subdivision(r, cert_of(r, {0, 1}, {{0, 9}})).reason == VerifyFailure::Shape);
}

TEST_CASE("parameter sheet formulas") {
  ParamSheet p = param_calculator(1 << 20, 0.5, 3);
  CHECK(p.log_n == doctest::Approx(20));
  CHECK(p.eta == doctest::Approx(1.0 / 80));
  CHECK(p.ell == 6400);
  CHECK(p.k == 65'536'000);
  CHECK(p.L == 131'072'000);
  CHECK(p.s == 2 * 3 * 65'536'000.0);
  CHECK(p.s_blowup == 3 * 65'536'000.0);
  CHECK(p.p == 24);
  CHECK(p.q == 256 * 6400);
  CHECK_FALSE(p.feasible);
  CHECK(p.edge_threshold > p.max_pairs);
  CHECK(p.desk.k == 2);
  CHECK(p.desk.s == 3);
  CHECK(p.desk.L >= 2 * (p.desk.ell + 1) + p.desk.k);
  for (double eps : {0.1, 0.2, 0.3, 0.4}) CHECK(param_calculator(1 << 20, eps, 3).eta < p.eta);
  // k is the smallest even integer at or above 2^9 log n / eta^2.
  ParamSheet odd = param_calculator(1000, 0.37, 2);
  const double kmin = 512 * odd.log_n / (odd.eta * odd.eta);
  CHECK(static_cast<long long>(odd.k) % 2 == 0);
  CHECK(odd.k >= kmin);
  CHECK(odd.k - 2 < kmin);
  CHECK(param_calculator(100, 0.5, 5, 1, 1.0).desk.s == 40);
  CHECK(desk_blowup_s(3, 2, 2, 0.25) == 3);
  CHECK(kind_of([] { param_calculator(1, 0.5, 3); }) == ErrorKind::PreconditionViolated);
  CHECK(kind_of([] { param_calculator(10, 0.7, 3); }) == ErrorKind::PreconditionViolated);
  nlohmann::json j = to_json(p);
  CHECK(j.contains("asymptotic"));
  CHECK(j.contains("used"));
}

TEST_CASE("bipartite subgraph keeps at least half of every degree") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Graph g = random_graph(80, 0.2, seed);
    Graph b = bipartite_subgraph(g, seed);
    CHECK(two_colouring(b).has_value());
    CHECK(2 * b.num_edges() >= g.num_edges());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      CHECK(2 * b.degree(v) >= g.degree(v));
      for (Vertex w : b.neighbours(v)) CHECK(g.has_edge(v, w));
    }
  }
}

TEST_CASE("end-to-end subdivisions verify and replay") {
  SearchParams p;
  int successes = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ColouredGraph g = greedy_proper_colouring(random_graph(160, 0.35, seed), seed);
    for (int m : {2, 3}) {
      SubdivisionCertificate c;
      try {
        c = find_subdivision(g, m, p, seed);
      } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::NoCliqueOfGoodPairs || e.kind() == ErrorKind::RoundsExhausted));
        continue;
      }
      ++successes;
      CHECK(verify_subdivision(g, c));
      CHECK(oracle::is_rainbow_subdivision(g, c.branch, c.paths));
      for (const auto& path : c.paths) CHECK(static_cast<int>(path.size()) - 1 == p.k);
      CHECK(c.params["used"]["s"] == p.s);
      CHECK(c.params.contains("paper"));
      // Same seed, same bytes; JSON round trip preserves validity.
      CHECK(to_json(find_subdivision(g, m, p, seed)).dump() == to_json(c).dump());
      SubdivisionCertificate back = subdivision_from_json(nlohmann::json::parse(to_json(c).dump()));
      CHECK(to_json(back).dump() == to_json(c).dump());
      CHECK(verify_subdivision(g, back));
    }
  }
  CHECK(successes >= 6);
}

TEST_CASE("uncoloured search gives vertex-disjoint connectors") {
  Graph g = random_graph(150, 0.3, 5);
  SubdivisionCertificate c = find_subdivision_uncoloured(g, 3, SearchParams{}, 2);
  ColouredGraph ids = colour_by_edge_id(g);
  CHECK(verify_subdivision(ids, c, false));
  CHECK(oracle::is_rainbow_subdivision(ids, c.branch, c.paths, false));
}

TEST_CASE("rainbow cycles are absent from hypercube colourings, so the search fails") {
  for (int k = 3; k <= 5; ++k) {
    ColouredGraph q = hypercube_coloured(k);
    const ErrorKind e = kind_of([&] { find_subdivision(q, 3, SearchParams{}, 1); });
    CHECK((e == ErrorKind::NoCliqueOfGoodPairs || e == ErrorKind::RoundsExhausted));
  }
}

TEST_CASE("rainbow_connect and rooted subdivisions") {
  ColouredGraph g = greedy_proper_colouring(random_graph(256, 0.25, 9), 9);
  SearchParams p;
  const ExpanderStage st = prepare_expander(SearchGraph{g, PathMode::Rainbow, {}, 0}, p, 4);
  PairOptions popt = p.pairs;
  PairOracle oracle(st, p.k, p.s, popt);

  const Vertex x = 0;
  const Vertex y = g.graph().neighbours(0)[0];
  RainbowPath path = rainbow_connect(g, st, oracle, x, y, {}, p, 1);
  CHECK(path.front() == x);
  CHECK(path.back() == y);
  CHECK(path.length() <= 2 * (p.ell + 1) + p.k);
  CHECK(path.length() <= p.L);
  CHECK(is_rainbow_path(g, path.vertices));

  AvoidSet m;
  m.vertices.insert(y);
  CHECK(kind_of([&] { rainbow_connect(g, st, oracle, x, y, m, p, 1); }) == ErrorKind::NoGoodPair);

  // Connectors avoid a forbidden colour and vertex set.
  AvoidSet avoid;
  for (Vertex v = 10; v < 40; ++v) avoid.vertices.insert(v);
  for (Colour c = 0; c < 20; ++c) avoid.colours.insert(c);
  RainbowPath clear = rainbow_connect(g, st, oracle, 1, 2, avoid, p, 3);
  for (Vertex v : clear.vertices) CHECK_FALSE(avoid.has_vertex(v));
  for (Colour c : clear.colours) CHECK_FALSE(avoid.has_colour(c));

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    std::vector<Vertex> z{static_cast<Vertex>(seed), static_cast<Vertex>(seed + 50), static_cast<Vertex>(seed + 100)};
    SubdivisionCertificate c = find_rooted_subdivision(g, z, p, seed);
    CHECK(c.rooted);
    CHECK(c.branch == z);
    CHECK(verify_subdivision(g, c));
    CHECK(oracle::is_rainbow_subdivision(g, z, c.paths));
    for (const auto& q : c.paths) CHECK(static_cast<int>(q.size()) - 1 <= p.L);
    CHECK(c.evidence["max_avoid_size"].get<std::size_t>() <= c.evidence["avoid_budget"].get<std::size_t>());
  }
  CHECK(kind_of([&] { find_rooted_subdivision(g, {1, 1, 2}, p, 1); }) == ErrorKind::PreconditionViolated);
}
