// Command-line front end.  Graphs are read from --in (default stdin) in the
// edge-list format; results go to stdout as JSON, optionally mirrored to
// --json-out, with per-pair tables in --csv-out.  Exit status: 0 when every
// asserted invariant held, 1 when one failed, 2 on errors.

#include "rainbow/blowup.hpp"
#include "rainbow/error.hpp"
#include "rainbow/expander.hpp"
#include "rainbow/experiment.hpp"
#include "rainbow/generators.hpp"
#include "rainbow/graph_io.hpp"
#include "rainbow/params.hpp"
#include "rainbow/seed.hpp"
#include "rainbow/spectral.hpp"
#include "rainbow/subdivision.hpp"
#include "rainbow/walkcount.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

using namespace rainbow;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  double scale = 0.25;
  std::string in = "-";
  std::string json_out;
  std::string csv_out;
  std::optional<int> exact_max_n;
};

Globals G;

std::string slurp_input() {
  if (G.in == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(G.in);
  if (!f) throw Error(ErrorKind::ParseError, "cannot open " + G.in);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Graph input_graph() {
  std::istringstream in(slurp_input());
  return parse_graph(in);
}

ColouredGraph input_coloured() {
  std::istringstream in(slurp_input());
  return parse_coloured_graph(in);
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::ParseError, "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::ParseError, "cannot write " + path);
  return f;
}

/// Prints the result and mirrors it to --json-out.
void emit(const json& j) {
  std::cout << j.dump(2) << '\n';
  if (!G.json_out.empty()) open_out(G.json_out) << j.dump(2) << '\n';
}

/// Runs `body` only when a CSV sink was requested.
void with_csv(const std::function<void(std::ostream&)>& body) {
  if (G.csv_out.empty()) return;
  auto f = open_out(G.csv_out);
  body(f);
}

int exact_n(int fallback) { return G.exact_max_n.value_or(fallback); }

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "not a rational: " + s);
  }
}

std::string rational_string(const Rational& r) {
  return std::to_string(r.numerator()) + (r.denominator() == 1 ? "" : "/" + std::to_string(r.denominator()));
}

json vertices_json(const Graph& g, const std::vector<Vertex>& vs) {
  json out = json::array();
  for (auto v : vs) out.push_back(g.label(v));
  return out;
}

json graph_stats(const Graph& g) {
  return {{"n", g.num_vertices()}, {"edges", g.num_edges()}, {"average_degree", average_degree_value(g)},
          {"min_degree", g.num_vertices() ? g.min_degree() : 0}, {"max_degree", g.num_vertices() ? g.max_degree() : 0}};
}

json to_json(const ExpanderCertificate& c) {
  json j{{"d", rational_string(c.params.d)},
         {"eta", c.params.eta},
         {"eps", c.params.eps},
         {"evidence", to_string(c.evidence)},
         {"passed", c.passed},
         {"checked_subsets", c.checked_subsets},
         {"violation", to_string(c.violation)},
         {"bypasses", c.bypasses}};
  if (c.lambda2) j["lambda2"] = *c.lambda2;
  if (c.conductance_lower) j["conductance_lower"] = *c.conductance_lower;
  if (c.witness_violation) j["witness_violation"] = *c.witness_violation;
  return j;
}

json to_json(const ConductanceResult& c) {
  return {{"exact", c.exact}, {"value", c.value}, {"lower", c.lower}, {"upper", c.upper}, {"minimizer", c.minimizer}};
}

json to_json(const MixingReport& r) {
  return {{"k", r.k},
          {"base", r.base},
          {"max_deviation", r.max_deviation},
          {"min_margin", r.min_margin},
          {"max_parity_entry", r.max_parity_entry},
          {"worst", {r.worst_row, r.worst_col}}};
}

json to_json(const DegenerateStats& s) {
  json j{{"mode", s.mode == StatsMode::Exact ? "exact" : "montecarlo"},
         {"hom", s.hom.str()},
         {"fraction", s.fraction},
         {"ci", {s.ci_low, s.ci_high}}};
  if (s.mode == StatsMode::Exact) {
    j["degenerate"] = s.degenerate.str();
    j["visited"] = s.visited;
  } else {
    j["samples"] = s.samples;
    j["degenerate_samples"] = s.degenerate_samples;
  }
  return j;
}

void write_graph_file(const std::string& path, const Graph& g) {
  if (path.empty()) return;
  auto f = open_out(path);
  write_graph(f, g);
}

SearchParams desk_params(int n, int m, int r) {
  return param_calculator(std::max(n, 2), 0.5, m, r, G.scale).desk;
}

void add_search_knobs(CLI::App* cmd, SearchParams& p, std::optional<int>& s_override) {
  cmd->add_option("--s", s_override, "spare connectors per pair (derived from --scale when absent)");
  cmd->add_option("--ell", p.ell, "reach depth");
  cmd->add_option("--q", p.q, "colour-usage cap divisor");
  cmd->add_option("--max-rounds", p.max_rounds, "theta-sampler rounds per connector");
}

void finish_params(SearchParams& p, const SearchParams& desk, const std::optional<int>& s_override) {
  p.k = desk.k;
  p.s = s_override.value_or(desk.s);
  p.L = 2 * (p.ell + 1) + p.k;
  p.eps = desk.eps;
  p.scale = G.scale;
  if (G.exact_max_n) p.exact_max_n = *G.exact_max_n;
}

std::vector<Vertex> parse_roots(const std::string& s, const Graph& g) {
  std::vector<Vertex> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    Vertex label = 0;
    try {
      label = std::stoi(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad root '" + item + "'");
    }
    auto v = g.find_label(label);
    if (!v) throw Error(ErrorKind::InvalidVertex, "root " + item + " is not a vertex");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rainbow subdivisions in proper edge-coloured graphs: generators, expanders, walk counts, searches"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", G.seed, "global seed; stage seeds are derived from it");
  app.add_option("--scale", G.scale, "multiplier on the spare-connector count s");
  app.add_option("--in", G.in, "input graph (edge list), '-' for stdin");
  app.add_option("--json-out", G.json_out, "mirror the JSON result to this file");
  app.add_option("--csv-out", G.csv_out, "per-pair or per-repetition table");
  app.add_option("--exact-max-n", G.exact_max_n, "largest n for exhaustive subset checks");

  int status = 0;  // 1 once an asserted invariant fails
  auto invariant = [&](bool holds) {
    if (!holds) status = 1;
  };

  // ---- gen
  auto* gen = app.add_subcommand("gen", "graph generators (edge list on stdout)");
  gen->require_subcommand(1);
  int gk = 3, gr = 2, gn = 100, gkmax = 4;
  double gp = 0.5, gc = 0.2;
  bool gcoloured = false;
  auto* gen_cube = gen->add_subcommand("hypercube", "Q_k with the direction colouring");
  gen_cube->add_option("--k", gk)->required();
  gen_cube->callback([&] { write_coloured_graph(std::cout, hypercube_coloured(gk)); });
  auto* gen_gnp = gen->add_subcommand("gnp", "G(n, p)");
  gen_gnp->add_option("--n", gn)->required();
  gen_gnp->add_option("--p", gp)->required();
  gen_gnp->add_flag("--coloured", gcoloured, "add a greedy proper colouring");
  gen_gnp->callback([&] {
    Graph g = random_graph(gn, gp, derive_seed(G.seed, "graph"));
    if (gcoloured)
      write_coloured_graph(std::cout, greedy_proper_colouring(g, derive_seed(G.seed, "colouring")));
    else
      write_graph(std::cout, g);
  });
  auto* gen_cycle = gen->add_subcommand("blowup-cycle", "C_k[r]");
  gen_cycle->add_option("--k", gk)->required();
  gen_cycle->add_option("--r", gr)->required();
  gen_cycle->callback([&] { write_graph(std::cout, blowup_cycle(gk, gr)); });
  auto* gen_crfree = gen->add_subcommand("crfree", "G(n, n^{-1/r}) with every C_j[r], 3 <= j <= kmax, removed");
  gen_crfree->add_option("--n", gn)->required();
  gen_crfree->add_option("--r", gr)->required();
  gen_crfree->add_option("--kmax", gkmax)->required();
  gen_crfree->add_option("--c", gc, "edge-count constant");
  gen_crfree->callback([&] {
    auto res = crfree_construction(gn, gr, gkmax, G.seed, gc);
    write_graph(std::cout, res.graph);
    json j{{"n", gn},
           {"r", res.r},
           {"kmax", res.kmax},
           {"p", res.p},
           {"initial_edges", res.initial_edges},
           {"removed_edges", res.removed_edges},
           {"edges", res.graph.num_edges()},
           {"edge_bound", res.edge_bound},
           {"meets_bound", res.meets_bound},
           {"search_nodes", res.search_nodes}};
    if (!G.json_out.empty()) open_out(G.json_out) << j.dump(2) << '\n';
    std::cerr << j.dump() << '\n';
  });

  // ---- expander
  auto* exp = app.add_subcommand("expander", "expander extraction and certification");
  exp->require_subcommand(1);
  double eps = 0.5, eta = 0.1;
  std::string dstr = "1";
  int dint = 1;
  bool relaxed = false;
  std::string graph_out;
  auto* exp_extract = exp->add_subcommand("extract", "density-increment expander extraction");
  exp_extract->add_option("--eps", eps)->required();
  exp_extract->add_option("--graph-out", graph_out, "write the expander (input labels)");
  exp_extract->callback([&] {
    auto res = extract_expander(input_graph(), eps, {exact_n(kExactSubsetMaxN), G.seed});
    write_graph_file(graph_out, res.graph);
    invariant(res.certificate.passed);
    emit({{"graph", graph_stats(res.graph)},
          {"vertices", vertices_json(res.graph, [&] {
             std::vector<Vertex> all(static_cast<std::size_t>(res.graph.num_vertices()));
             for (Vertex v = 0; v < res.graph.num_vertices(); ++v) all[static_cast<std::size_t>(v)] = v;
             return all;
           }())},
          {"rounds", res.rounds},
          {"exact_search", res.exact_search},
          {"certificate", to_json(res.certificate)}});
  });
  auto* exp_verify = exp->add_subcommand("verify", "check a (d, eta, eps)-expander");
  exp_verify->add_option("--d", dstr, "average degree, integer or p/q")->required();
  exp_verify->add_option("--eta", eta)->required();
  exp_verify->add_option("--eps", eps)->required();
  exp_verify->callback([&] {
    ExpanderParams p{parse_rational(dstr), eta, eps};
    auto cert = verify_expander(input_graph(), p, exact_n(kExactSubsetMaxN));
    invariant(cert.passed);
    emit(to_json(cert));
  });
  auto* exp_reg = exp->add_subcommand("regularize", "bipartite degree regularization");
  exp_reg->add_option("--d", dint)->required();
  exp_reg->add_flag("--relaxed", relaxed, "report failed thresholds instead of throwing");
  exp_reg->add_option("--graph-out", graph_out);
  exp_reg->callback([&] {
    auto res = regularize_bipartite(input_graph(), dint, G.seed, relaxed);
    write_graph_file(graph_out, res.graph);
    const double floor = dint / (12.0 * log2n(res.graph.num_vertices()));
    const bool max_ok = res.graph.num_vertices() == 0 || res.graph.max_degree() <= dint;
    const bool avg_ok = average_degree_value(res.graph) >= floor;
    invariant(max_ok && avg_ok);
    emit({{"graph", graph_stats(res.graph)},
          {"d", dint},
          {"attempts", res.attempts},
          {"bucket", res.bucket},
          {"sampled", res.sampled},
          {"max_degree_ok", max_ok},
          {"average_degree_floor", floor},
          {"average_degree_ok", avg_ok},
          {"bypasses", res.bypasses}});
  });
  auto* exp_ar = exp->add_subcommand("almost-regular", "almost-regular expander");
  exp_ar->add_option("--eps", eps)->required();
  exp_ar->add_flag("--relaxed", relaxed);
  exp_ar->add_option("--graph-out", graph_out);
  exp_ar->callback([&] {
    auto res = almost_regular_expander(input_graph(), eps, {relaxed, G.seed, exact_n(kExactSubsetMaxN)});
    write_graph_file(graph_out, res.graph);
    json trace = json::array();
    for (const auto& s : res.trace)
      trace.push_back({{"n", s.n},
                       {"d", s.d},
                       {"capped_n", s.capped_n},
                       {"capped_d", s.capped_d},
                       {"capped_max_degree", s.capped_max_degree},
                       {"used_regularization", s.used_regularization},
                       {"expander_n", s.expander_n},
                       {"expander_d", s.expander_d}});
    invariant(res.certificate.passed);
    emit({{"graph", graph_stats(res.graph)},
          {"mu", res.mu},
          {"iterations", res.iterations},
          {"degree_floor_holds", res.degree_floor_holds},
          {"degree_ratio_holds", res.degree_ratio_holds},
          {"trace", trace},
          {"certificate", to_json(res.certificate)},
          {"bypasses", res.bypasses}});
  });

  // ---- spectral
  auto* spec = app.add_subcommand("spectral", "eigenvalues, conductance, mixing");
  spec->require_subcommand(1);
  int kmix = 8;
  auto* sp_sum = spec->add_subcommand("summary", "spectrum of N = D^{-1/2} A D^{-1/2} and conductance");
  sp_sum->callback([&] {
    Graph g = input_graph();
    auto s = spectrum(g, exact_n(22));
    json j{{"graph", graph_stats(g)}, {"eigenvalues", s.eigenvalues}, {"lambda2", s.lambda2},
           {"conductance", to_json(s.conductance)}};
    if (s.conductance.exact) {
      const double margin = 1 - s.conductance.value * s.conductance.value / 8 - s.lambda2;
      j["eigen_conductance_margin"] = margin;
      invariant(margin >= -1e-9);
    }
    emit(j);
  });
  auto* sp_mix = spec->add_subcommand("mixing", "deviation of M^j from the stationary rows, j = 1..k");
  sp_mix->add_option("--k", kmix)->required();
  sp_mix->callback([&] {
    Graph g = input_graph();
    auto profile = mixing_profile(g, kmix);
    json reports = json::array();
    for (const auto& r : profile) {
      reports.push_back(to_json(r));
      invariant(r.min_margin >= 0 && r.max_parity_entry <= 1e-12);
    }
    with_csv([&](std::ostream& out) {
      // Per-pair table: entry of M^j (row v, column u) against the bound.
      const auto w = walk_matrices<double>(g);
      const std::vector<char> in_x = detail::side_x(g);
      const double two_m = 2.0 * g.num_edges();
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(g.num_vertices(), g.num_vertices());
      out << "k,v,u,entry,deviation,bound\n";
      for (const auto& r : profile) {
        power = power * w.transition;
        const double decay = std::pow(r.base, r.k);
        for (Vertex v = 0; v < g.num_vertices(); ++v)
          for (Vertex u = 0; u < g.num_vertices(); ++u) {
            const double entry = power(v, u);
            const bool parity_zero = (r.k + in_x[static_cast<std::size_t>(v)] + in_x[static_cast<std::size_t>(u)]) % 2;
            const double dev = parity_zero ? std::abs(entry) : std::abs(entry - 2.0 * g.degree(u) / two_m);
            const double bound =
                parity_zero ? 0.0 : std::sqrt(static_cast<double>(g.degree(u)) / g.degree(v)) * decay;
            out << r.k << ',' << g.label(v) << ',' << g.label(u) << ',' << entry << ',' << dev << ',' << bound
                << '\n';
          }
      }
    });
    emit({{"graph", graph_stats(g)}, {"lambda2", detail::mixing_base(g)}, {"profile", reports}});
  });
  auto* sp_cond = spec->add_subcommand("conductance", "exact or bracketed conductance");
  sp_cond->callback([&] {
    Graph g = input_graph();
    auto c = conductance(g, exact_n(22));
    invariant(c.lower <= c.value + 1e-9 && c.value <= c.upper + 1e-9);
    emit(to_json(c));
  });

  // ---- walks
  auto* walks = app.add_subcommand("walks", "walk counts and degenerate closed walks");
  walks->require_subcommand(1);
  int wk = 2, ws = 3, wx = 0, wy = 0;
  std::int64_t mc = 0;
  std::string relation = "colour";
  auto* w_count = walks->add_subcommand("count", "hom_{x,y}(P_k) and hom_{x,y}(C_2k) for all pairs");
  w_count->add_option("--k", wk)->required();
  w_count->callback([&] {
    Graph g = input_graph();
    auto t = count_paths(g, wk);
    with_csv([&](std::ostream& out) {
      out << "x,y,paths,cycles\n";
      for (Vertex x = 0; x < g.num_vertices(); ++x)
        for (Vertex y = 0; y < g.num_vertices(); ++y)
          out << g.label(x) << ',' << g.label(y) << ',' << t.paths(x, y) << ',' << t.cycles(x, y) << '\n';
    });
    emit({{"k", wk}, {"total_paths", t.total_paths().str()}, {"total_cycles", t.total_cycles().str()}});
  });
  auto* w_deg = walks->add_subcommand("degenerate", "degenerate share of closed 2k-walks through x and y");
  w_deg->add_option("--x", wx)->required();
  w_deg->add_option("--y", wy)->required();
  w_deg->add_option("--k", wk)->required();
  w_deg->add_option("--mc", mc, "Monte-Carlo samples instead of exact enumeration");
  w_deg->callback([&] {
    ColouredGraph g = input_coloured();
    auto x = g.graph().find_label(wx), y = g.graph().find_label(wy);
    if (!x || !y) throw Error(ErrorKind::InvalidVertex, "x or y is not a vertex");
    auto s = mc > 0 ? estimate_degenerate(g, *x, *y, wk, mc, derive_seed(G.seed, "degenerate"))
                    : count_degenerate_exact(g, *x, *y, wk);
    emit(to_json(s));
  });
  auto* w_good = walks->add_subcommand("good-pairs", "classify the pairs of the X side");
  w_good->add_option("--k", wk)->required();
  w_good->add_option("--s", ws)->required();
  w_good->callback([&] {
    ColouredGraph g = input_coloured();
    PairOptions opt;
    opt.seed = derive_seed(G.seed, "pairs");
    auto rep = good_pairs(g, bipartition(g.graph()), wk, ws, opt);
    with_csv([&](std::ostream& out) {
      out << "x,y,verdict,fraction\n";
      for (std::size_t i = 0; i < rep.side.size(); ++i)
        for (std::size_t j = 0; j < rep.side.size(); ++j)
          out << g.graph().label(rep.side[i]) << ',' << g.graph().label(rep.side[j]) << ','
              << to_string(rep.verdict(i, j)) << ',' << rep.fractions[i * rep.side.size() + j] << '\n';
    });
    const double bad_share = boost::rational_cast<double>(rep.fraction_bad);
    emit({{"k", wk},
          {"s", ws},
          {"side", rep.side.size()},
          {"good", rep.good},
          {"bad", rep.bad},
          {"unknown", rep.unknown},
          {"fraction_bad", rational_string(rep.fraction_bad)},
          {"fraction_bad_value", bad_share}});
  });
  auto* w_janzer = walks->add_subcommand("janzer-check", "closed walks containing a related pair vs the bound");
  w_janzer->add_option("--k", wk)->required();
  w_janzer->add_option("--relation", relation, "colour | vertex")
      ->check(CLI::IsMember({"colour", "vertex"}));
  w_janzer->callback([&] {
    ColouredGraph g = input_coloured();
    JanzerReport rep;
    try {
      rep = janzer_inequality_check(g, wk, relation == "colour" ? Relation::EdgeColour : Relation::VertexEquality);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BoundViolated) throw;
      invariant(false);
      emit({{"k", wk}, {"violated", true}, {"error", e.what()}});
      return;
    }
    invariant(rep.margin >= 0);
    emit({{"k", rep.k}, {"t", rep.t}, {"hom", rep.hom.str()}, {"lhs", rep.lhs.str()}, {"rhs", rep.rhs},
          {"margin", rep.margin}});
  });

  // ---- subdiv
  auto* sub = app.add_subcommand("subdiv", "rainbow K_m-subdivisions");
  sub->require_subcommand(1);
  int m = 3;
  std::string zs, cert_path;
  bool uncoloured = false;
  SearchParams sp;
  std::optional<int> s_override;
  auto* sub_find = sub->add_subcommand("find", "rainbow K_m-subdivision");
  sub_find->add_option("--m", m)->required();
  sub_find->add_flag("--uncoloured", uncoloured, "ignore colours (plain topological minor)");
  add_search_knobs(sub_find, sp, s_override);
  sub_find->callback([&] {
    ColouredGraph g = uncoloured ? colour_by_edge_id(input_graph()) : input_coloured();
    finish_params(sp, desk_params(g.num_vertices(), m, 1), s_override);
    auto cert = uncoloured ? find_subdivision_uncoloured(g.graph(), m, sp, G.seed)
                           : find_subdivision(g, m, sp, G.seed);
    invariant(verify_subdivision(g, cert, !uncoloured).ok());
    emit(to_json(cert));
  });
  auto* sub_rooted = sub->add_subcommand("rooted", "rainbow subdivision with prescribed branch vertices");
  sub_rooted->add_option("--z", zs, "comma-separated branch vertices")->required();
  add_search_knobs(sub_rooted, sp, s_override);
  sub_rooted->callback([&] {
    ColouredGraph g = input_coloured();
    auto Z = parse_roots(zs, g.graph());
    finish_params(sp, desk_params(g.num_vertices(), static_cast<int>(Z.size()), 1), s_override);
    auto cert = find_rooted_subdivision(g, Z, sp, G.seed);
    invariant(verify_subdivision(g, cert).ok());
    emit(to_json(cert));
  });
  auto* sub_verify = sub->add_subcommand("verify", "check a certificate against the input graph");
  sub_verify->add_option("--cert", cert_path)->required();
  sub_verify->add_flag("--uncoloured", uncoloured);
  sub_verify->callback([&] {
    ColouredGraph g = uncoloured ? colour_by_edge_id(input_graph()) : input_coloured();
    auto res = verify_subdivision(g, subdivision_from_json(read_json(cert_path)), !uncoloured);
    invariant(res.ok());
    emit({{"ok", res.ok()}, {"reason", to_string(res.reason)}, {"detail", res.detail}});
  });

  // ---- blowup
  auto* blow = app.add_subcommand("blowup", "K_{r,r} collections and blow-ups of subdivisions");
  blow->require_subcommand(1);
  int br = 2;
  BlowupOptions bopt;
  std::string cap = "none";
  auto parse_cap = [&] { bopt.collection.cap = cap == "none" ? kUnboundedCap : std::stoi(cap); };
  auto* bl_col = blow->add_subcommand("collection", "capped K_{r,r} collection (lines 'A | B' on stdout)");
  bl_col->add_option("--r", br)->required();
  bl_col->add_option("--cap", cap, "copies per (r-set, vertex) incidence, or 'none'");
  bl_col->add_option("--budget", bopt.collection.budget, "candidate copies examined");
  bl_col->add_option("--pool", bopt.collection.pool, "sampled candidate sides (0: all r-sets)");
  bl_col->callback([&] {
    parse_cap();
    bopt.collection.seed = derive_seed(G.seed, "krr");
    Graph g = input_graph();
    auto col = build_krr_collection(g, br, bopt.collection);
    write_collection(std::cout, col);
    const int codeg = max_codegree(col);
    invariant(codeg <= col.cap);
    json j{{"r", col.r},
           {"cap", col.cap == kUnboundedCap ? json(nullptr) : json(col.cap)},
           {"copies", col.copies.size()},
           {"examined", col.examined},
           {"rejected_by_cap", col.rejected_by_cap},
           {"budget_exhausted", col.budget_exhausted},
           {"pool_size", col.pool_size},
           {"exhaustive", col.exhaustive},
           {"max_codegree", codeg},
           {"benchmark", col.benchmark}};
    if (!G.json_out.empty()) open_out(G.json_out) << j.dump(2) << '\n';
    std::cerr << j.dump() << '\n';
  });
  auto* bl_find = blow->add_subcommand("find", "r-blow-up of a K_m-subdivision");
  bl_find->add_option("--r", br)->required();
  bl_find->add_option("--m", m)->required();
  bl_find->add_option("--cap", cap);
  bl_find->add_option("--budget", bopt.collection.budget);
  bl_find->add_option("--pool", bopt.collection.pool);
  bl_find->add_option("--t", bopt.t, "neighbour bound of the intersection relation (0: derived)");
  add_search_knobs(bl_find, sp, s_override);
  bl_find->callback([&] {
    parse_cap();
    bopt.collection.seed = derive_seed(G.seed, "krr");
    Graph g = input_graph();
    SearchParams desk = desk_params(g.num_vertices(), m, br);
    desk.s = desk_blowup_s(m, br, desk.k, G.scale);
    finish_params(sp, desk, s_override);
    auto cert = find_blowup_subdivision(g, br, m, sp, G.seed, bopt);
    invariant(verify_blowup(g, cert).ok());
    emit(to_json(cert));
  });
  auto* bl_verify = blow->add_subcommand("verify", "check a blow-up certificate against the input graph");
  bl_verify->add_option("--cert", cert_path)->required();
  bl_verify->callback([&] {
    auto res = verify_blowup(input_graph(), blowup_from_json(read_json(cert_path)));
    invariant(res.ok());
    emit({{"ok", res.ok()}, {"reason", to_string(res.reason)}, {"detail", res.detail}});
  });

  // ---- params
  auto* params = app.add_subcommand("params", "asymptotic parameter sheet next to the desk values");
  int pn = 1 << 20, pm = 3, pr = 1;
  double peps = 0.5;
  params->add_option("--n", pn)->required();
  params->add_option("--eps", peps);
  params->add_option("--m", pm);
  params->add_option("--r", pr);
  params->callback([&] { emit(to_json(param_calculator(pn, peps, pm, pr, G.scale))); });

  // ---- run
  auto* run = app.add_subcommand("run", "experiment from a key = value spec file");
  std::string spec_path, jsonl_out;
  run->add_option("--spec", spec_path)->required();
  run->add_option("--jsonl-out", jsonl_out, "one JSON line per repetition (default: <json-out>.jsonl)");
  run->callback([&] {
    auto es = load_experiment_spec(spec_path);
    if (jsonl_out.empty() && !G.json_out.empty()) jsonl_out = G.json_out + "l";
    std::optional<std::ofstream> jl, csv;
    ReportSinks sinks;
    if (!jsonl_out.empty()) sinks.jsonl = &jl.emplace(open_out(jsonl_out));
    if (!G.csv_out.empty()) sinks.csv = &csv.emplace(open_out(G.csv_out));
    auto report = run_experiment(es, sinks);
    invariant(report.invariants_held);
    emit(summary_json(report));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}
