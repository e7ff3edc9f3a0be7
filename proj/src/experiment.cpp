#include "rainbow/experiment.hpp"

#include "rainbow/error.hpp"

#include "rainbow/generators.hpp"
#include "rainbow/graph_io.hpp"
#include "rainbow/seed.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace rainbow {

namespace {

[[noreturn]] void spec_error(const std::string& msg) { throw Error(ErrorKind::SpecError, msg); }

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

template <class T>
T number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) spec_error("bad value for '" + key + "': " + v);
  return out;
}

bool boolean(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  spec_error("bad boolean for '" + key + "': " + v);
}

std::vector<std::string> split_list(std::string v) {
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& v) {
  std::vector<std::uint64_t> out;
  if (auto dots = v.find(".."); dots != std::string::npos) {
    auto lo = number<std::uint64_t>("seeds", trim(v.substr(0, dots)));
    auto hi = number<std::uint64_t>("seeds", trim(v.substr(dots + 2)));
    if (hi < lo) spec_error("empty seed range " + v);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (const auto& item : split_list(v)) out.push_back(number<std::uint64_t>("seeds", item));
  return out;
}

const std::set<std::string> kGenerators{"gnp", "bipartite", "hypercube", "file"};
const std::set<std::string> kPipelines{"subdiv", "rooted", "uncoloured", "blowup"};
const std::set<std::string> kColourings{"greedy", "edge-id", "file"};

int host_size(const ExperimentSpec& spec) {
  if (spec.generator == "gnp") return spec.n;
  if (spec.generator == "bipartite") return spec.a + spec.b;
  if (spec.generator == "hypercube") return 1 << spec.dim;
  return spec.n;  // file: filled in at load time when absent
}

ColouredGraph build_graph(const ExperimentSpec& spec, std::uint64_t seed) {
  if (spec.generator == "hypercube") return hypercube_coloured(spec.dim);
  if (spec.generator == "file" && spec.colouring == "file") return load_coloured_graph(spec.path);
  Graph g;
  if (spec.generator == "gnp")
    g = random_graph(spec.n, spec.p, derive_seed(seed, "graph"));
  else if (spec.generator == "bipartite")
    g = random_bipartite_graph(spec.a, spec.b, spec.p, derive_seed(seed, "graph"));
  else
    g = load_graph(spec.path);
  if (spec.colouring == "edge-id") return colour_by_edge_id(g);
  return greedy_proper_colouring(g, derive_seed(seed, "colouring"));
}

std::vector<Vertex> pick_roots(const ExperimentSpec& spec, int n, std::uint64_t seed) {
  if (!spec.random_z) return spec.z;
  if (spec.m > n) throw Error(ErrorKind::PreconditionViolated, "more roots than vertices");
  auto rng = make_rng(derive_seed(seed, "roots"));
  std::set<Vertex> chosen;
  while (static_cast<int>(chosen.size()) < spec.m)
    chosen.insert(static_cast<Vertex>(uniform_below(rng, static_cast<std::uint64_t>(n))));
  return {chosen.begin(), chosen.end()};
}

int longest(const std::vector<std::vector<Vertex>>& paths) {
  std::size_t best = 0;
  for (const auto& path : paths) best = std::max(best, path.empty() ? 0 : path.size() - 1);
  return static_cast<int>(best);
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string body = trim(line);
    if (body.empty() || body.front() == '[') continue;  // blank or section header
    auto eq = body.find('=');
    if (eq == std::string::npos) spec_error("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) spec_error("line " + std::to_string(lineno) + ": empty key or value");
    if (spec.entries.count(key)) spec_error("duplicate key '" + key + "'");
    spec.entries[key] = value;
  }
  if (spec.entries.empty()) spec_error("empty experiment spec");

  SearchParams& p = spec.params;
  bool have_s = false, have_L = false, have_k = false;
  std::uint64_t seed0 = 0;
  int repetitions = 0;
  bool have_seed = false;
  for (const auto& [key, v] : spec.entries) {
    if (key == "name") spec.name = v;
    else if (key == "generator") spec.generator = v;
    else if (key == "n") spec.n = number<int>(key, v);
    else if (key == "p") spec.p = number<double>(key, v);
    else if (key == "a") spec.a = number<int>(key, v);
    else if (key == "b") spec.b = number<int>(key, v);
    else if (key == "dim") spec.dim = number<int>(key, v);
    else if (key == "path") spec.path = v;
    else if (key == "colouring") spec.colouring = v;
    else if (key == "pipeline") spec.pipeline = v;
    else if (key == "m") spec.m = number<int>(key, v);
    else if (key == "r") spec.r = number<int>(key, v);
    else if (key == "z") {
      if (v == "random") spec.random_z = true;
      else
        for (const auto& item : split_list(v)) spec.z.push_back(number<Vertex>(key, item));
    } else if (key == "seeds") spec.seeds = parse_seeds(v);
    else if (key == "seed") { seed0 = number<std::uint64_t>(key, v); have_seed = true; }
    else if (key == "repetitions") repetitions = number<int>(key, v);
    else if (key == "threads") spec.threads = number<int>(key, v);
    else if (key == "k") { p.k = number<int>(key, v); have_k = true; }
    else if (key == "s") { p.s = number<int>(key, v); have_s = true; }
    else if (key == "ell") p.ell = number<int>(key, v);
    else if (key == "q") p.q = number<int>(key, v);
    else if (key == "L") { p.L = number<int>(key, v); have_L = true; }
    else if (key == "eps") p.eps = number<double>(key, v);
    else if (key == "scale") p.scale = number<double>(key, v);
    else if (key == "relaxed") p.relaxed = boolean(key, v);
    else if (key == "max_rounds") p.max_rounds = number<int>(key, v);
    else if (key == "max_connect_pairs") p.max_connect_pairs = number<int>(key, v);
    else if (key == "max_greedy_starts") p.max_greedy_starts = number<int>(key, v);
    else if (key == "exact_max_n") p.exact_max_n = number<int>(key, v);
    else if (key == "pair_mode") {
      if (v == "exact") p.pairs.mode = PairMode::Exact;
      else if (v == "montecarlo") p.pairs.mode = PairMode::MonteCarlo;
      else if (v == "auto") p.pairs.mode = PairMode::Auto;
      else spec_error("pair_mode must be exact, montecarlo or auto");
    } else if (key == "pair_samples") p.pairs.samples = number<std::int64_t>(key, v);
    else if (key == "pair_budget") p.pairs.budget = number<std::int64_t>(key, v);
    else if (key == "pool") spec.blowup.collection.pool = number<int>(key, v);
    else if (key == "cap") spec.blowup.collection.cap = v == "none" ? kUnboundedCap : number<int>(key, v);
    else if (key == "krr_budget") spec.blowup.collection.budget = number<std::int64_t>(key, v);
    else if (key == "t") spec.blowup.t = number<double>(key, v);
    else if (key == "check_hom") spec.blowup.check_hom = boolean(key, v);
    else if (key == "hom_budget") spec.blowup.hom_budget = number<std::int64_t>(key, v);
    else spec_error("unknown key '" + key + "'");
  }

  if (!kGenerators.count(spec.generator)) spec_error("generator must be gnp, bipartite, hypercube or file");
  if (!kPipelines.count(spec.pipeline)) spec_error("pipeline must be subdiv, rooted, uncoloured or blowup");
  if (!kColourings.count(spec.colouring)) spec_error("colouring must be greedy, edge-id or file");
  if (spec.colouring == "file" && spec.generator != "file") spec_error("colouring = file needs generator = file");
  if (spec.generator == "gnp" && spec.n <= 0) spec_error("gnp needs n > 0");
  if (spec.generator == "bipartite" && (spec.a <= 0 || spec.b <= 0)) spec_error("bipartite needs a, b > 0");
  if (spec.generator == "hypercube" && spec.dim <= 0) spec_error("hypercube needs dim > 0");
  if (spec.generator == "file" && spec.path.empty()) spec_error("file generator needs path");
  if (spec.m < 2) spec_error("m must be at least 2");
  if (spec.r < 1) spec_error("r must be at least 1");
  if (spec.pipeline == "rooted") {
    if (!spec.random_z && spec.z.empty()) spec_error("rooted pipeline needs z (a list or 'random')");
    if (!spec.random_z) spec.m = static_cast<int>(spec.z.size());
  }
  if (spec.seeds.empty()) {
    if (!have_seed && repetitions == 0) spec_error("no seeds: give seeds, or seed and repetitions");
    for (int i = 0; i < std::max(repetitions, 1); ++i) spec.seeds.push_back(seed0 + static_cast<std::uint64_t>(i));
  } else if (have_seed || repetitions) {
    spec_error("give either seeds or seed/repetitions, not both");
  }

  if (spec.generator == "file" && spec.n <= 0) spec.n = load_graph(spec.path).num_vertices();
  if (!have_k) p.k = param_calculator(std::max(host_size(spec), 2), p.eps, spec.m, spec.r, p.scale).desk.k;
  if (!have_s)
    p.s = spec.pipeline == "blowup"
              ? desk_blowup_s(spec.m, spec.r, p.k, p.scale)
              : std::max(2, static_cast<int>(std::ceil(p.scale * spec.m * (spec.m - 1) * p.k)));
  if (!have_L) p.L = 2 * (p.ell + 1) + p.k;
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) spec_error("cannot open " + path.string());
  return parse_experiment_spec(in);
}

RepetitionResult run_repetition(const ExperimentSpec& spec, std::uint64_t seed) {
  RepetitionResult res;
  res.seed = seed;
  auto start = std::chrono::steady_clock::now();
  try {
    ColouredGraph g = build_graph(spec, seed);
    const SearchParams& p = spec.params;
    if (spec.pipeline == "blowup") {
      BlowupOptions opt = spec.blowup;
      opt.collection.seed = derive_seed(seed, "krr");
      auto cert = find_blowup_subdivision(g.graph(), spec.r, spec.m, p, seed, opt);
      res.verified = verify_blowup(g.graph(), cert).ok();
      res.max_connector_length = longest(cert.base.paths);
      res.certificate = to_json(cert);
    } else {
      SubdivisionCertificate cert;
      bool rainbow = true;
      if (spec.pipeline == "subdiv") {
        cert = find_subdivision(g, spec.m, p, seed);
      } else if (spec.pipeline == "rooted") {
        cert = find_rooted_subdivision(g, pick_roots(spec, g.num_vertices(), seed), p, seed);
      } else {
        cert = find_subdivision_uncoloured(g.graph(), spec.m, p, seed);
        rainbow = false;
      }
      res.verified = verify_subdivision(g, cert, rainbow).ok();
      res.max_connector_length = longest(cert.paths);
      res.certificate = to_json(cert);
    }
    res.success = true;
  } catch (const Error& e) {
    res.error_kind = std::string(to_string(e.kind()));
    res.error = e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const ReportSinks& sinks) {
  ExperimentReport report;
  report.spec = spec;
  auto start = std::chrono::steady_clock::now();
  if (sinks.csv) write_csv_header(*sinks.csv);

  // Workers pull seed indices; this thread appends results in seed order as
  // soon as the next one is ready, so the streams never depend on scheduling.
  const std::size_t total = spec.seeds.size();
  std::vector<std::optional<RepetitionResult>> slots(total);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      auto res = run_repetition(spec, spec.seeds[i]);
      std::lock_guard lock(mu);
      slots[i] = std::move(res);
      ready.notify_all();
    }
  };
  unsigned threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);

  for (std::size_t i = 0; i < total; ++i) {
    RepetitionResult res;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      res = std::move(*slots[i]);
      slots[i].reset();
    }
    if (res.success) {
      ++report.successes;
      if (!res.verified) report.invariants_held = false;
    }
    if (sinks.jsonl) *sinks.jsonl << to_json(res).dump() << '\n' << std::flush;
    if (sinks.csv) write_csv_row(*sinks.csv, res);
    report.runs.push_back(std::move(res));
  }
  for (auto& t : pool) t.join();
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

nlohmann::json to_json(const RepetitionResult& r) {
  return {{"seed", r.seed},
          {"success", r.success},
          {"verified", r.verified},
          {"error_kind", r.error_kind},
          {"error", r.error},
          {"seconds", r.seconds},
          {"max_connector_length", r.max_connector_length},
          {"certificate", r.certificate}};
}

nlohmann::json summary_json(const ExperimentReport& report) {
  const auto& spec = report.spec;
  nlohmann::json failures = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& r : report.runs) {
    seeds.push_back(r.seed);
    if (!r.success) failures[r.error_kind] = failures.value(r.error_kind, 0) + 1;
  }
  auto sheet = param_calculator(std::max(host_size(spec), 2), spec.params.eps, spec.m, spec.r, spec.params.scale);
  const auto reps = static_cast<int>(report.runs.size());
  return {{"name", spec.name},
          {"spec", spec.entries},
          {"pipeline", spec.pipeline},
          {"seeds", seeds},
          {"repetitions", reps},
          {"successes", report.successes},
          {"success_rate", reps ? static_cast<double>(report.successes) / reps : 0.0},
          {"failures_by_kind", failures},
          {"invariants_held", report.invariants_held},
          {"seconds", report.seconds},
          {"params", {{"used", to_json(spec.params)}, {"sheet", to_json(sheet)}, {"scale", spec.params.scale}}}};
}

void write_csv_header(std::ostream& out) {
  out << "seed,success,verified,error_kind,seconds,max_connector_length\n";
}

void write_csv_row(std::ostream& out, const RepetitionResult& r) {
  out << r.seed << ',' << (r.success ? 1 : 0) << ',' << (r.verified ? 1 : 0) << ',' << r.error_kind << ','
      << r.seconds << ',' << r.max_connector_length << '\n';
}

}  // namespace rainbow
