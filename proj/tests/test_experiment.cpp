#include <doctest.h>

#include "rainbow/error.hpp"
#include "rainbow/experiment.hpp"

#include <algorithm>
#include <sstream>

using namespace rainbow;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_spec(in);
}

ErrorKind kind_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("spec parsed");
  return ErrorKind::ParseError;
}

const char* kGnp = R"(
name = gnp-smoke
generator = gnp     # G(n, p), greedy colouring
n = 160
p = 0.35
pipeline = subdiv
m = 3
seeds = 1..5
)";

}  // namespace

TEST_CASE("experiment spec rejects empty, unknown and malformed input") {
  CHECK(kind_of("") == ErrorKind::SpecError);
  CHECK(kind_of("# only a comment\n\n") == ErrorKind::SpecError);
  CHECK(kind_of("generator = gnp\nn = 10\np = 0.5\npipeline = subdiv\nseeds = 1\nflavour = mint\n") ==
        ErrorKind::SpecError);
  CHECK(kind_of("generator = gnp\nn = ten\np = 0.5\npipeline = subdiv\nseeds = 1\n") == ErrorKind::SpecError);
  CHECK(kind_of("generator = gnp\nn = 10\np = 0.5\npipeline = subdiv\n") == ErrorKind::SpecError);
  CHECK(kind_of("generator = torus\nn = 10\npipeline = subdiv\nseeds = 1\n") == ErrorKind::SpecError);
  CHECK(kind_of("generator = gnp\nn = 10\np = 0.5\npipeline = rooted\nseeds = 1\n") == ErrorKind::SpecError);
  CHECK(kind_of("generator = gnp\nn = 10\nn = 11\np = 0.5\npipeline = subdiv\nseeds = 1\n") ==
        ErrorKind::SpecError);
  CHECK(kind_of("generator = gnp\nn 10\n") == ErrorKind::SpecError);
}

TEST_CASE("experiment spec seeds and derived knobs") {
  auto a = parse(kGnp);
  CHECK(a.seeds == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK(a.params.k == 2);
  CHECK(a.params.s == 3);  // ceil(0.25 * 2 * C(3,2) * 2)
  CHECK(a.params.L == 2 * (a.params.ell + 1) + a.params.k);

  auto b = parse("generator = gnp\nn = 10\np = 0.5\npipeline = subdiv\nseeds = [7, 3, 9]\ns = 5\nL = 20\n");
  CHECK(b.seeds == std::vector<std::uint64_t>{7, 3, 9});
  CHECK(b.params.s == 5);
  CHECK(b.params.L == 20);

  auto c = parse("generator = gnp\nn = 10\np = 0.5\npipeline = subdiv\nseed = 40\nrepetitions = 3\n");
  CHECK(c.seeds == std::vector<std::uint64_t>{40, 41, 42});

  auto d = parse("generator = gnp\nn = 10\np = 0.5\npipeline = rooted\nz = 1, 4, 6, 8\nseeds = 1\n");
  CHECK(d.m == 4);
  CHECK(d.z == std::vector<Vertex>{1, 4, 6, 8});

  auto e = parse("generator = gnp\nn = 40\np = 0.9\npipeline = blowup\nr = 2\nm = 3\nseeds = 1\ncap = none\n");
  CHECK(e.blowup.collection.cap == kUnboundedCap);
  CHECK(e.params.s == desk_blowup_s(3, 2, e.params.k, e.params.scale));
}

TEST_CASE("hypercube experiment fails on every repetition and keeps going") {
  auto spec = parse("generator = hypercube\ndim = 3\npipeline = subdiv\nm = 3\nseeds = 1..4\n");
  auto report = run_experiment(spec);
  REQUIRE(report.runs.size() == 4);
  CHECK(report.successes == 0);
  CHECK(report.invariants_held);
  for (const auto& r : report.runs) {
    CHECK_FALSE(r.success);
    CHECK(r.certificate.is_null());
    CHECK((r.error_kind == "NoCliqueOfGoodPairs" || r.error_kind == "RoundsExhausted"));
  }
  auto summary = summary_json(report);
  CHECK(summary["successes"] == 0);
  CHECK(summary["failures_by_kind"].size() >= 1);
}

TEST_CASE("experiment replay reproduces certificates byte for byte") {
  auto spec = parse(kGnp);
  std::ostringstream jsonl, csv;
  auto first = run_experiment(spec, {&jsonl, &csv});
  CHECK(first.successes >= 1);
  CHECK(first.invariants_held);

  // Replay from the recorded seed list, on a different thread count.
  auto summary = summary_json(first);
  auto replay_spec = spec;
  replay_spec.seeds = summary["seeds"].get<std::vector<std::uint64_t>>();
  replay_spec.threads = 1;
  auto second = run_experiment(replay_spec);
  REQUIRE(second.runs.size() == first.runs.size());
  for (std::size_t i = 0; i < first.runs.size(); ++i) {
    CHECK(first.runs[i].seed == second.runs[i].seed);
    CHECK(first.runs[i].certificate.dump() == second.runs[i].certificate.dump());
    CHECK(first.runs[i].error == second.runs[i].error);
  }

  // One line per repetition in seed order, plus a CSV header.
  std::istringstream lines(jsonl.str());
  std::string line;
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["seed"] == spec.seeds[i]);
    ++i;
  }
  CHECK(i == spec.seeds.size());
  const std::string table = csv.str();
  CHECK(std::count(table.begin(), table.end(), '\n') == static_cast<long>(spec.seeds.size() + 1));
}

TEST_CASE("experiment summary embeds the parameter sheet") {
  auto spec = parse(kGnp);
  spec.seeds = {2};
  auto summary = summary_json(run_experiment(spec));
  CHECK(summary["params"].contains("used"));
  CHECK(summary["params"]["sheet"].contains("asymptotic"));
  CHECK(summary["params"]["scale"] == doctest::Approx(0.25));
  CHECK(summary["params"]["used"]["s"] == 3);
  CHECK(summary["spec"]["n"] == "160");
}

TEST_CASE("rooted and uncoloured experiments") {
  auto rooted = parse(
      "generator = gnp\nn = 200\np = 0.3\npipeline = rooted\nz = random\nm = 3\nseeds = 1..3\nthreads = 2\n");
  auto rep = run_experiment(rooted);
  CHECK(rep.invariants_held);
  for (const auto& r : rep.runs)
    if (r.success) {
      CHECK(r.certificate["rooted"] == true);
      CHECK(r.max_connector_length <= rooted.params.L);
    }

  auto plain = parse("generator = bipartite\na = 60\nb = 60\np = 0.4\npipeline = uncoloured\nm = 3\nseeds = 1..2\n");
  auto rep2 = run_experiment(plain);
  CHECK(rep2.invariants_held);
  CHECK(rep2.successes >= 1);
}
