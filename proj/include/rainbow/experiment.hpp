#pragma once

#include "rainbow/blowup.hpp"
#include "rainbow/params.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rainbow {

/// One experiment: a graph family, a pipeline and the seeds to run it on.
///
/// Text form, one `key = value` per line, `#` comments:
///
///   generator = gnp          # gnp | bipartite | hypercube | file
///   n = 512
///   p = 0.3
///   pipeline = subdiv        # subdiv | rooted | uncoloured | blowup
///   m = 3
///   seeds = 1..20            # or a list "1, 4, 9", or seed + repetitions
///
/// Search knobs (k, s, ell, q, L, eps, scale, max_rounds, ...) override the
/// desk defaults; s and L are derived from them when absent.
struct ExperimentSpec {
  std::string name = "experiment";
  std::string generator;
  int n = 0;
  double p = 0;
  int a = 0;
  int b = 0;
  int dim = 0;
  std::string path;
  std::string colouring = "greedy";  // greedy | edge-id | file
  std::string pipeline;
  int m = 3;
  int r = 1;
  std::vector<Vertex> z;  // rooted: fixed roots
  bool random_z = false;  // rooted: m seeded roots per repetition
  std::vector<std::uint64_t> seeds;
  int threads = 0;  // 0: one per hardware thread
  SearchParams params;
  BlowupOptions blowup;
  std::map<std::string, std::string> entries;  // as written
};

/// Throws SpecError on an empty spec, unknown keys, malformed values or a
/// missing generator/pipeline/seed set.
ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct RepetitionResult {
  std::uint64_t seed = 0;
  bool success = false;
  bool verified = false;
  std::string error_kind;  // empty on success
  std::string error;
  double seconds = 0;
  int max_connector_length = 0;
  nlohmann::json certificate;  // null on failure
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<RepetitionResult> runs;
  int successes = 0;
  bool invariants_held = true;  // every certificate produced passed its verifier
  double seconds = 0;
};

/// Output streams; each repetition is appended as it finishes.
struct ReportSinks {
  std::ostream* jsonl = nullptr;
  std::ostream* csv = nullptr;
};

/// Repetitions run in parallel; results are appended in seed order.  Stage
/// failures are recorded per repetition and the run continues.
ExperimentReport run_experiment(const ExperimentSpec& spec, const ReportSinks& sinks = {});

/// One repetition, deterministic in (spec, seed).
RepetitionResult run_repetition(const ExperimentSpec& spec, std::uint64_t seed);

nlohmann::json to_json(const RepetitionResult& r);
/// Counts, failure kinds, the replay seed list and the parameter sheet.
nlohmann::json summary_json(const ExperimentReport& report);
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RepetitionResult& r);

}  // namespace rainbow
