#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "launchpulse/clock.hpp"
#include "launchpulse/diagnostics.hpp"
#include "launchpulse/fixture.hpp"
#include "launchpulse/http.hpp"
#include "launchpulse/learn.hpp"
#include "launchpulse/synth.hpp"
#include "launchpulse/time.hpp"

namespace launchpulse {

struct RunConfig {
  Timestamp from = parse_date("2024-01-01");
  Timestamp to = parse_date("2026-01-01");  // exclusive
  std::vector<std::string> keywords = {"LLM", "transformers", "RAG", "agents"};
  std::filesystem::path data_dir = "data";
  std::filesystem::path cache_dir = "data/cache";
  std::filesystem::path out_dir = "out";
  std::filesystem::path fixtures = "fixtures/corpus/fixture.json";
  std::uint64_t seed = 42;
  bool offline = false;
  bool use_cache = true;
  int max_pages = 400;
  std::optional<int> rate_budget;  // GitHub requests per hour
  int hn_page_limit = 50;
  int hn_hits_per_page = 100;
  int workers = 4;
  std::optional<std::string> github_token;

  double split_ratio = 0.8;
  int cv_folds = 5;
  std::vector<double> l1_grid = {0.1, 0.5, 0.9};
  int n_lambdas = 50;
  learn::GbtOptions gbt;
  int importance_repeats = 20;
};

/// Stage inputs absent; the CLI maps this to exit code 2.
class MissingInput : public std::runtime_error {
 public:
  explicit MissingInput(const std::filesystem::path& path)
      : std::runtime_error("missing input: " + path.generic_string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

enum class Stage { FetchHn, FetchGh, Align, Features, Study, Infer, Model, Report };

const char* stage_name(Stage s);
std::optional<Stage> parse_stage(const std::string& name);
const std::vector<Stage>& all_stages();

struct StageReport {
  Stage stage = Stage::FetchHn;
  int exit_code = 0;
  Warnings warnings;
  std::vector<std::filesystem::path> outputs;
  std::string error;
  std::size_t network_requests = 0;
};

/// Runtime collaborators. `network` is only ever used when the run is not offline; offline
/// runs serve every request from `fixture` (loaded from config.fixtures when unset).
struct PipelineContext {
  RunConfig config;
  Clock* clock = nullptr;
  Transport* network = nullptr;
  Transport* fixture = nullptr;
  std::shared_ptr<FixtureTransport> owned_fixture;  // loaded lazily for offline runs
  std::string fixture_digest;
};

/// Runs one stage; never throws. Exit code 0 ok, 1 hard error, 2 missing input.
StageReport run_stage(Stage stage, PipelineContext& ctx);

/// Runs every stage in order, stopping at the first failure.
std::vector<StageReport> run_all(PipelineContext& ctx, int* exit_code);

/// Data-layer paths.
struct DataPaths {
  std::filesystem::path root;
  std::filesystem::path hn_posts() const { return root / "raw" / "hn_posts.jsonl"; }
  std::filesystem::path pairs() const { return root / "raw" / "pairs.jsonl"; }
  std::filesystem::path repos() const { return root / "raw" / "repos.jsonl"; }
  std::filesystem::path gh_status() const { return root / "raw" / "gh_status.jsonl"; }
  std::filesystem::path stars_dir() const { return root / "raw" / "stars"; }
  std::filesystem::path series() const { return root / "aligned" / "series.jsonl"; }
  std::filesystem::path exclusions() const { return root / "aligned" / "exclusions.csv"; }
  std::filesystem::path rows() const { return root / "features" / "rows.csv"; }
  std::filesystem::path rejections() const { return root / "features" / "rejections.csv"; }
};

/// Generates a synthetic corpus into `dir`: fixture.json, manifest.json and data/raw/*
/// produced by the production fetch stages running offline against the fixture.
/// Returns the number of warnings raised while fetching.
std::size_t write_synth_corpus(const synth::SynthSpec& spec, const std::filesystem::path& dir);

/// Files every complete run must leave under the out directory (relative paths).
std::vector<std::string> expected_outputs();

}  // namespace launchpulse
