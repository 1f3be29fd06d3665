#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "launchpulse/align.hpp"
#include "launchpulse/features.hpp"
#include "launchpulse/fixture.hpp"
#include "launchpulse/kvconfig.hpp"

namespace launchpulse::synth {

/// Generator parameters. Burst size per repository is
///   burst_base * max(0, 1 + effect_hn_score z(log score) + effect_baseline z(baseline)
///                       + effect_hour [hour bin 12-17] + effect_show_hn [show hn] + noise)
/// spread over launch days 0..6 with weights decay^d; background stars arrive at pre_rate
/// per hour through the whole window.
struct SynthSpec {
  int n_repos = 138;
  std::uint64_t seed = 7;
  Timestamp start = parse_date("2024-01-01");
  Timestamp end = parse_date("2025-12-20");  // t0 drawn from [start, end)
  double pre_rate = 0.25;
  double history_mean = 40.0;
  double burst_base = 150.0;
  double decay = 0.55;
  double noise_sd = 0.1;
  double effect_hn_score = 0.8;
  double effect_baseline = 0.4;
  double effect_hour = 0.6;
  double effect_show_hn = 0.15;
  int heavy_tail_repos = 0;
  double show_hn_fraction = 0.35;
  double org_fraction = 0.3;
  double license_fraction = 0.8;
  double readme_fraction = 0.9;
  int duplicate_posts = 5;
  int noise_posts = 6;
  int restricted_repos = 0;
  int missing_repos = 0;
  bool check_importance = false;
  std::vector<std::string> keywords = {"LLM", "transformers", "RAG", "agents"};

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
  static SynthSpec from_key_values(const KeyValues& kv);
  static SynthSpec load(const std::filesystem::path& path);
};

enum class RepoFate { Valid, Restricted, Missing };
const char* fate_name(RepoFate f);

struct PlantedRepo {
  RepoSlug slug;
  RepoFate fate = RepoFate::Valid;
  std::array<std::int64_t, kWindowHours> hourly{};
  std::int64_t baseline_stars = 0;
  std::int64_t burst = 0;
  FeatureRow row;  // every feature and target as planted
};

struct GroundTruth {
  std::vector<PlantedRepo> repos;  // sorted by slug
  std::size_t total_pairs = 0;
  std::size_t valid_series = 0;
  std::size_t metadata_only = 0;
  std::size_t show_hn = 0;
  std::vector<std::string> importance_order;  // empty unless check_importance
};

struct Corpus {
  FixtureCorpus fixture;
  GroundTruth truth;
};

/// Single-threaded and fully determined by the spec.
Corpus generate_corpus(const SynthSpec& spec);

nlohmann::json manifest_to_json(const GroundTruth& truth);
GroundTruth manifest_from_json(const nlohmann::json& doc);

struct VerifyResult {
  std::vector<std::string> failures;  // one named field per mismatch
  std::size_t checks = 0;
  bool ok() const { return failures.empty(); }
};

/// Compares pipeline outputs (data_dir: aligned series, feature rows; out_dir: tables and
/// model reports) with the planted ground truth. Counts and deltas must match exactly;
/// importances are compared by rank order of the planted features.
VerifyResult verify_against_manifest(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir,
                                     const GroundTruth& truth);

}  // namespace launchpulse::synth
