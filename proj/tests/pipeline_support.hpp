#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "launchpulse/jsonl.hpp"
#include "launchpulse/pipeline.hpp"

namespace testing {

/// Synthesises `spec` into `dir` and runs every stage offline against it, in process.
/// Returns the overall exit code.
inline int run_synth_pipeline(const launchpulse::synth::SynthSpec& spec, const std::filesystem::path& dir,
                              std::vector<launchpulse::StageReport>* reports = nullptr) {
  using namespace launchpulse;
  write_synth_corpus(spec, dir);
  PipelineContext ctx;
  ctx.config.offline = true;
  ctx.config.use_cache = false;
  ctx.config.fixtures = dir / "fixture.json";
  ctx.config.data_dir = dir / "data";
  ctx.config.out_dir = dir / "out";
  ctx.config.keywords = spec.keywords;
  ctx.config.from = spec.start;
  ctx.config.to = spec.end;
  ctx.config.workers = 1;
  SimulatedClock clock(spec.end + std::chrono::days(60));
  ctx.clock = &clock;
  int code = 0;
  auto r = run_all(ctx, &code);
  if (reports) *reports = std::move(r);
  return code;
}

inline launchpulse::synth::GroundTruth load_truth(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return launchpulse::synth::manifest_from_json(nlohmann::json::parse(in));
}

/// Relative path -> file bytes for every regular file below `root`.
inline std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  if (!std::filesystem::exists(root)) return out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[std::filesystem::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

}  // namespace testing
