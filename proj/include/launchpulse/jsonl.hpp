#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "launchpulse/align.hpp"
#include "launchpulse/types.hpp"

namespace launchpulse {

void to_json(nlohmann::json& j, const RepoSlug& s);
void from_json(const nlohmann::json& j, RepoSlug& s);
void to_json(nlohmann::json& j, const HNPost& p);
void from_json(const nlohmann::json& j, HNPost& p);
void to_json(nlohmann::json& j, const LaunchEvent& e);
void from_json(const nlohmann::json& j, LaunchEvent& e);
void to_json(nlohmann::json& j, const RepoSnapshot& s);
void from_json(const nlohmann::json& j, RepoSnapshot& s);
void to_json(nlohmann::json& j, const RepoFetchStatus& s);
void from_json(const nlohmann::json& j, RepoFetchStatus& s);
void to_json(nlohmann::json& j, const AlignedSeries& s);
void from_json(const nlohmann::json& j, AlignedSeries& s);

/// Writes one compact JSON document per line (LF), replacing `path` atomically.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines);

/// Reads a JSONL file; blank lines are skipped. Throws std::runtime_error naming the
/// file and line on parse failure.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

template <typename T>
void write_records(const std::filesystem::path& path, const std::vector<T>& records) {
  std::vector<nlohmann::json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.emplace_back(r);
  write_jsonl(path, lines);
}

template <typename T>
std::vector<T> read_records(const std::filesystem::path& path) {
  std::vector<T> out;
  for (const auto& j : read_jsonl(path)) out.push_back(j.get<T>());
  return out;
}

/// Star log file: a header record `{"slug", "complete", "reason", "count"}` followed by one
/// `{"starred_at": ...}` line per event.
void write_star_log(const std::filesystem::path& path, const StarEventLog& log);
StarEventLog read_star_log(const std::filesystem::path& path);

/// Writes text to `path` via a temporary file and rename; creates parent directories.
/// Top-level object with one key per line; array members one element per line. Compact
/// below that, so large documents stay line-diffable.
std::string dump_document(const nlohmann::json& doc);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace launchpulse
