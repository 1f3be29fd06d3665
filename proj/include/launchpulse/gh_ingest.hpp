#pragma once

#include <optional>
#include <string>
#include <vector>

#include "launchpulse/diagnostics.hpp"
#include "launchpulse/http.hpp"
#include "launchpulse/types.hpp"

namespace launchpulse::gh {

inline constexpr const char* kApiRoot = "https://api.github.com";
inline constexpr const char* kStarMediaType = "application/vnd.github.star+json";
inline constexpr int kStarPageSize = 100;
inline constexpr int kDefaultMaxPages = 400;

struct GhOptions {
  int max_pages = kDefaultMaxPages;
  int per_page = kStarPageSize;
  std::optional<std::string> token;  // GITHUB_TOKEN
};

/// Result of the metadata fetch; `snapshot` is empty when the repository is missing or the
/// request failed, with `reason` saying which.
struct MetadataResult {
  std::optional<RepoSnapshot> snapshot;
  std::string reason;
};

/// Repository endpoint plus README endpoint (topics ride along on the repository object).
MetadataResult fetch_repo_metadata(ApiClient& client, const RepoSlug& slug, const GhOptions& options,
                                   Warnings& warnings);

/// Paginates the stargazer listing with starred-at timestamps. Never throws on access
/// restriction, page cap or exhausted retries: the log comes back with complete=false and a
/// reason, and a warning is recorded.
StarEventLog fetch_star_events(ApiClient& client, const RepoSlug& slug, const GhOptions& options,
                               Warnings& warnings);

/// Parses the repository JSON object into a snapshot (readme_length left at 0).
RepoSnapshot parse_repo(const RepoSlug& slug, const std::string& body, Timestamp fetched_at);

struct RepoFetch {
  std::optional<RepoSnapshot> snapshot;
  StarEventLog stars;
  RepoFetchStatus status;
};

/// Fetches metadata and star history for every slug with up to `workers` concurrent repos
/// sharing `client`. Results are returned in input order; warnings are merged in input order.
std::vector<RepoFetch> fetch_all(ApiClient& client, const std::vector<RepoSlug>& slugs, const GhOptions& options,
                                 int workers, Warnings& warnings);

}  // namespace launchpulse::gh
