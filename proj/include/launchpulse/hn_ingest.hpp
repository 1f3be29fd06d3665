#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "launchpulse/diagnostics.hpp"
#include "launchpulse/http.hpp"
#include "launchpulse/types.hpp"

namespace launchpulse::hn {

inline constexpr const char* kSearchByDateUrl = "https://hn.algolia.com/api/v1/search_by_date";

inline const std::vector<std::string> kDefaultKeywords = {"LLM", "transformers", "RAG", "agents"};

struct SearchQuery {
  std::vector<std::string> keywords = kDefaultKeywords;
  Timestamp start{};  // inclusive
  Timestamp end{};    // exclusive
  int page_limit = 50;
  int hits_per_page = 100;
};

/// Builds the Algolia request for one keyword and page (pages are 0-based).
HttpRequest search_request(const SearchQuery& query, const std::string& keyword, int page);

/// Maps one Algolia hit to a post; std::nullopt when required fields are missing or invalid.
std::optional<HNPost> parse_hit(const nlohmann::json& hit);

/// One query per keyword, paginated up to page_limit, union deduplicated by post_id and
/// sorted by (created_at, post_id). HTTP failures and truncation become warnings; whatever
/// was collected is returned.
std::vector<HNPost> search_posts(ApiClient& client, const SearchQuery& query, Warnings& warnings);

/// owner/name for `github.com/<owner>/<name>[/...]`; std::nullopt for gists, user or org
/// pages, GitHub site sections and other hosts. Query strings, fragments and a trailing
/// `.git` are ignored.
std::optional<RepoSlug> extract_repo_slug(std::string_view url);

/// One event per distinct slug, keeping the earliest post (ties: smaller post_id),
/// sorted by (t0, post_id, slug).
std::vector<LaunchEvent> dedupe_earliest(const std::vector<std::pair<HNPost, RepoSlug>>& posts);

/// Pairs every post whose URL is a GitHub repository with its slug, then dedupes.
std::vector<LaunchEvent> resolve_launch_events(const std::vector<HNPost>& posts);

}  // namespace launchpulse::hn
