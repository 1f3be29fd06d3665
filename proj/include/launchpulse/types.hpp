#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "launchpulse/time.hpp"

namespace launchpulse {

/// GitHub repository identity; both parts stored lowercased.
struct RepoSlug {
  std::string owner;
  std::string name;

  std::string full_name() const { return owner + "/" + name; }
  /// `owner__name`, used for per-repo file names.
  std::string file_stem() const { return owner + "__" + name; }

  friend auto operator<=>(const RepoSlug&, const RepoSlug&) = default;
};

/// Builds a slug, lowercasing both parts. Throws std::invalid_argument when either is empty.
RepoSlug make_slug(std::string owner, std::string name);

/// Parses `owner/name`.
RepoSlug parse_slug(const std::string& full_name);

struct HNPost {
  std::string post_id;
  Timestamp created_at{};
  std::string title;
  std::string url;
  std::int64_t score = 0;
  std::int64_t num_comments = 0;
  bool is_show_hn = false;

  friend bool operator==(const HNPost&, const HNPost&) = default;
};

/// One HN post resolved to the repository it links; t0 is the post time.
struct LaunchEvent {
  RepoSlug slug;
  HNPost post;

  Timestamp t0() const { return post.created_at; }
  friend bool operator==(const LaunchEvent&, const LaunchEvent&) = default;
};

struct RepoSnapshot {
  RepoSlug slug;
  Timestamp created_at{};
  std::optional<std::string> license_id;
  std::int64_t readme_length = 0;
  std::vector<std::string> topics;
  bool owner_is_org = false;
  std::int64_t stars_total = 0;
  Timestamp fetched_at{};

  friend bool operator==(const RepoSnapshot&, const RepoSnapshot&) = default;
};

struct StarEventLog {
  RepoSlug slug;
  std::vector<Timestamp> starred_at;  // non-decreasing
  bool complete = false;
  std::string reason;  // why the log is incomplete; empty when complete

  friend bool operator==(const StarEventLog&, const StarEventLog&) = default;
};

/// Per-repository fetch outcome, the dataset-quality record of the GitHub stage.
struct RepoFetchStatus {
  RepoSlug slug;
  bool metadata_ok = false;
  bool stars_complete = false;
  std::int64_t star_events = 0;
  std::int64_t stars_total = 0;
  std::string reason;

  friend bool operator==(const RepoFetchStatus&, const RepoFetchStatus&) = default;
};

/// True when the trimmed title starts with "Show HN" (case-insensitive).
bool title_is_show_hn(const std::string& title);

/// Orders HN post ids numerically when both are digit strings, lexicographically otherwise.
bool post_id_less(const std::string& a, const std::string& b);

}  // namespace launchpulse
