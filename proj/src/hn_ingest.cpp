#include "launchpulse/hn_ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include <fmt/format.h>

namespace launchpulse::hn {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// First path segments that are GitHub site sections, not user or organisation names.
constexpr std::array<std::string_view, 26> kReservedOwners = {
    "about",   "apps",     "collections", "contact",       "customer-stories", "enterprise", "events",
    "explore", "features", "login",       "marketplace",   "new",              "notifications", "orgs",
    "organizations", "pricing", "pulls", "issues",    "readme",        "search",           "security",
    "settings", "site",    "sponsors",    "topics",        "trending"};

bool valid_owner(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '-'; });
}

bool valid_name(std::string_view s) {
  return !s.empty() && s != "." && s != ".." &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_' || c == '.'; });
}

std::int64_t int_or_zero(const nlohmann::json& hit, const char* field) {
  if (!hit.contains(field) || !hit[field].is_number_integer()) return 0;
  return std::max<std::int64_t>(0, hit[field].get<std::int64_t>());
}

}  // namespace

HttpRequest search_request(const SearchQuery& query, const std::string& keyword, int page) {
  HttpRequest req;
  req.url = kSearchByDateUrl;
  req.params = {
      {"query", keyword},
      {"tags", "story"},
      {"numericFilters",
       fmt::format("created_at_i>={},created_at_i<{}", to_unix(query.start), to_unix(query.end))},
      {"page", std::to_string(page)},
      {"hitsPerPage", std::to_string(query.hits_per_page)},
  };
  return req;
}

std::optional<HNPost> parse_hit(const nlohmann::json& hit) {
  if (!hit.is_object()) return std::nullopt;
  HNPost post;
  if (!hit.contains("objectID") || !hit["objectID"].is_string()) return std::nullopt;
  post.post_id = hit["objectID"].get<std::string>();

  std::optional<Timestamp> created;
  if (hit.contains("created_at") && hit["created_at"].is_string()) {
    created = try_parse_timestamp(hit["created_at"].get<std::string>());
  }
  if (!created && hit.contains("created_at_i") && hit["created_at_i"].is_number_integer()) {
    created = from_unix(hit["created_at_i"].get<long long>());
  }
  if (!created) return std::nullopt;
  post.created_at = *created;

  if (hit.contains("title") && hit["title"].is_string()) post.title = hit["title"].get<std::string>();
  if (hit.contains("url") && hit["url"].is_string()) post.url = hit["url"].get<std::string>();
  post.score = int_or_zero(hit, "points");
  post.num_comments = int_or_zero(hit, "num_comments");
  post.is_show_hn = title_is_show_hn(post.title);
  return post;
}

std::vector<HNPost> search_posts(ApiClient& client, const SearchQuery& query, Warnings& warnings) {
  if (query.keywords.empty()) throw std::invalid_argument("at least one search keyword is required");
  if (!(query.start < query.end)) throw std::invalid_argument("search range start must precede end");
  if (query.page_limit < 1) throw std::invalid_argument("page_limit must be at least 1");

  std::map<std::string, HNPost> by_id;
  for (const auto& keyword : query.keywords) {
    int pages_available = 1;
    for (int page = 0; page < pages_available && page < query.page_limit; ++page) {
      const auto request = search_request(query, keyword, page);
      FetchedResponse response;
      try {
        response = client.get(request, kVolatileTtl);
      } catch (const std::exception& e) {
        warnings.add(fmt::format("HN search '{}' page {} failed: {}", keyword, page, e.what()));
        break;
      }
      if (response.status != 200) {
        warnings.add(fmt::format("HN search '{}' page {} returned HTTP {}", keyword, page, response.status));
        break;
      }
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(response.body);
      } catch (const std::exception& e) {
        warnings.add(fmt::format("HN search '{}' page {} returned invalid JSON: {}", keyword, page, e.what()));
        break;
      }
      pages_available = doc.value("nbPages", 1);
      for (const auto& hit : doc.value("hits", nlohmann::json::array())) {
        auto post = parse_hit(hit);
        if (!post) continue;
        if (post->created_at < query.start || !(post->created_at < query.end)) continue;
        by_id.try_emplace(post->post_id, std::move(*post));
      }
    }
    if (pages_available > query.page_limit) {
      warnings.add(fmt::format("HN search '{}' truncated at page_limit={} of {} pages", keyword, query.page_limit,
                               pages_available));
    }
  }

  std::vector<HNPost> out;
  out.reserve(by_id.size());
  for (auto& [id, post] : by_id) out.push_back(std::move(post));
  std::sort(out.begin(), out.end(), [](const HNPost& a, const HNPost& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return post_id_less(a.post_id, b.post_id);
  });
  return out;
}

std::optional<RepoSlug> extract_repo_slug(std::string_view url) {
  auto cut = url.find_first_of("?#");
  if (cut != std::string_view::npos) url = url.substr(0, cut);
  while (!url.empty() && std::isspace(static_cast<unsigned char>(url.back()))) url.remove_suffix(1);
  while (!url.empty() && std::isspace(static_cast<unsigned char>(url.front()))) url.remove_prefix(1);

  const std::string lowered = lower(url);
  std::string_view rest = lowered;
  std::size_t offset = 0;
  for (std::string_view scheme : {"https://", "http://"}) {
    if (rest.starts_with(scheme)) {
      offset = scheme.size();
      break;
    }
  }
  rest.remove_prefix(offset);
  const auto host_end = rest.find('/');
  if (host_end == std::string_view::npos) return std::nullopt;
  const auto host = rest.substr(0, host_end);
  if (host != "github.com" && host != "www.github.com") return std::nullopt;

  // Keep original case from here on; RepoSlug lowercases itself.
  std::string_view path = url.substr(offset + host_end + 1);
  std::vector<std::string_view> segments;
  while (!path.empty()) {
    const auto slash = path.find('/');
    auto seg = path.substr(0, slash);
    if (!seg.empty()) segments.push_back(seg);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  if (segments.size() < 2) return std::nullopt;

  std::string_view owner = segments[0];
  std::string_view name = segments[1];
  if (name.size() > 4 && lower(name.substr(name.size() - 4)) == ".git") name.remove_suffix(4);
  const auto owner_l = lower(owner);
  if (std::find(kReservedOwners.begin(), kReservedOwners.end(), owner_l) != kReservedOwners.end()) return std::nullopt;
  if (!valid_owner(owner) || !valid_name(name)) return std::nullopt;
  return make_slug(std::string(owner), std::string(name));
}

std::vector<LaunchEvent> dedupe_earliest(const std::vector<std::pair<HNPost, RepoSlug>>& posts) {
  std::map<RepoSlug, const HNPost*> earliest;
  for (const auto& [post, slug] : posts) {
    auto [it, inserted] = earliest.try_emplace(slug, &post);
    if (inserted) continue;
    const HNPost& kept = *it->second;
    if (post.created_at < kept.created_at ||
        (post.created_at == kept.created_at && post_id_less(post.post_id, kept.post_id))) {
      it->second = &post;
    }
  }
  std::vector<LaunchEvent> out;
  out.reserve(earliest.size());
  for (const auto& [slug, post] : earliest) out.push_back(LaunchEvent{slug, *post});
  std::sort(out.begin(), out.end(), [](const LaunchEvent& a, const LaunchEvent& b) {
    if (a.t0() != b.t0()) return a.t0() < b.t0();
    if (a.post.post_id != b.post.post_id) return post_id_less(a.post.post_id, b.post.post_id);
    return a.slug < b.slug;
  });
  return out;
}

std::vector<LaunchEvent> resolve_launch_events(const std::vector<HNPost>& posts) {
  std::vector<std::pair<HNPost, RepoSlug>> pairs;
  for (const auto& post : posts) {
    if (post.url.empty()) continue;
    if (auto slug = extract_repo_slug(post.url)) pairs.emplace_back(post, *slug);
  }
  return dedupe_earliest(pairs);
}

}  // namespace launchpulse::hn
