#include "launchpulse/gh_ingest.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace launchpulse::gh {

namespace {

HttpRequest api_request(const std::string& path, const GhOptions& options, const char* accept) {
  HttpRequest req;
  req.url = std::string(kApiRoot) + path;
  req.headers = {{"Accept", accept}, {"User-Agent", "launchpulse"}, {"X-GitHub-Api-Version", "2022-11-28"}};
  if (options.token && !options.token->empty()) req.headers.emplace_back("Authorization", "Bearer " + *options.token);
  return req;
}

bool has_next_link(const FetchedResponse& response, std::size_t page_len, int per_page) {
  auto it = response.headers.find("link");
  if (it != response.headers.end()) return it->second.find("rel=\"next\"") != std::string::npos;
  // Cached pages carry no headers; a full page means there may be more.
  return page_len == static_cast<std::size_t>(per_page);
}

}  // namespace

RepoSnapshot parse_repo(const RepoSlug& slug, const std::string& body, Timestamp fetched_at) {
  const auto doc = nlohmann::json::parse(body);
  RepoSnapshot snap;
  snap.slug = slug;
  snap.created_at = parse_timestamp(doc.at("created_at").get<std::string>());
  if (doc.contains("license") && doc["license"].is_object()) {
    const auto& lic = doc["license"];
    if (lic.contains("spdx_id") && lic["spdx_id"].is_string()) {
      snap.license_id = lic["spdx_id"].get<std::string>();
    } else if (lic.contains("key") && lic["key"].is_string()) {
      snap.license_id = lic["key"].get<std::string>();
    }
  }
  if (doc.contains("topics") && doc["topics"].is_array()) {
    for (const auto& t : doc["topics"]) {
      if (t.is_string()) snap.topics.push_back(t.get<std::string>());
    }
  }
  if (doc.contains("owner") && doc["owner"].is_object()) {
    snap.owner_is_org = doc["owner"].value("type", "") == "Organization";
  }
  snap.stars_total = doc.value("stargazers_count", std::int64_t{0});
  snap.fetched_at = fetched_at;
  return snap;
}

MetadataResult fetch_repo_metadata(ApiClient& client, const RepoSlug& slug, const GhOptions& options,
                                   Warnings& warnings) {
  MetadataResult result;
  FetchedResponse repo;
  try {
    repo = client.get(api_request("/repos/" + slug.full_name(), options, "application/vnd.github+json"), kVolatileTtl);
  } catch (const std::exception& e) {
    result.reason = fmt::format("metadata request failed: {}", e.what());
    warnings.add(fmt::format("{}: {}", slug.full_name(), result.reason));
    return result;
  }
  if (repo.status == 404 || repo.status == 410 || repo.status == 451) {
    result.reason = fmt::format("repository unavailable (HTTP {})", repo.status);
    warnings.add(fmt::format("{}: {}", slug.full_name(), result.reason));
    return result;
  }
  if (repo.status != 200) {
    result.reason = fmt::format("metadata request returned HTTP {}", repo.status);
    warnings.add(fmt::format("{}: {}", slug.full_name(), result.reason));
    return result;
  }

  RepoSnapshot snap;
  try {
    snap = parse_repo(slug, repo.body, repo.fetched_at);
  } catch (const std::exception& e) {
    result.reason = fmt::format("malformed repository record: {}", e.what());
    warnings.add(fmt::format("{}: {}", slug.full_name(), result.reason));
    return result;
  }

  try {
    auto readme = client.get(api_request("/repos/" + slug.full_name() + "/readme", options,
                                         "application/vnd.github+json"),
                             kVolatileTtl);
    if (readme.status == 200) {
      snap.readme_length = nlohmann::json::parse(readme.body).value("size", std::int64_t{0});
    } else if (readme.status != 404) {
      warnings.add(fmt::format("{}: README request returned HTTP {}; treating as absent", slug.full_name(),
                               readme.status));
    }
  } catch (const std::exception& e) {
    warnings.add(fmt::format("{}: README request failed ({}); treating as absent", slug.full_name(), e.what()));
  }

  if (snap.fetched_at < snap.created_at) {
    warnings.add(fmt::format("{}: created_at {} is after fetch time", slug.full_name(),
                             format_timestamp(snap.created_at)));
  }
  result.snapshot = std::move(snap);
  return result;
}

StarEventLog fetch_star_events(ApiClient& client, const RepoSlug& slug, const GhOptions& options,
                               Warnings& warnings) {
  if (options.max_pages < 1) throw std::invalid_argument("max_pages must be at least 1");
  StarEventLog log;
  log.slug = slug;

  bool more = true;
  int page = 1;
  for (; more && page <= options.max_pages; ++page) {
    auto req = api_request("/repos/" + slug.full_name() + "/stargazers", options, kStarMediaType);
    req.params = {{"per_page", std::to_string(options.per_page)}, {"page", std::to_string(page)}};
    FetchedResponse response;
    try {
      // Star history is immutable, so pages never expire.
      response = client.get(req, std::nullopt);
    } catch (const std::exception& e) {
      log.complete = false;
      log.reason = fmt::format("stargazer page {} failed: {}", page, e.what());
      warnings.add(fmt::format("{}: {}; keeping metadata only", slug.full_name(), log.reason));
      return log;
    }
    if (response.status != 200) {
      log.complete = false;
      log.reason = (response.status == 403 || response.status == 451)
                       ? fmt::format("stargazer access restricted (HTTP {})", response.status)
                       : fmt::format("stargazer page {} returned HTTP {}", page, response.status);
      warnings.add(fmt::format("{}: {}; keeping metadata only", slug.full_name(), log.reason));
      return log;
    }
    std::size_t page_len = 0;
    try {
      const auto doc = nlohmann::json::parse(response.body);
      for (const auto& item : doc) {
        log.starred_at.push_back(parse_timestamp(item.at("starred_at").get<std::string>()));
        ++page_len;
      }
    } catch (const std::exception& e) {
      log.complete = false;
      log.reason = fmt::format("stargazer page {} malformed: {}", page, e.what());
      warnings.add(fmt::format("{}: {}", slug.full_name(), log.reason));
      return log;
    }
    more = page_len > 0 && has_next_link(response, page_len, options.per_page);
  }

  std::stable_sort(log.starred_at.begin(), log.starred_at.end());
  if (more) {
    log.complete = false;
    log.reason = fmt::format("star history truncated at max_pages={}", options.max_pages);
    warnings.add(fmt::format("{}: {}", slug.full_name(), log.reason));
  } else {
    log.complete = true;
  }
  return log;
}

std::vector<RepoFetch> fetch_all(ApiClient& client, const std::vector<RepoSlug>& slugs, const GhOptions& options,
                                 int workers, Warnings& warnings) {
  std::vector<RepoFetch> results(slugs.size());
  std::vector<Warnings> per_repo(slugs.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < slugs.size(); i = next++) {
      const auto& slug = slugs[i];
      auto& out = results[i];
      auto meta = fetch_repo_metadata(client, slug, options, per_repo[i]);
      out.status.slug = slug;
      out.stars.slug = slug;
      if (!meta.snapshot) {
        out.status.reason = meta.reason;
        out.stars.reason = meta.reason;
        continue;
      }
      out.snapshot = std::move(meta.snapshot);
      out.stars = fetch_star_events(client, slug, options, per_repo[i]);
      out.status.metadata_ok = true;
      out.status.stars_complete = out.stars.complete;
      out.status.star_events = static_cast<std::int64_t>(out.stars.starred_at.size());
      out.status.stars_total = out.snapshot->stars_total;
      out.status.reason = out.stars.reason;
      if (out.stars.complete && out.status.star_events != out.status.stars_total) {
        per_repo[i].add(fmt::format("{}: {} star events but stargazers_count={}", slug.full_name(),
                                    out.status.star_events, out.status.stars_total));
      }
    }
  };

  const int n = std::max(1, std::min<int>(workers, static_cast<int>(slugs.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n; ++w) pool.emplace_back(work);
    work();
  }
  for (const auto& w : per_repo) warnings.append(w);
  return results;
}

}  // namespace launchpulse::gh
