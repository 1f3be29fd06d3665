#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "launchpulse/http.hpp"
#include "launchpulse/types.hpp"

namespace launchpulse {

/// A repository as served by the offline API emulation.
struct FixtureRepo {
  int status = 200;                  // repository endpoint status (404 = missing)
  nlohmann::json metadata;           // GitHub repository object
  std::optional<std::int64_t> readme_size; // README byte size; absent -> 404
  int stargazer_status = 200;        // 403/451 = restricted listing
  std::vector<Timestamp> stargazers; // ascending
};

/// Frozen API state: Algolia hits plus GitHub repositories keyed by lowercase `owner/name`.
struct FixtureCorpus {
  std::vector<nlohmann::json> hn_hits;
  std::map<std::string, FixtureRepo> repos;

  static FixtureCorpus load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  nlohmann::json to_json() const;
  static FixtureCorpus from_json(const nlohmann::json& doc);
};

/// In-process emulation of the two public APIs over a FixtureCorpus. Serves
/// `search_by_date` (query substring on title/url, `tags=story`, `created_at_i` numeric
/// filters, pagination), `/repos/{o}/{n}`, `/repos/{o}/{n}/readme` and
/// `/repos/{o}/{n}/stargazers` (with `Link` headers). Never touches the network.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(FixtureCorpus corpus) : corpus_(std::move(corpus)) {}
  HttpResponse send(const HttpRequest& request) override;

  std::size_t requests() const { return requests_.load(); }
  const FixtureCorpus& corpus() const { return corpus_; }

 private:
  HttpResponse search(const HttpRequest& request) const;
  HttpResponse github(const HttpRequest& request) const;

  FixtureCorpus corpus_;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace launchpulse
