#include "launchpulse/fixture.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "launchpulse/jsonl.hpp"

namespace launchpulse {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string param(const HttpRequest& req, const std::string& name, const std::string& fallback = "") {
  for (const auto& [k, v] : req.params) {
    if (k == name) return v;
  }
  return fallback;
}

HttpResponse json_response(int status, const nlohmann::json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump();
  r.headers["content-type"] = "application/json";
  return r;
}

HttpResponse not_found() { return json_response(404, {{"message", "Not Found"}}); }

}  // namespace

nlohmann::json FixtureCorpus::to_json() const {
  nlohmann::json repos_json = nlohmann::json::object();
  for (const auto& [name, repo] : repos) {
    std::vector<long long> stars;
    stars.reserve(repo.stargazers.size());
    for (auto t : repo.stargazers) stars.push_back(to_unix(t));
    repos_json[name] = {
        {"status", repo.status},
        {"metadata", repo.metadata},
        {"readme_size", repo.readme_size ? nlohmann::json(*repo.readme_size) : nlohmann::json(nullptr)},
        {"stargazer_status", repo.stargazer_status},
        {"stargazers", stars},
    };
  }
  return {{"hn_hits", hn_hits}, {"repos", repos_json}};
}

FixtureCorpus FixtureCorpus::from_json(const nlohmann::json& doc) {
  FixtureCorpus corpus;
  corpus.hn_hits = doc.at("hn_hits").get<std::vector<nlohmann::json>>();
  for (const auto& [name, r] : doc.at("repos").items()) {
    FixtureRepo repo;
    repo.status = r.value("status", 200);
    repo.metadata = r.value("metadata", nlohmann::json::object());
    if (r.contains("readme_size") && r["readme_size"].is_number_integer()) repo.readme_size = r["readme_size"].get<std::int64_t>();
    repo.stargazer_status = r.value("stargazer_status", 200);
    for (const auto& s : r.value("stargazers", nlohmann::json::array())) repo.stargazers.push_back(from_unix(s.get<long long>()));
    std::stable_sort(repo.stargazers.begin(), repo.stargazers.end());
    corpus.repos.emplace(lower(name), std::move(repo));
  }
  return corpus;
}

FixtureCorpus FixtureCorpus::load(const std::filesystem::path& path) {
  return from_json(nlohmann::json::parse(read_text_file(path)));
}

void FixtureCorpus::save(const std::filesystem::path& path) const { write_text_file(path, dump_document(to_json())); }

HttpResponse FixtureTransport::send(const HttpRequest& request) {
  ++requests_;
  if (request.url.starts_with("https://hn.algolia.com/api/v1/search_by_date")) return search(request);
  if (request.url.starts_with("https://api.github.com/repos/")) return github(request);
  return not_found();
}

HttpResponse FixtureTransport::search(const HttpRequest& request) const {
  const std::string query = lower(param(request, "query"));
  const std::string tags = param(request, "tags");
  const int page = std::stoi(param(request, "page", "0"));
  const int per_page = std::max(1, std::stoi(param(request, "hitsPerPage", "20")));

  long long lo = std::numeric_limits<long long>::min();
  long long hi = std::numeric_limits<long long>::max();
  std::string filters = param(request, "numericFilters");
  std::size_t pos = 0;
  while (pos < filters.size()) {
    auto comma = filters.find(',', pos);
    std::string f = filters.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? filters.size() : comma + 1;
    if (f.starts_with("created_at_i>=")) lo = std::stoll(f.substr(14));
    else if (f.starts_with("created_at_i>")) lo = std::stoll(f.substr(13)) + 1;
    else if (f.starts_with("created_at_i<=")) hi = std::stoll(f.substr(14)) + 1;
    else if (f.starts_with("created_at_i<")) hi = std::stoll(f.substr(13));
  }

  std::vector<const nlohmann::json*> matched;
  for (const auto& hit : corpus_.hn_hits) {
    const long long at = hit.value("created_at_i", 0LL);
    if (at < lo || at >= hi) continue;
    if (!tags.empty()) {
      const auto hit_tags = hit.value("_tags", std::vector<std::string>{});
      if (std::find(hit_tags.begin(), hit_tags.end(), tags) == hit_tags.end()) continue;
    }
    const auto title = hit.contains("title") && hit["title"].is_string() ? lower(hit["title"].get<std::string>()) : "";
    const auto url = hit.contains("url") && hit["url"].is_string() ? lower(hit["url"].get<std::string>()) : "";
    if (!query.empty() && title.find(query) == std::string::npos && url.find(query) == std::string::npos) continue;
    matched.push_back(&hit);
  }
  // search_by_date orders newest first.
  std::stable_sort(matched.begin(), matched.end(), [](const nlohmann::json* a, const nlohmann::json* b) {
    return a->value("created_at_i", 0LL) > b->value("created_at_i", 0LL);
  });

  const int nb_hits = static_cast<int>(matched.size());
  const int nb_pages = (nb_hits + per_page - 1) / per_page;
  nlohmann::json hits = nlohmann::json::array();
  for (int i = page * per_page; i < std::min(nb_hits, (page + 1) * per_page); ++i) hits.push_back(*matched[i]);
  return json_response(200, {{"hits", hits},
                             {"page", page},
                             {"nbHits", nb_hits},
                             {"nbPages", nb_pages},
                             {"hitsPerPage", per_page}});
}

HttpResponse FixtureTransport::github(const HttpRequest& request) const {
  std::string path = request.url.substr(std::string("https://api.github.com/repos/").size());
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    auto slash = path.find('/', pos);
    parts.push_back(path.substr(pos, slash == std::string::npos ? std::string::npos : slash - pos));
    if (slash == std::string::npos) break;
    pos = slash + 1;
  }
  if (parts.size() < 2) return not_found();
  auto it = corpus_.repos.find(lower(parts[0] + "/" + parts[1]));
  if (it == corpus_.repos.end() || it->second.status == 404) return not_found();
  const FixtureRepo& repo = it->second;
  if (repo.status != 200) return json_response(repo.status, {{"message", "unavailable"}});

  if (parts.size() == 2) return json_response(200, repo.metadata);
  if (parts.size() == 3 && parts[2] == "readme") {
    if (!repo.readme_size) return not_found();
    return json_response(200, {{"name", "README.md"}, {"path", "README.md"}, {"size", *repo.readme_size},
                               {"encoding", "base64"}});
  }
  if (parts.size() == 3 && parts[2] == "stargazers") {
    if (repo.stargazer_status != 200) {
      return json_response(repo.stargazer_status,
                           {{"message", "Stargazer listing is not available for this repository"}});
    }
    const int page = std::max(1, std::stoi(param(request, "page", "1")));
    const int per_page = std::clamp(std::stoi(param(request, "per_page", "30")), 1, 100);
    const std::size_t begin = static_cast<std::size_t>(page - 1) * per_page;
    const std::size_t end = std::min(repo.stargazers.size(), begin + per_page);
    nlohmann::json items = nlohmann::json::array();
    for (std::size_t i = begin; i < end; ++i) {
      items.push_back({{"starred_at", format_timestamp(repo.stargazers[i])},
                       {"user", {{"login", fmt::format("user{}", i)}}}});
    }
    auto response = json_response(200, items);
    const std::size_t last_page = repo.stargazers.empty() ? 1 : (repo.stargazers.size() + per_page - 1) / per_page;
    const std::string base = request.url;
    std::string link;
    if (static_cast<std::size_t>(page) < last_page) {
      link = fmt::format("<{}?per_page={}&page={}>; rel=\"next\", ", base, per_page, page + 1);
    }
    link += fmt::format("<{}?per_page={}&page={}>; rel=\"last\"", base, per_page, last_page);
    response.headers["link"] = link;
    return response;
  }
  return not_found();
}

}  // namespace launchpulse
