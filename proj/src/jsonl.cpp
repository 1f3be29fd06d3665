#include "launchpulse/jsonl.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <unistd.h>

namespace launchpulse {

namespace fs = std::filesystem;

RepoSlug make_slug(std::string owner, std::string name) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  if (owner.empty() || name.empty()) throw std::invalid_argument("repository slug parts must be nonempty");
  return RepoSlug{lower(std::move(owner)), lower(std::move(name))};
}

RepoSlug parse_slug(const std::string& full_name) {
  const auto slash = full_name.find('/');
  if (slash == std::string::npos || full_name.find('/', slash + 1) != std::string::npos) {
    throw std::invalid_argument(fmt::format("malformed repository slug '{}'", full_name));
  }
  return make_slug(full_name.substr(0, slash), full_name.substr(slash + 1));
}

bool title_is_show_hn(const std::string& title) {
  std::size_t i = 0;
  while (i < title.size() && std::isspace(static_cast<unsigned char>(title[i]))) ++i;
  static constexpr std::string_view prefix = "show hn";
  if (title.size() - i < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(title[i + k])) != prefix[k]) return false;
  }
  return true;
}

bool post_id_less(const std::string& a, const std::string& b) {
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  if (digits(a) && digits(b)) {
    auto strip = [](const std::string& s) {
      const auto nz = s.find_first_not_of('0');
      return nz == std::string::npos ? std::string("0") : s.substr(nz);
    };
    const auto sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    return sa < sb;
  }
  return a < b;
}

void to_json(nlohmann::json& j, const RepoSlug& s) { j = s.full_name(); }
void from_json(const nlohmann::json& j, RepoSlug& s) { s = parse_slug(j.get<std::string>()); }

void to_json(nlohmann::json& j, const HNPost& p) {
  j = {{"post_id", p.post_id},   {"created_at", format_timestamp(p.created_at)},
       {"title", p.title},       {"url", p.url},
       {"score", p.score},       {"num_comments", p.num_comments},
       {"is_show_hn", p.is_show_hn}};
}

void from_json(const nlohmann::json& j, HNPost& p) {
  p.post_id = j.at("post_id").get<std::string>();
  p.created_at = parse_timestamp(j.at("created_at").get<std::string>());
  p.title = j.at("title").get<std::string>();
  p.url = j.at("url").get<std::string>();
  p.score = j.at("score").get<std::int64_t>();
  p.num_comments = j.at("num_comments").get<std::int64_t>();
  p.is_show_hn = j.at("is_show_hn").get<bool>();
}

void to_json(nlohmann::json& j, const LaunchEvent& e) {
  j = {{"slug", e.slug}, {"t0", format_timestamp(e.t0())}, {"post", e.post}};
}

void from_json(const nlohmann::json& j, LaunchEvent& e) {
  e.slug = j.at("slug").get<RepoSlug>();
  e.post = j.at("post").get<HNPost>();
}

void to_json(nlohmann::json& j, const RepoSnapshot& s) {
  j = {{"slug", s.slug},
       {"created_at", format_timestamp(s.created_at)},
       {"license_id", s.license_id ? nlohmann::json(*s.license_id) : nlohmann::json(nullptr)},
       {"readme_length", s.readme_length},
       {"topics", s.topics},
       {"owner_is_org", s.owner_is_org},
       {"stars_total", s.stars_total},
       {"fetched_at", format_timestamp(s.fetched_at)}};
}

void from_json(const nlohmann::json& j, RepoSnapshot& s) {
  s.slug = j.at("slug").get<RepoSlug>();
  s.created_at = parse_timestamp(j.at("created_at").get<std::string>());
  const auto& lic = j.at("license_id");
  s.license_id = lic.is_null() ? std::nullopt : std::optional<std::string>(lic.get<std::string>());
  s.readme_length = j.at("readme_length").get<std::int64_t>();
  s.topics = j.at("topics").get<std::vector<std::string>>();
  s.owner_is_org = j.at("owner_is_org").get<bool>();
  s.stars_total = j.at("stars_total").get<std::int64_t>();
  s.fetched_at = parse_timestamp(j.at("fetched_at").get<std::string>());
}

void to_json(nlohmann::json& j, const RepoFetchStatus& s) {
  j = {{"slug", s.slug},
       {"metadata_ok", s.metadata_ok},
       {"stars_complete", s.stars_complete},
       {"star_events", s.star_events},
       {"stars_total", s.stars_total},
       {"reason", s.reason}};
}

void from_json(const nlohmann::json& j, RepoFetchStatus& s) {
  s.slug = j.at("slug").get<RepoSlug>();
  s.metadata_ok = j.at("metadata_ok").get<bool>();
  s.stars_complete = j.at("stars_complete").get<bool>();
  s.star_events = j.at("star_events").get<std::int64_t>();
  s.stars_total = j.at("stars_total").get<std::int64_t>();
  s.reason = j.at("reason").get<std::string>();
}

void to_json(nlohmann::json& j, const AlignedSeries& s) {
  j = {{"slug", s.slug},
       {"t0", format_timestamp(s.t0)},
       {"baseline_stars", s.baseline_stars},
       {"daily", s.daily},
       {"hourly", s.hourly}};
}

void from_json(const nlohmann::json& j, AlignedSeries& s) {
  s.slug = j.at("slug").get<RepoSlug>();
  s.t0 = parse_timestamp(j.at("t0").get<std::string>());
  s.baseline_stars = j.at("baseline_stars").get<std::int64_t>();
  const auto hourly = j.at("hourly").get<std::vector<std::int64_t>>();
  const auto daily = j.at("daily").get<std::vector<std::int64_t>>();
  if (hourly.size() != s.hourly.size() || daily.size() != s.daily.size()) {
    throw std::runtime_error(fmt::format("series {}: expected {} hourly and {} daily values", s.slug.full_name(),
                                         s.hourly.size(), s.daily.size()));
  }
  std::copy(hourly.begin(), hourly.end(), s.hourly.begin());
  std::copy(daily.begin(), daily.end(), s.daily.begin());
}

void write_text_file(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned long long> counter{0};
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error(fmt::format("cannot create directory {}: {}", path.parent_path().string(), ec.message()));
  }
  const auto tmp = path.parent_path() / fmt::format(".{}.tmp-{}-{}", path.filename().string(), ::getpid(), counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    out << content;
    if (!out.flush()) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot replace {}: {}", path.string(), ec.message()));
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& lines) {
  std::string out;
  for (const auto& j : lines) {
    out += j.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

void write_star_log(const fs::path& path, const StarEventLog& log) {
  std::vector<nlohmann::json> lines;
  lines.reserve(log.starred_at.size() + 1);
  lines.push_back({{"slug", log.slug},
                   {"complete", log.complete},
                   {"reason", log.reason},
                   {"count", log.starred_at.size()}});
  for (auto t : log.starred_at) lines.push_back({{"starred_at", format_timestamp(t)}});
  write_jsonl(path, lines);
}

StarEventLog read_star_log(const fs::path& path) {
  const auto lines = read_jsonl(path);
  if (lines.empty()) throw std::runtime_error(fmt::format("{}: missing header record", path.string()));
  StarEventLog log;
  const auto& header = lines.front();
  log.slug = header.at("slug").get<RepoSlug>();
  log.complete = header.at("complete").get<bool>();
  log.reason = header.value("reason", "");
  log.starred_at.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    log.starred_at.push_back(parse_timestamp(lines[i].at("starred_at").get<std::string>()));
  }
  const auto count = header.at("count").get<std::size_t>();
  if (count != log.starred_at.size()) {
    throw std::runtime_error(fmt::format("{}: header count {} but {} events", path.string(), count,
                                         log.starred_at.size()));
  }
  return log;
}

std::string dump_document(const nlohmann::json& doc) {
  if (!doc.is_object()) return doc.dump() + "\n";
  std::string out = "{\n";
  std::size_t k = 0;
  for (const auto& [key, value] : doc.items()) {
    out += nlohmann::json(key).dump() + ":";
    if (value.is_array() && !value.empty()) {
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) out += value[i].dump() + (i + 1 < value.size() ? ",\n" : "\n");
      out += "]";
    } else if (value.is_object() && !value.empty()) {
      out += "{\n";
      std::size_t m = 0;
      for (const auto& [k2, v2] : value.items())
        out += nlohmann::json(k2).dump() + ":" + v2.dump() + (++m < value.size() ? ",\n" : "\n");
      out += "}";
    } else {
      out += value.dump();
    }
    out += ++k < doc.size() ? ",\n" : "\n";
  }
  return out + "}\n";
}

}  // namespace launchpulse
