#include "launchpulse/store.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

namespace launchpulse {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

std::string percent_encode(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

void validate_url(std::string_view url) {
  std::string_view rest;
  if (url.starts_with("https://")) {
    rest = url.substr(8);
  } else if (url.starts_with("http://")) {
    rest = url.substr(7);
  } else {
    throw std::invalid_argument(fmt::format("malformed URL '{}': expected absolute http(s) URL", url));
  }
  const auto host_end = rest.find_first_of("/?#");
  const auto host = rest.substr(0, host_end);
  if (host.empty()) throw std::invalid_argument(fmt::format("malformed URL '{}': missing host", url));
  for (unsigned char c : url) {
    if (std::isspace(c) || std::iscntrl(c)) {
      throw std::invalid_argument(fmt::format("malformed URL '{}': contains whitespace", url));
    }
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw StoreError(fmt::format("cannot open {}", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_name(const fs::path& target) {
  static std::atomic<unsigned long long> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  return target.parent_path() /
         fmt::format(".tmp-{}-{:x}-{}-{}", ::getpid(), tid, counter++, target.filename().string());
}

void write_atomically(const fs::path& target, std::string_view data) {
  const auto tmp = temp_name(target);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError(fmt::format("cache path not writable: {}", target.parent_path().string()));
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw StoreError(fmt::format("failed writing cache file {}", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StoreError(fmt::format("cannot commit cache file {}: {}", target.string(), ec.message()));
  }
}

}  // namespace

std::string canonical_request(std::string_view method, std::string_view url, const QueryParams& params) {
  validate_url(url);
  std::vector<std::pair<std::string, std::string>> sorted;
  sorted.reserve(params.size());
  for (const auto& [k, v] : params) sorted.emplace_back(percent_encode(k), percent_encode(v));
  std::sort(sorted.begin(), sorted.end());

  std::string upper(method);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  std::string out = upper + ' ' + std::string(url);
  char sep = url.find('?') == std::string_view::npos ? '?' : '&';
  for (const auto& [k, v] : sorted) {
    out += sep;
    out += k;
    out += '=';
    out += v;
    sep = '&';
  }
  return out;
}

std::string cache_key(std::string_view method, std::string_view url, const QueryParams& params) {
  return sha256_hex(canonical_request(method, url, params));
}

ResponseStore::ResponseStore(fs::path root, const Clock& clock) : root_(std::move(root)), clock_(&clock) {}

fs::path ResponseStore::entry_dir(const std::string& key) const {
  if (key.size() < 4) throw std::invalid_argument(fmt::format("cache key too short: '{}'", key));
  return root_ / key.substr(0, 2) / key.substr(2, 2);
}

std::optional<CacheEntry> ResponseStore::get(const std::string& key, Ttl ttl) const {
  const auto dir = entry_dir(key);
  const auto meta_path = dir / (key + ".json");
  std::error_code ec;
  if (!fs::exists(meta_path, ec)) return std::nullopt;

  CacheEntry entry;
  fs::path body_path;
  try {
    const auto meta = nlohmann::json::parse(read_file(meta_path));
    entry.key = meta.at("key").get<std::string>();
    entry.status = meta.at("status").get<int>();
    entry.fetched_at = parse_timestamp(meta.at("fetched_at").get<std::string>());
    body_path = dir / meta.at("body_file").get<std::string>();
    const auto expected_size = meta.at("body_size").get<std::uint64_t>();
    if (entry.key != key) throw StoreError("key mismatch");
    if (!fs::exists(body_path)) {
      // A concurrent put replaced the body after we read the sidecar.
      return std::nullopt;
    }
    entry.body = read_file(body_path);
    if (entry.body.size() != expected_size) throw StoreError("body size mismatch");
  } catch (const std::exception& e) {
    spdlog::warn("cache entry {} is corrupt ({}); evicting", meta_path.string(), e.what());
    fs::remove(meta_path, ec);
    if (!body_path.empty()) fs::remove(body_path, ec);
    return std::nullopt;
  }

  if (ttl) {
    const auto now = std::chrono::floor<std::chrono::seconds>(clock_->now());
    if (now - entry.fetched_at >= *ttl) return std::nullopt;
  }
  return entry;
}

void ResponseStore::put(const CacheEntry& entry) {
  const auto now = std::chrono::floor<std::chrono::seconds>(clock_->now());
  if (entry.fetched_at > now) {
    throw std::invalid_argument(fmt::format("cache entry fetched_at {} is in the future",
                                            format_timestamp(entry.fetched_at)));
  }
  const auto dir = entry_dir(entry.key);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StoreError(fmt::format("cache path not writable: {} ({})", dir.string(), ec.message()));

  const auto meta_path = dir / (entry.key + ".json");
  std::string previous_body;
  if (fs::exists(meta_path, ec)) {
    try {
      previous_body = nlohmann::json::parse(read_file(meta_path)).at("body_file").get<std::string>();
    } catch (const std::exception&) {
    }
  }

  const auto body_file = entry.key + "-" + sha256_hex(entry.body).substr(0, 16) + ".body";
  write_atomically(dir / body_file, entry.body);

  nlohmann::json meta = {
      {"key", entry.key},
      {"status", entry.status},
      {"fetched_at", format_timestamp(entry.fetched_at)},
      {"body_file", body_file},
      {"body_size", entry.body.size()},
  };
  write_atomically(meta_path, meta.dump());

  if (!previous_body.empty() && previous_body != body_file) fs::remove(dir / previous_body, ec);
}

}  // namespace launchpulse
