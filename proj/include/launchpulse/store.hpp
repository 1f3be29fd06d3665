#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "launchpulse/clock.hpp"
#include "launchpulse/time.hpp"

namespace launchpulse {

using QueryParams = std::vector<std::pair<std::string, std::string>>;

/// One cached HTTP response.
struct CacheEntry {
  std::string key;
  std::string body;
  int status = 0;
  Timestamp fetched_at{};

  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Canonical request identity: lowercase hex SHA-256 of
/// `METHOD url?sorted-percent-encoded-params`. Throws std::invalid_argument when the URL
/// is not an absolute http(s) URL.
std::string cache_key(std::string_view method, std::string_view url, const QueryParams& params);

/// The string that cache_key() hashes; exposed for diagnostics.
std::string canonical_request(std::string_view method, std::string_view url, const QueryParams& params);

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// TTL applied on read; std::nullopt means entries never expire.
using Ttl = std::optional<std::chrono::seconds>;

inline constexpr std::chrono::seconds kVolatileTtl = std::chrono::hours{24};

/// On-disk response cache.
///
/// Layout: `<root>/<k0k1>/<k2k3>/<key>.json` holds the sidecar metadata record and names
/// the body file `<key>-<digest>.body` next to it. Bodies are written first and the
/// sidecar is committed by atomic rename, so readers never observe a torn entry.
/// Concurrent readers are safe; concurrent writers to one key resolve last-rename-wins.
class ResponseStore {
 public:
  ResponseStore(std::filesystem::path root, const Clock& clock);

  std::optional<CacheEntry> get(const std::string& key, Ttl ttl = std::nullopt) const;
  void put(const CacheEntry& entry);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path entry_dir(const std::string& key) const;

  std::filesystem::path root_;
  const Clock* clock_;
};

}  // namespace launchpulse
