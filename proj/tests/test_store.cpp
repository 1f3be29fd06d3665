#include <doctest.h>

#include <fstream>

#include "launchpulse/clock.hpp"
#include "launchpulse/store.hpp"
#include "support.hpp"

using namespace launchpulse;
using namespace std::chrono_literals;

namespace {

Clock::time_point at(const char* iso) { return Clock::time_point{parse_timestamp(iso)}; }

}  // namespace

TEST_SUITE("store") {
  TEST_CASE("cache key ignores parameter order and is deterministic") {
    const QueryParams a = {{"page", "2"}, {"per_page", "100"}};
    const QueryParams b = {{"per_page", "100"}, {"page", "2"}};
    const auto k = cache_key("GET", "https://api.github.com/repos/o/n/stargazers", a);
    CHECK(k == cache_key("get", "https://api.github.com/repos/o/n/stargazers", b));
    CHECK(k.size() == 64);
    CHECK(k != cache_key("GET", "https://api.github.com/repos/o/n/stargazers", {{"page", "3"}, {"per_page", "100"}}));
    CHECK(canonical_request("GET", "https://x.test/a", {{"q", "a b"}}) == "GET https://x.test/a?q=a%20b");
  }

  TEST_CASE("cache key rejects malformed urls") {
    CHECK_THROWS_AS(cache_key("GET", "ftp://x/y", {}), std::invalid_argument);
    CHECK_THROWS_AS(cache_key("GET", "https://", {}), std::invalid_argument);
    CHECK_THROWS_AS(cache_key("GET", "https://exa mple.com/", {}), std::invalid_argument);
    CHECK_THROWS_AS(cache_key("GET", "api.github.com/repos", {}), std::invalid_argument);
  }

  TEST_CASE("put then get round-trips and respects ttl") {
    testing::TempDir dir;
    SimulatedClock clock(at("2025-01-01T00:00:00Z"));
    ResponseStore store(dir.path(), clock);
    const auto key = cache_key("GET", "https://api.github.com/repos/o/n", {});
    const CacheEntry e{key, "{\"id\":1}", 200, parse_timestamp("2025-01-01T00:00:00Z")};
    store.put(e);
    auto got = store.get(key);
    REQUIRE(got);
    CHECK(*got == e);

    clock.advance(23h);
    CHECK(store.get(key, kVolatileTtl));
    clock.advance(1h);
    CHECK_FALSE(store.get(key, kVolatileTtl));
    CHECK(store.get(key, std::nullopt));  // infinite ttl
    CHECK_FALSE(store.get(key, 0s));      // ttl 0 = immediate expiry
  }

  TEST_CASE("future fetched_at is rejected") {
    testing::TempDir dir;
    SimulatedClock clock(at("2025-01-01T00:00:00Z"));
    ResponseStore store(dir.path(), clock);
    const auto key = cache_key("GET", "https://a.test/x", {});
    CHECK_THROWS_AS(store.put({key, "x", 200, parse_timestamp("2025-01-02T00:00:00Z")}), std::invalid_argument);
  }

  TEST_CASE("overwrite keeps one body file and serves the latest") {
    testing::TempDir dir;
    SimulatedClock clock(at("2025-01-01T00:00:00Z"));
    ResponseStore store(dir.path(), clock);
    const auto key = cache_key("GET", "https://a.test/x", {});
    store.put({key, "first", 200, parse_timestamp("2025-01-01T00:00:00Z")});
    store.put({key, "second", 200, parse_timestamp("2025-01-01T00:00:00Z")});
    CHECK(store.get(key)->body == "second");
    int bodies = 0;
    for (const auto& f : std::filesystem::recursive_directory_iterator(dir.path()))
      bodies += f.path().extension() == ".body";
    CHECK(bodies == 1);
  }

  TEST_CASE("corrupt entries are evicted and reported as misses") {
    testing::TempDir dir;
    SimulatedClock clock(at("2025-01-01T00:00:00Z"));
    ResponseStore store(dir.path(), clock);
    const auto key = cache_key("GET", "https://a.test/x", {});
    store.put({key, "payload", 200, parse_timestamp("2025-01-01T00:00:00Z")});
    const auto sidecar = dir.path() / key.substr(0, 2) / key.substr(2, 2) / (key + ".json");
    REQUIRE(std::filesystem::exists(sidecar));
    std::ofstream(sidecar) << "{not json";
    CHECK_FALSE(store.get(key));
    CHECK_FALSE(std::filesystem::exists(sidecar));
  }

  TEST_CASE("truncated body is detected") {
    testing::TempDir dir;
    SimulatedClock clock(at("2025-01-01T00:00:00Z"));
    ResponseStore store(dir.path(), clock);
    const auto key = cache_key("GET", "https://a.test/y", {});
    store.put({key, "0123456789", 200, parse_timestamp("2025-01-01T00:00:00Z")});
    for (const auto& f : std::filesystem::recursive_directory_iterator(dir.path()))
      if (f.path().extension() == ".body") std::ofstream(f.path()) << "01234";
    CHECK_FALSE(store.get(key));
  }

  TEST_CASE("unwritable root is a hard error naming the path") {
    testing::TempDir dir;
    std::ofstream(dir / "blocker") << "file, not a directory";
    SimulatedClock clock(at("2025-01-01T00:00:00Z"));
    ResponseStore store(dir / "blocker", clock);
    const auto key = cache_key("GET", "https://a.test/z", {});
    try {
      store.put({key, "b", 200, parse_timestamp("2025-01-01T00:00:00Z")});
      FAIL("expected StoreError");
    } catch (const StoreError& e) {
      CHECK(std::string(e.what()).find("blocker") != std::string::npos);
    }
  }
}
