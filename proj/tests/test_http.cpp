#include <doctest.h>

#include <algorithm>

#include "launchpulse/http.hpp"
#include "support.hpp"

using namespace launchpulse;
using namespace std::chrono_literals;

namespace {

HttpRequest req(const std::string& url = "https://api.github.com/repos/o/n") {
  HttpRequest r;
  r.url = url;
  return r;
}

}  // namespace

TEST_SUITE("http") {
  TEST_CASE("rate limiter never exceeds its budget in any window") {
    SimulatedClock clock;
    RateLimiter limiter(10, 1h, clock);
    std::vector<Clock::time_point> issued;
    for (int i = 0; i < 95; ++i) {
      limiter.acquire();
      issued.push_back(clock.now());
    }
    for (std::size_t i = 0; i < issued.size(); ++i) {
      const auto n = std::count_if(issued.begin() + static_cast<long>(i), issued.end(),
                                   [&](auto t) { return t - issued[i] < 1h; });
      CHECK(n <= 10);
    }
    CHECK(clock.now() - Clock::time_point{} >= 9h);
  }

  TEST_CASE("unlimited limiter never waits") {
    SimulatedClock clock;
    auto limiter = RateLimiter::unlimited(clock);
    for (int i = 0; i < 1000; ++i) limiter.acquire();
    CHECK(clock.sleep_count() == 0);
  }

  TEST_CASE("backoff doubles within jitter bounds") {
    BackoffPolicy p;
    Rng rng(1);
    for (int retry = 0; retry < 4; ++retry) {
      const auto d = std::chrono::duration<double>(p.delay(retry, rng)).count();
      const double nominal = 2.0 * std::pow(2.0, retry);
      CHECK(d >= nominal * 0.75 - 1e-9);
      CHECK(d <= nominal * 1.25 + 1e-9);
    }
  }

  TEST_CASE("retries server errors then succeeds") {
    SimulatedClock clock;
    auto limiter = RateLimiter::unlimited(clock);
    int n = 0;
    testing::LambdaTransport t([&](const HttpRequest&) { return testing::response(++n < 3 ? 502 : 200, "ok"); });
    ApiClient client(nullptr, t, limiter, clock);
    const auto r = client.get(req(), std::nullopt);
    CHECK(r.status == 200);
    CHECK(r.body == "ok");
    CHECK(t.calls == 3);
    CHECK(client.backoffs() == 2);
    CHECK(clock.total_slept() >= 1500ms + 3s);
  }

  TEST_CASE("exhausted retries raise with the last status") {
    SimulatedClock clock;
    auto limiter = RateLimiter::unlimited(clock);
    testing::LambdaTransport t([](const HttpRequest&) { return testing::response(503); });
    ApiClient client(nullptr, t, limiter, clock);
    try {
      client.get(req(), std::nullopt);
      FAIL("expected RetriesExhausted");
    } catch (const RetriesExhausted& e) {
      CHECK(e.last_status() == 503);
    }
    CHECK(t.calls == 5);
  }

  TEST_CASE("transport errors are retried") {
    SimulatedClock clock;
    auto limiter = RateLimiter::unlimited(clock);
    int n = 0;
    testing::LambdaTransport t([&](const HttpRequest&) -> HttpResponse {
      if (++n == 1) throw TransportError("connection reset");
      return testing::response(200, "fine");
    });
    ApiClient client(nullptr, t, limiter, clock);
    CHECK(client.get(req(), std::nullopt).body == "fine");
  }

  TEST_CASE("rate-limit 403 honours x-ratelimit-reset; access 403 is final") {
    SimulatedClock clock(Clock::time_point{1000s});
    auto limiter = RateLimiter::unlimited(clock);
    int n = 0;
    testing::LambdaTransport t([&](const HttpRequest&) {
      auto r = testing::response(++n == 1 ? 403 : 200, "x");
      if (n == 1) {
        r.headers["x-ratelimit-remaining"] = "0";
        r.headers["x-ratelimit-reset"] = "1600";
      }
      return r;
    });
    ApiClient client(nullptr, t, limiter, clock);
    CHECK(client.get(req(), std::nullopt).status == 200);
    CHECK(clock.now() == Clock::time_point{1600s});

    testing::LambdaTransport forbidden([](const HttpRequest&) { return testing::response(403, "{\"message\":\"no\"}"); });
    ApiClient c2(nullptr, forbidden, limiter, clock);
    CHECK(c2.get(req(), std::nullopt).status == 403);
    CHECK(forbidden.calls == 1);
  }

  TEST_CASE("cache-first: second identical request never reaches the transport") {
    testing::TempDir dir;
    SimulatedClock clock(Clock::time_point{parse_timestamp("2025-01-01T00:00:00Z")});
    ResponseStore store(dir.path(), clock);
    auto limiter = RateLimiter::unlimited(clock);
    testing::LambdaTransport t([](const HttpRequest&) { return testing::response(404, "{}"); });
    ApiClient client(&store, t, limiter, clock);
    const auto a = client.get(req(), kVolatileTtl);
    const auto b = client.get(req(), kVolatileTtl);
    CHECK(t.calls == 1);
    CHECK_FALSE(a.from_cache);
    CHECK(b.from_cache);
    CHECK(b.status == 404);
    clock.advance(25h);
    client.get(req(), kVolatileTtl);
    CHECK(t.calls == 2);
  }

  TEST_CASE("counting transport without inner refuses") {
    CountingTransport c;
    CHECK_THROWS(c.send(req()));
    CHECK(c.count() == 1);
  }
}
