#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "launchpulse/clock.hpp"
#include "launchpulse/rng.hpp"
#include "launchpulse/store.hpp"

namespace launchpulse {

struct HttpRequest {
  std::string method = "GET";
  std::string url;  // absolute, without query string
  QueryParams params;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // names lowercased

  std::optional<std::string> header(const std::string& lower_name) const;
};

/// Connection-level failure (DNS, TLS, reset). HTTP error statuses are responses, not errors.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every attempt failed with a retriable condition.
class RetriesExhausted : public std::runtime_error {
 public:
  RetriesExhausted(const std::string& what, int last_status)
      : std::runtime_error(what), last_status_(last_status) {}
  int last_status() const { return last_status_; }

 private:
  int last_status_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Live HTTPS transport backed by cpp-httplib.
class NetworkTransport final : public Transport {
 public:
  explicit NetworkTransport(std::chrono::seconds timeout = std::chrono::seconds{30});
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

/// Counts attempts and forwards to an inner transport (or refuses when there is none).
class CountingTransport final : public Transport {
 public:
  explicit CountingTransport(Transport* inner = nullptr) : inner_(inner) {}
  HttpResponse send(const HttpRequest& request) override;
  std::size_t count() const { return count_.load(); }

 private:
  Transport* inner_;
  std::atomic<std::size_t> count_{0};
};

/// Sliding-window request budget: at most `budget` acquisitions inside any window of
/// length `window`. Thread-safe; waits through the supplied clock.
class RateLimiter {
 public:
  RateLimiter(std::size_t budget, Clock::duration window, Clock& clock);

  /// Unlimited limiter (never waits).
  static RateLimiter unlimited(Clock& clock);

  void acquire();

  std::size_t budget() const { return budget_; }
  Clock::duration window() const { return window_; }

 private:
  std::size_t budget_;
  Clock::duration window_;
  Clock* clock_;
  std::mutex mu_;
  std::deque<Clock::time_point> issued_;
};

struct BackoffPolicy {
  Clock::duration base = std::chrono::seconds{2};
  double factor = 2.0;
  double jitter = 0.25;
  int max_attempts = 5;

  /// Delay before retry number `retry` (0-based), with multiplicative jitter in
  /// [1 - jitter, 1 + jitter].
  Clock::duration delay(int retry, Rng& rng) const;
};

struct FetchedResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // empty when served from cache
  Timestamp fetched_at{};
  bool from_cache = false;
};

/// Cache-first, budget-respecting, retrying GET client shared by the ingest stages.
class ApiClient {
 public:
  ApiClient(ResponseStore* store, Transport& transport, RateLimiter& limiter, Clock& clock,
            BackoffPolicy backoff = {}, std::uint64_t jitter_seed = 0);

  /// Consults the store (subject to `ttl`), then issues the request under the limiter.
  /// Retries transport errors, 5xx, 429 and rate-limit 403s; honours `x-ratelimit-reset`
  /// and `retry-after` when present. Cacheable outcomes (2xx, 404, 410, 451 and non-rate-limit
  /// 403) are stored. Throws RetriesExhausted when every attempt failed.
  FetchedResponse get(const HttpRequest& request, Ttl ttl);

  std::size_t network_requests() const { return network_requests_.load(); }
  std::size_t backoffs() const { return backoffs_.load(); }

 private:
  ResponseStore* store_;
  Transport* transport_;
  RateLimiter* limiter_;
  Clock* clock_;
  BackoffPolicy backoff_;
  std::mutex rng_mu_;
  Rng rng_;
  std::atomic<std::size_t> network_requests_{0};
  std::atomic<std::size_t> backoffs_{0};
};

/// True when a 403/429 response signals rate limiting rather than an access restriction.
bool is_rate_limited(const HttpResponse& response);

}  // namespace launchpulse
