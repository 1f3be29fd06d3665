#include "launchpulse/http.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace launchpulse {

std::optional<std::string> HttpResponse::header(const std::string& lower_name) const {
  auto it = headers.find(lower_name);
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

HttpResponse CountingTransport::send(const HttpRequest& request) {
  ++count_;
  if (inner_ == nullptr) {
    throw TransportError(fmt::format("network access refused for {}", request.url));
  }
  return inner_->send(request);
}

RateLimiter::RateLimiter(std::size_t budget, Clock::duration window, Clock& clock)
    : budget_(budget), window_(window), clock_(&clock) {
  if (budget_ == 0) throw std::invalid_argument("rate budget must be positive");
}

RateLimiter RateLimiter::unlimited(Clock& clock) {
  return RateLimiter(std::numeric_limits<std::size_t>::max(), Clock::duration::zero(), clock);
}

void RateLimiter::acquire() {
  if (window_ == Clock::duration::zero()) return;
  for (;;) {
    Clock::duration wait{};
    {
      std::lock_guard lock(mu_);
      const auto now = clock_->now();
      while (!issued_.empty() && now - issued_.front() >= window_) issued_.pop_front();
      if (issued_.size() < budget_) {
        issued_.push_back(now);
        return;
      }
      wait = issued_.front() + window_ - now;
    }
    clock_->sleep_for(wait);
  }
}

Clock::duration BackoffPolicy::delay(int retry, Rng& rng) const {
  const double scale = std::pow(factor, retry) * (1.0 + jitter * (2.0 * rng.uniform() - 1.0));
  return std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double, Clock::duration::period>(static_cast<double>(base.count()) * scale));
}

bool is_rate_limited(const HttpResponse& response) {
  if (response.status == 429) return true;
  if (response.status != 403) return false;
  if (auto remaining = response.header("x-ratelimit-remaining"); remaining && *remaining == "0") return true;
  return response.header("retry-after").has_value();
}

namespace {

bool cacheable(int status) {
  return (status >= 200 && status < 300) || status == 403 || status == 404 || status == 410 || status == 451;
}

}  // namespace

ApiClient::ApiClient(ResponseStore* store, Transport& transport, RateLimiter& limiter, Clock& clock,
                     BackoffPolicy backoff, std::uint64_t jitter_seed)
    : store_(store),
      transport_(&transport),
      limiter_(&limiter),
      clock_(&clock),
      backoff_(backoff),
      rng_(jitter_seed) {}

FetchedResponse ApiClient::get(const HttpRequest& request, Ttl ttl) {
  const auto key = cache_key(request.method, request.url, request.params);
  if (store_ != nullptr) {
    if (auto hit = store_->get(key, ttl)) {
      return FetchedResponse{hit->status, std::move(hit->body), {}, hit->fetched_at, true};
    }
  }

  int last_status = 0;
  std::string last_problem;
  for (int attempt = 0; attempt < backoff_.max_attempts; ++attempt) {
    limiter_->acquire();
    ++network_requests_;
    std::optional<HttpResponse> response;
    try {
      response = transport_->send(request);
    } catch (const TransportError& e) {
      last_problem = e.what();
      last_status = 0;
    }

    Clock::duration wait{};
    if (response) {
      last_status = response->status;
      const bool limited = is_rate_limited(*response);
      const bool server_error = response->status >= 500;
      if (!limited && !server_error) {
        FetchedResponse out{response->status, std::move(response->body), std::move(response->headers),
                            std::chrono::floor<std::chrono::seconds>(clock_->now()), false};
        if (store_ != nullptr && cacheable(out.status)) {
          store_->put(CacheEntry{key, out.body, out.status, out.fetched_at});
        }
        return out;
      }
      last_problem = fmt::format("HTTP {}", response->status);
      if (limited) {
        if (auto reset = response->header("x-ratelimit-reset")) {
          try {
            const auto reset_at = Clock::time_point{std::chrono::seconds{std::stoll(*reset)}};
            wait = std::max(reset_at - clock_->now(), Clock::duration::zero());
          } catch (const std::exception&) {
          }
        } else if (auto after = response->header("retry-after")) {
          try {
            wait = std::chrono::seconds{std::stoll(*after)};
          } catch (const std::exception&) {
          }
        }
      }
    }

    if (attempt + 1 == backoff_.max_attempts) break;
    if (wait == Clock::duration::zero()) {
      std::lock_guard lock(rng_mu_);
      wait = backoff_.delay(attempt, rng_);
    }
    ++backoffs_;
    spdlog::debug("retrying {} after {} ({} ms)", request.url, last_problem,
                  std::chrono::duration_cast<std::chrono::milliseconds>(wait).count());
    clock_->sleep_for(wait);
  }
  throw RetriesExhausted(fmt::format("{} failed after {} attempts: {}", request.url, backoff_.max_attempts,
                                     last_problem),
                         last_status);
}

}  // namespace launchpulse
