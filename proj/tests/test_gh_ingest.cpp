#include <doctest.h>

#include "launchpulse/fixture.hpp"
#include "launchpulse/gh_ingest.hpp"
#include "support.hpp"

using namespace launchpulse;

namespace {

FixtureRepo repo(const std::string& full, int n_stars, const char* type = "User") {
  FixtureRepo r;
  r.metadata = {{"full_name", full},
                {"created_at", "2023-06-01T00:00:00Z"},
                {"stargazers_count", n_stars},
                {"topics", {"llm", "rag"}},
                {"owner", {{"login", full.substr(0, full.find('/'))}, {"type", type}}},
                {"license", {{"spdx_id", "MIT"}, {"key", "mit"}}}};
  r.readme_size = 1234;
  const auto t = parse_timestamp("2024-01-01T00:00:00Z");
  for (int i = 0; i < n_stars; ++i) r.stargazers.push_back(t + std::chrono::minutes(i));
  return r;
}

struct Harness {
  explicit Harness(FixtureCorpus c, ResponseStore* store = nullptr)
      : transport(std::move(c)), limiter(RateLimiter::unlimited(clock)), client(store, transport, limiter, clock) {}
  FixtureTransport transport;
  SimulatedClock clock{parse_timestamp("2025-01-01T00:00:00Z")};
  RateLimiter limiter;
  ApiClient client;
};

}  // namespace

TEST_SUITE("gh_ingest") {
  TEST_CASE("parse_repo reads license, topics and owner type") {
    const auto r = repo("acme/tool", 3, "Organization");
    const auto snap = gh::parse_repo(make_slug("acme", "tool"), r.metadata.dump(), parse_timestamp("2025-01-01T00:00:00Z"));
    CHECK(snap.license_id == std::optional<std::string>("MIT"));
    CHECK(snap.owner_is_org);
    CHECK(snap.topics.size() == 2);
    CHECK(snap.stars_total == 3);

    auto bare = r.metadata;
    bare["license"] = nullptr;
    bare.erase("owner");
    const auto s2 = gh::parse_repo(make_slug("acme", "tool"), bare.dump(), {});
    CHECK_FALSE(s2.license_id);
    CHECK_FALSE(s2.owner_is_org);
  }

  TEST_CASE("stargazers are followed across Link pages") {
    FixtureCorpus c;
    c.repos["a/b"] = repo("a/b", 250);
    Harness h(c);
    Warnings w;
    gh::GhOptions opt;
    const auto log = gh::fetch_star_events(h.client, make_slug("a", "b"), opt, w);
    CHECK(log.complete);
    CHECK(log.starred_at.size() == 250);
    CHECK(std::is_sorted(log.starred_at.begin(), log.starred_at.end()));
    CHECK(h.transport.requests() == 3);
    CHECK(w.empty());
  }

  TEST_CASE("exact multiple of the page size without a next link stops") {
    FixtureCorpus c;
    c.repos["a/b"] = repo("a/b", 200);
    Harness h(c);
    Warnings w;
    const auto log = gh::fetch_star_events(h.client, make_slug("a", "b"), {}, w);
    CHECK(log.complete);
    CHECK(h.transport.requests() == 2);
  }

  TEST_CASE("cached pages (no headers) still paginate to the end") {
    testing::TempDir dir;
    SimulatedClock store_clock{parse_timestamp("2025-01-01T00:00:00Z")};
    ResponseStore store(dir.path(), store_clock);
    FixtureCorpus c;
    c.repos["a/b"] = repo("a/b", 230);
    Harness first(c, &store);
    Warnings w;
    const auto live = gh::fetch_star_events(first.client, make_slug("a", "b"), {}, w);
    Harness second(c, &store);
    const auto cached = gh::fetch_star_events(second.client, make_slug("a", "b"), {}, w);
    CHECK(cached == live);
    CHECK(second.transport.requests() == 0);
  }

  TEST_CASE("page cap truncates with a recorded reason") {
    FixtureCorpus c;
    c.repos["a/b"] = repo("a/b", 350);
    Harness h(c);
    Warnings w;
    gh::GhOptions opt;
    opt.max_pages = 2;
    const auto log = gh::fetch_star_events(h.client, make_slug("a", "b"), opt, w);
    CHECK_FALSE(log.complete);
    CHECK(log.starred_at.size() == 200);
    CHECK(log.reason.find("max_pages=2") != std::string::npos);
    CHECK(w.size() == 1);
    opt.max_pages = 0;
    CHECK_THROWS_AS(gh::fetch_star_events(h.client, make_slug("a", "b"), opt, w), std::invalid_argument);
  }

  TEST_CASE("restricted listing keeps metadata and records the reason") {
    FixtureCorpus c;
    c.repos["a/b"] = repo("a/b", 10);
    c.repos["a/b"].stargazer_status = 403;
    Harness h(c);
    Warnings w;
    const auto all = gh::fetch_all(h.client, {make_slug("a", "b")}, {}, 1, w);
    REQUIRE(all.size() == 1);
    CHECK(all[0].snapshot.has_value());
    CHECK(all[0].status.metadata_ok);
    CHECK_FALSE(all[0].status.stars_complete);
    CHECK(all[0].status.reason.find("403") != std::string::npos);
    CHECK(all[0].snapshot->readme_length == 1234);
  }

  TEST_CASE("missing repository yields no snapshot") {
    FixtureCorpus c;
    Harness h(c);
    Warnings w;
    const auto m = gh::fetch_repo_metadata(h.client, make_slug("gone", "away"), {}, w);
    CHECK_FALSE(m.snapshot);
    CHECK(m.reason.find("404") != std::string::npos);
  }

  TEST_CASE("absent README is length 0, not a failure") {
    FixtureCorpus c;
    c.repos["a/b"] = repo("a/b", 1);
    c.repos["a/b"].readme_size.reset();
    Harness h(c);
    Warnings w;
    const auto m = gh::fetch_repo_metadata(h.client, make_slug("a", "b"), {}, w);
    REQUIRE(m.snapshot);
    CHECK(m.snapshot->readme_length == 0);
    CHECK(w.empty());
  }

  TEST_CASE("fetch_all returns results in input order regardless of workers") {
    FixtureCorpus c;
    std::vector<RepoSlug> slugs;
    for (int i = 0; i < 9; ++i) {
      const auto name = fmt::format("o{}/r{}", i, i);
      c.repos[name] = repo(name, 5 + 40 * i);
      slugs.push_back(parse_slug(name));
    }
    slugs.push_back(make_slug("nope", "missing"));
    Harness h1(c), h4(c);
    Warnings w1, w4;
    const auto a = gh::fetch_all(h1.client, slugs, {}, 1, w1);
    const auto b = gh::fetch_all(h4.client, slugs, {}, 4, w4);
    REQUIRE(a.size() == slugs.size());
    for (std::size_t i = 0; i < slugs.size(); ++i) {
      CHECK(a[i].status == b[i].status);
      CHECK(a[i].stars == b[i].stars);
      CHECK(a[i].status.slug == slugs[i]);
    }
    CHECK(w1.items() == w4.items());
    CHECK_FALSE(a.back().status.metadata_ok);
  }
}
