#include <doctest.h>

#include "launchpulse/synth.hpp"
#include "pipeline_support.hpp"
#include "support.hpp"

using namespace launchpulse;
using namespace launchpulse::synth;

namespace {

SynthSpec quiet(int n) {
  SynthSpec s;
  s.n_repos = n;
  s.pre_rate = 0;
  s.history_mean = 0;
  s.noise_sd = 0;
  s.effect_hn_score = s.effect_baseline = s.effect_hour = s.effect_show_hn = 0;
  return s;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("generation is deterministic in the seed") {
    SynthSpec s;
    s.n_repos = 20;
    const auto a = generate_corpus(s);
    const auto b = generate_corpus(s);
    CHECK(a.fixture.to_json() == b.fixture.to_json());
    CHECK(manifest_to_json(a.truth) == manifest_to_json(b.truth));
    s.seed = 8;
    CHECK(generate_corpus(s).fixture.to_json() != a.fixture.to_json());
  }

  TEST_CASE("one repository with all burst on day 0") {
    auto s = quiet(1);
    s.burst_base = 120;
    s.decay = 0;
    const auto c = generate_corpus(s);
    REQUIRE(c.truth.repos.size() == 1);
    const auto& r = c.truth.repos[0].row;
    CHECK(r.d24 == 120);
    CHECK(r.d48 == 120);
    CHECK(r.d7 == 120);
    CHECK(r.baseline_stars == 0);
  }

  TEST_CASE("flat background rate and no burst") {
    auto s = quiet(3);
    s.burst_base = 0;
    s.pre_rate = 2;
    for (const auto& p : generate_corpus(s).truth.repos) {
      CHECK(p.row.d24 == 48);
      CHECK(p.row.d48 == 96);
      CHECK(p.row.d7 == 336);
      CHECK(p.baseline_stars == 336);
    }
  }

  TEST_CASE("heavy tail lifts the mean above the median") {
    SynthSpec s;
    s.n_repos = 60;
    s.heavy_tail_repos = 4;
    std::vector<double> d7;
    for (const auto& p : generate_corpus(s).truth.repos) d7.push_back(static_cast<double>(p.row.d7));
    std::sort(d7.begin(), d7.end());
    const double mean = std::accumulate(d7.begin(), d7.end(), 0.0) / d7.size();
    CHECK(mean > d7[d7.size() / 2]);
  }

  TEST_CASE("spec validation names the key") {
    SynthSpec s;
    s.decay = 1.5;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("decay"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(SynthSpec::from_key_values(KeyValues::parse("n_repo = 3\n", "x")), doctest::Contains("n_repo"),
                         std::exception);
    const auto kv = SynthSpec::from_key_values(KeyValues::parse("n_repos = 5\nkeywords = a, b\n", "x"));
    CHECK(kv.n_repos == 5);
    CHECK(kv.keywords == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("manifest round-trips") {
    SynthSpec s;
    s.n_repos = 12;
    s.restricted_repos = 1;
    s.missing_repos = 1;
    const auto truth = generate_corpus(s).truth;
    const auto back = manifest_from_json(manifest_to_json(truth));
    CHECK(manifest_to_json(back) == manifest_to_json(truth));
    CHECK(back.valid_series == 10);
    CHECK(back.metadata_only == 1);
  }

  TEST_CASE("pipeline output verifies, and a tampered manifest does not") {
    testing::TempDir dir;
    SynthSpec s;
    s.n_repos = 40;
    s.restricted_repos = 1;
    s.missing_repos = 1;
    REQUIRE(testing::run_synth_pipeline(s, dir.path()) == 0);
    auto truth = testing::load_truth(dir.path());
    const auto ok = verify_against_manifest(dir / "data", dir / "out", truth);
    for (const auto& f : ok.failures) MESSAGE(f);
    CHECK(ok.ok());
    CHECK(ok.checks > 100);

    for (auto& p : truth.repos) {
      if (p.fate == RepoFate::Valid) {
        p.row.d48 += 1;
        break;
      }
    }
    const auto bad = verify_against_manifest(dir / "data", dir / "out", truth);
    CHECK_FALSE(bad.ok());
    bool named = false;
    for (const auto& f : bad.failures) named = named || f.find("d48") != std::string::npos;
    CHECK(named);
  }
}
