#include <doctest.h>

#include "launchpulse/pipeline.hpp"
#include "pipeline_support.hpp"
#include "support.hpp"

using namespace launchpulse;

namespace {

synth::SynthSpec small_spec() {
  synth::SynthSpec s;
  s.n_repos = 30;
  s.restricted_repos = 1;
  s.missing_repos = 1;
  return s;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("stage names round-trip") {
    for (auto s : all_stages()) CHECK(parse_stage(stage_name(s)) == s);
    CHECK_FALSE(parse_stage("fetch"));
    CHECK(all_stages().size() == 8);
  }

  TEST_CASE("a stage without its inputs exits 2 and names the file") {
    testing::TempDir dir;
    PipelineContext ctx;
    ctx.config.data_dir = dir / "data";
    ctx.config.out_dir = dir / "out";
    const auto r = run_stage(Stage::Align, ctx);
    CHECK(r.exit_code == 2);
    CHECK(r.error.find("pairs.jsonl") != std::string::npos);
    CHECK(run_stage(Stage::Study, ctx).exit_code == 2);
    CHECK(run_stage(Stage::Report, ctx).exit_code == 2);
  }

  TEST_CASE("offline runs never touch the network transport") {
    testing::TempDir dir;
    synth::SynthSpec s;
    s.n_repos = 8;
    const auto corpus = synth::generate_corpus(s);
    corpus.fixture.save(dir / "fixture.json");

    CountingTransport network;
    SimulatedClock clock(s.end + std::chrono::days(30));
    PipelineContext ctx;
    ctx.config.offline = true;
    ctx.config.fixtures = dir / "fixture.json";
    ctx.config.data_dir = dir / "data";
    ctx.config.cache_dir = dir / "cache";
    ctx.config.out_dir = dir / "out";
    ctx.config.from = s.start;
    ctx.config.to = s.end;
    ctx.network = &network;
    ctx.clock = &clock;
    int code = -1;
    run_all(ctx, &code);
    CHECK(code == 0);
    CHECK(network.count() == 0);

    // second run is served from the namespaced cache
    const auto hn = run_stage(Stage::FetchHn, ctx);
    CHECK(hn.exit_code == 0);
    CHECK(hn.network_requests == 0);
    CHECK(network.count() == 0);
  }

  TEST_CASE("missing fixture in offline mode is a missing input") {
    testing::TempDir dir;
    PipelineContext ctx;
    ctx.config.offline = true;
    ctx.config.fixtures = dir / "nope.json";
    ctx.config.data_dir = dir / "data";
    const auto r = run_stage(Stage::FetchHn, ctx);
    CHECK(r.exit_code == 2);
    CHECK(r.error.find("nope.json") != std::string::npos);
  }

  TEST_CASE("full run emits every expected output; analysis stages rerun identically") {
    testing::TempDir dir;
    REQUIRE(testing::run_synth_pipeline(small_spec(), dir.path()) == 0);
    const auto out = dir / "out";
    for (const auto& rel : expected_outputs()) CHECK_MESSAGE(std::filesystem::exists(out / rel), rel);
    const auto before = testing::snapshot_tree(out);
    CHECK(before.size() == expected_outputs().size());

    std::filesystem::remove_all(out);
    PipelineContext ctx;
    ctx.config.data_dir = dir / "data";
    ctx.config.out_dir = out;
    for (auto s : {Stage::Study, Stage::Infer, Stage::Model, Stage::Report}) {
      const auto r = run_stage(s, ctx);
      REQUIRE_MESSAGE(r.exit_code == 0, r.error);
    }
    const auto after = testing::snapshot_tree(out);
    for (const auto& [path, bytes] : before) {
      auto it = after.find(path);
      REQUIRE_MESSAGE(it != after.end(), path);
      CHECK_MESSAGE(it->second == bytes, path);
    }
    CHECK(after.size() == before.size());
  }

  TEST_CASE("degraded repositories are recorded and the run still completes") {
    testing::TempDir dir;
    std::vector<StageReport> reports;
    REQUIRE(testing::run_synth_pipeline(small_spec(), dir.path(), &reports) == 0);
    const auto ex = read_csv(dir / "data" / "aligned" / "exclusions.csv");
    CHECK(ex.rows.size() == 2);
    const auto summary = read_text_file(dir / "out" / "summary_pipeline.txt");
    CHECK(summary.find("Excluded: 2") != std::string::npos);
    CHECK(summary.find("403") != std::string::npos);
  }

  TEST_CASE("expected outputs are unique and sorted") {
    const auto e = expected_outputs();
    CHECK(std::is_sorted(e.begin(), e.end()));
    CHECK(std::adjacent_find(e.begin(), e.end()) == e.end());
    CHECK(std::find(e.begin(), e.end(), "manifest.csv") != e.end());
  }
}
