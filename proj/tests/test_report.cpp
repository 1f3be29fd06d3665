#include <doctest.h>

#include <fstream>
#include <regex>
#include <set>

#include "launchpulse/report.hpp"
#include "support.hpp"

using namespace launchpulse;
using namespace launchpulse::report;

namespace {

std::vector<double> attr_values(const std::string& svg, const std::string& element, const std::string& attr) {
  std::vector<double> out;
  const std::regex re("<" + element + " class=\"bar\"[^>]* " + attr + "=\"([0-9.]+)\"");
  for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it) out.push_back(std::stod((*it)[1]));
  return out;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("empty inputs give header-only tables") {
    CHECK(event_curves_table(std::nullopt, std::nullopt).rows.empty());
    CHECK(event_curves_table(std::nullopt, std::nullopt).header ==
          std::vector<std::string>{"day", "mean_stars", "median_stars", "n"});
    CHECK(launch_effects_table(std::nullopt).rows.empty());
    CHECK(group_comparisons_table({}).rows.empty());
    CHECK(model_performance_table({}).rows.empty());
  }

  TEST_CASE("regression and timing tables share columns") {
    const std::vector<std::string> cols = {"effect", "coefficient", "std_error", "p_value", "note"};
    CHECK(regression_table({}).header == cols);
    const auto t = timing_effects_table({{"Show HN vs Others (48h)", 12.345, 3.2, 0.004, ""},
                                         {"Hour bins (unadjusted, 48h)", std::nullopt, std::nullopt, std::nullopt, "x"}});
    CHECK(t.header == cols);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "12.3");
    CHECK(t.rows[0][3] == "0.00");
    CHECK(t.rows[1][1] == "-");
    CHECK(t.rows[1][3] == "-");
  }

  TEST_CASE("launch effects carry mean and median at one decimal") {
    LaunchEffects e;
    e.n = 3;
    e.horizons = {{Horizon::H24, 10.04, 9.0}, {Horizon::H48, 20.06, 19.5}, {Horizon::D7, 30.0, 29.0}};
    const auto t = launch_effects_table(e);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][t.column("horizon")] == "24h");
    CHECK(t.rows[0][t.column("mean_stars")] == "10.0");
    CHECK(t.rows[1][t.column("mean_stars")] == "20.1");
    CHECK(t.rows[1][t.column("median_stars")] == "19.5");
  }

  TEST_CASE("svg is deterministic and self-contained") {
    FigureSpec f;
    f.title = "Stars around launch";
    f.series = {{"mean", {-1, 0, 1}, {0, 5, 12}}, {"median", {-1, 0, 1}, {0, 3, 8}}};
    const auto a = render_svg(f);
    CHECK(a == render_svg(f));
    CHECK(a.find("<script") == std::string::npos);
    CHECK(a.find("href") == std::string::npos);
    CHECK(a.find("class=\"launch\"") != std::string::npos);
    CHECK(a.find("data-label=\"median\"") != std::string::npos);
  }

  TEST_CASE("all-zero curve is a flat line on the axis") {
    FigureSpec f;
    f.series = {{"zero", {-7, 0, 7}, {0, 0, 0}}};
    const auto svg = render_svg(f);
    const std::regex pts("points=\"([^\"]*)\"");
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, pts));
    std::set<std::string> ys;
    const std::string p = m[1];
    const std::regex pair("[0-9.]+,([0-9.]+)");
    for (std::sregex_iterator it(p.begin(), p.end(), pair), end; it != end; ++it) ys.insert((*it)[1]);
    CHECK(ys.size() == 1);
  }

  TEST_CASE("bar heights are proportional to the values") {
    FigureSpec f;
    f.kind = FigureKind::HourBars;
    f.series = {{"48h", {}, {10, 20, 200, 50}}};
    f.bar_labels = {"00-05", "06-11", "12-17", "18-23"};
    const auto svg = render_svg(f);
    const auto h = attr_values(svg, "rect", "height");
    REQUIRE(h.size() == 4);
    CHECK(std::max_element(h.begin(), h.end()) - h.begin() == 2);
    CHECK(h[1] == doctest::Approx(2 * h[0]).epsilon(0.01));
    CHECK(h[3] == doctest::Approx(5 * h[0]).epsilon(0.01));
  }

  TEST_CASE("bad data is rejected naming the series") {
    FigureSpec f;
    f.series = {{"broken", {0, 1}, {1, std::nan("")}}};
    CHECK_THROWS_WITH_AS(render_svg(f), doctest::Contains("broken"), std::invalid_argument);
    FigureSpec empty;
    CHECK_THROWS_AS(render_svg(empty), std::invalid_argument);
  }

  TEST_CASE("summary lists counts and every exclusion") {
    SummaryInputs in;
    in.counts.total_pairs = 10;
    in.counts.valid_series = 8;
    in.counts.show_hn = 4;
    in.counts.non_show_hn = 6;
    in.counts.exclusions = {{"a/b", "stargazer access restricted (HTTP 403)"}, {"c/d", "repository unavailable (HTTP 404)"}};
    const auto s = write_summary(in);
    CHECK(s.find("Total pairs: 10") != std::string::npos);
    CHECK(s.find("Valid series: 8") != std::string::npos);
    CHECK(s.find("Excluded: 2") != std::string::npos);
    CHECK(s.find("a/b: stargazer access restricted (HTTP 403)") != std::string::npos);
    CHECK(s.find("c/d: repository unavailable (HTTP 404)") != std::string::npos);
  }

  TEST_CASE("dataset table has one row per statistic") {
    DatasetCounts c;
    c.total_pairs = 138;
    c.period = "2024-01-01 to 2025-12-31";
    const auto t = dataset_table(c);
    CHECK(t.header == std::vector<std::string>{"statistic", "value"});
    CHECK(t.rows[0][0] == "Total HN-GitHub pairs");
    CHECK(t.rows[0][1] == "138");
  }

  TEST_CASE("manifest lists files sorted with sizes, excluding itself") {
    testing::TempDir dir;
    std::filesystem::create_directories(dir / "tables");
    std::ofstream(dir / "tables" / "b.csv") << "xyz";
    std::ofstream(dir / "a.txt") << "12345";
    std::ofstream(dir / "manifest.csv") << "old";
    const auto m = collect_manifest(dir.path());
    REQUIRE(m.size() == 2);
    CHECK(m[0].path == "a.txt");
    CHECK(m[0].bytes == 5);
    CHECK(m[1].path == "tables/b.csv");
    CHECK(manifest_table(m).header == std::vector<std::string>{"path", "bytes"});
  }
}
