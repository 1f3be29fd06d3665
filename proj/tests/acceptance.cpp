// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "launchpulse/align.hpp"
#include "launchpulse/eventstudy.hpp"
#include "launchpulse/features.hpp"
#include "launchpulse/http.hpp"
#include "launchpulse/inference.hpp"
#include "launchpulse/jsonl.hpp"
#include "launchpulse/learn.hpp"
#include "launchpulse/pipeline.hpp"
#include "launchpulse/csv.hpp"
#include "oracles.hpp"
#include "pipeline_support.hpp"
#include "support.hpp"

using namespace launchpulse;
namespace fs = std::filesystem;

namespace {

/// Thrown by a criterion body to report a failed expectation.
struct Unmet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Unmet(what);
}

struct Gate {
  int failures = 0;

  void run(const std::string& name, double limit_s, const std::function<std::string()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = body();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && limit_s > 0 && secs >= limit_s) {
      ok = false;
      detail = fmt::format("took {:.2f}s, limit {:.0f}s", secs, limit_s);
    }
    if (!ok) ++failures;
    std::cout << fmt::format("{} {} ({:.2f}s){}{}", ok ? "PASS" : "FAIL", name, secs, detail.empty() ? "" : ": ", detail)
              << std::endl;
  }
};

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd X(Z.rows(), Z.cols() + 1);
  X.col(0).setOnes();
  X.rightCols(Z.cols()) = Z;
  return X;
}

std::string ols_oracle() {
  Rng rng(2024);
  double worst = 0;
  for (int p = 0; p < 50; ++p) {
    const auto k = static_cast<Eigen::Index>(2 + rng.below(5));  // 2..6 columns incl. intercept
    const auto n = static_cast<Eigen::Index>(k + 4 + rng.below(static_cast<std::uint64_t>(40 - k - 4 + 1)));
    Eigen::MatrixXd X = with_intercept(testing::random_matrix(rng, n, k - 1));
    Eigen::VectorXd beta = testing::random_vector(rng, k);
    Eigen::VectorXd e = testing::random_vector(rng, n);
    for (Eigen::Index i = 0; i < n; ++i) e(i) *= 0.2 + std::fabs(X(i, k - 1));
    Eigen::VectorXd y = X * beta + e;
    const auto sol = ols_fit(X, y);
    const Eigen::MatrixXd V = hc1_covariance(X, sol.residuals);
    const auto ref = oracle::ols(X, y);
    const double db = (sol.coefficients - ref.beta).cwiseAbs().maxCoeff();
    const double dv = (V - ref.hc1).cwiseAbs().maxCoeff();
    worst = std::max({worst, db, dv});
    expect(db <= 1e-8, fmt::format("problem {}: coefficient diff {:.3e}", p, db));
    expect(dv <= 1e-8, fmt::format("problem {}: HC1 diff {:.3e}", p, dv));
  }
  return fmt::format("50 problems, max elementwise diff {:.2e}", worst);
}

std::string enet_limits() {
  Rng rng(77);
  double worst_ols = 0, worst_kkt = 0;
  for (int p = 0; p < 20; ++p) {
    const auto n = static_cast<Eigen::Index>(30 + rng.below(60));
    const auto k = static_cast<Eigen::Index>(2 + rng.below(8));
    Eigen::MatrixXd X = testing::random_matrix(rng, n, k);
    Eigen::VectorXd y = X * testing::random_vector(rng, k) + testing::random_vector(rng, n);

    const auto m0 = learn::elastic_net_fit(X, y, 0.0, 1.0, 1e-12, 200000);
    const auto ref = oracle::ols(with_intercept(X), y);
    const double d = std::max((m0.coefficients - ref.beta.tail(k)).cwiseAbs().maxCoeff(),
                              std::fabs(m0.intercept - ref.beta(0)));
    worst_ols = std::max(worst_ols, d);
    expect(d <= 1e-6, fmt::format("problem {}: lambda=0 differs from OLS by {:.3e}", p, d));

    const double lmax = learn::enet_lambda_max(X, y, 1.0);
    for (double f : {1.0, 1.5, 10.0}) {
      const auto mz = learn::elastic_net_fit(X, y, lmax * f, 1.0);
      expect(mz.coefficients.isZero(0.0), fmt::format("problem {}: slopes nonzero at {} x lambda_max", p, f));
    }

    const double alpha = 0.1 + 0.9 * rng.uniform();
    const double lam = learn::enet_lambda_max(X, y, alpha) * (0.01 + 0.5 * rng.uniform());
    const auto m = learn::elastic_net_fit(X, y, lam, alpha, 1e-10, 200000);
    const double kkt = oracle::enet_kkt(X, y, m.std_coefficients, lam, alpha);
    worst_kkt = std::max(worst_kkt, kkt);
    expect(kkt <= 1e-5, fmt::format("problem {}: KKT residual {:.3e}", p, kkt));
  }
  return fmt::format("20 problems, max |lambda=0 - OLS| {:.2e}, max KKT {:.2e}", worst_ols, worst_kkt);
}

std::string gbt_monotone() {
  Rng rng(99);
  for (int dset = 0; dset < 10; ++dset) {
    const auto n = static_cast<Eigen::Index>(80 + rng.below(120));
    const auto k = static_cast<Eigen::Index>(2 + rng.below(6));
    Eigen::MatrixXd X = testing::random_matrix(rng, n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = std::sin(3 * X(i, 0)) + X(i, k - 1) * X(i, 0) + 0.3 * rng.normal();
    learn::GbtOptions opt;
    opt.n_trees = 100;
    opt.learning_rate = 0.05 + 0.3 * rng.uniform();
    opt.max_depth = 1 + static_cast<int>(rng.below(4));
    opt.seed = static_cast<std::uint64_t>(dset);
    const auto model = learn::gbt_fit(X, y, opt);
    double prev = (y.array() - y.mean()).square().mean();
    for (int t = 1; t <= opt.n_trees; ++t) {
      const double mse = (model.predict(X, t) - y).array().square().mean();
      expect(mse <= prev + 1e-12, fmt::format("dataset {}: MSE rose at tree {} ({} -> {})", dset, t, prev, mse));
      prev = mse;
    }
  }
  Eigen::MatrixXd X(6, 1);
  X << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXd y(6);
  y << 0, 0, 0, 10, 10, 10;
  learn::GbtOptions one;
  one.n_trees = 1;
  one.learning_rate = 1.0;
  one.max_depth = 1;
  one.min_leaf = 1;
  const auto stump = learn::gbt_fit(X, y, one);
  expect(stump.trees.at(0).nodes.at(0).threshold == 3.5, "stump threshold is not 3.5");
  expect((stump.predict(X) - y).cwiseAbs().maxCoeff() == 0.0, "single split does not fit exactly");
  return "10 datasets monotone; stump threshold 3.5, exact fit";
}

std::string closed_loop() {
  testing::TempDir dir;
  synth::SynthSpec spec;  // 138 repositories
  expect(testing::run_synth_pipeline(spec, dir / "loop") == 0, "pipeline failed on the synthetic corpus");
  const auto truth = testing::load_truth(dir / "loop");
  const auto verdict = synth::verify_against_manifest(dir / "loop" / "data", dir / "loop" / "out", truth);
  expect(verdict.ok(), "manifest mismatch: " + (verdict.failures.empty() ? "" : verdict.failures.front()));

  // Event-curve means against a brute-force scan of the raw fixture timestamps.
  const auto fixture = FixtureCorpus::load(dir / "loop" / "fixture.json");
  const auto series = read_records<AlignedSeries>(dir / "loop" / "data" / "aligned" / "series.jsonl");
  const auto curve = event_curve(series, Statistic::Mean);
  std::vector<std::vector<double>> brute;
  for (const auto& s : series) brute.push_back(oracle::cumulative_curve(fixture.repos.at(s.slug.full_name()).stargazers, s.t0));
  double worst = 0;
  for (std::size_t d = 0; d < 15; ++d) {
    std::vector<double> col;
    for (const auto& b : brute) col.push_back(b[d]);
    worst = std::max(worst, std::fabs(curve.values[d] - oracle::mean_of(col)));
  }
  expect(worst <= 1e-9, fmt::format("event curve differs from brute force by {:.3e}", worst));

  // Importance order on 200 repositories.
  synth::SynthSpec big;
  big.n_repos = 200;
  big.check_importance = true;
  expect(testing::run_synth_pipeline(big, dir / "imp") == 0, "pipeline failed on the 200-repo corpus");
  const auto big_truth = testing::load_truth(dir / "imp");
  const auto v2 = synth::verify_against_manifest(dir / "imp" / "data", dir / "imp" / "out", big_truth);
  expect(v2.ok(), "200-repo check: " + (v2.failures.empty() ? "" : v2.failures.front()));
  std::string order;
  for (const auto& f : big_truth.importance_order) order += (order.empty() ? "" : " > ") + f;
  return fmt::format("{} checks on {} repos, curve diff {:.1e}; importance {} ({} checks)", verdict.checks,
                     truth.repos.size(), worst, order, v2.checks);
}

std::string split_contract() {
  const auto s = learn::train_test_split(138, 0.8, 42);
  expect(s.test.size() == 28, fmt::format("test n = {}", s.test.size()));
  expect(s.train.size() == 110, fmt::format("train n = {}", s.train.size()));
  return "138 rows -> test n 28";
}

std::string hour_bins() {
  const char* expected[] = {"00-05", "06-11", "12-17", "18-23"};
  for (int h = 0; h < 24; ++h) {
    const int b = hour_bin(h);
    const std::string label = hour_bin_label(b);
    expect(label == expected[h / 6], fmt::format("hour {} -> {}", h, label));
    expect(std::stoi(label.substr(0, 2)) <= h && h <= std::stoi(label.substr(3, 2)), fmt::format("hour {} outside {}", h, label));
  }
  bool threw = false;
  try {
    hour_bin(24);
  } catch (const std::out_of_range&) {
    threw = true;
  }
  expect(threw, "hour 24 accepted");
  return "24 hours mapped";
}

std::string rate_limiter() {
  SimulatedClock clock;
  const std::size_t budget = 60;
  const auto window = std::chrono::hours(1);
  RateLimiter limiter(budget, window, clock);
  Rng rng(5);
  std::vector<Clock::time_point> issued;
  for (int i = 0; i < 1000; ++i) {
    if (rng.bernoulli(0.3)) clock.advance(std::chrono::seconds(rng.below(240)));
    limiter.acquire();
    issued.push_back(clock.now());
  }
  std::size_t peak = 0;
  for (std::size_t i = 0, j = 0; i < issued.size(); ++i) {
    while (issued[i] - issued[j] >= window) ++j;
    peak = std::max(peak, i - j + 1);
  }
  expect(peak <= budget, fmt::format("{} requests inside one window", peak));
  return fmt::format("1000 requests, peak {} per window (budget {})", peak, budget);
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", LAUNCHPULSE_CLI, args, log.string());
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string offline_args(const fs::path& run, const fs::path& fixture) {
  return fmt::format("--offline --fixtures \"{}\" --data-dir \"{}\" --out-dir \"{}\" --cache-dir \"{}\" all",
                     fixture.string(), (run / "data").string(), (run / "out").string(), (run / "cache").string());
}

std::string end_to_end() {
  testing::TempDir dir;
  const auto fixture = testing::source_dir() / "fixtures" / "corpus" / "fixture.json";
  for (const char* run : {"a", "b"}) {
    const int rc = run_cli(offline_args(dir / run, fixture), dir / (std::string(run) + ".log"));
    expect(rc == 0, fmt::format("run {} exited {}: {}", run, rc, read_text_file(dir / (std::string(run) + ".log"))));
  }
  const auto a = testing::snapshot_tree(dir / "a" / "out");
  const auto b = testing::snapshot_tree(dir / "b" / "out");
  expect(!a.empty(), "empty out tree");
  for (const auto& [path, bytes] : a) {
    auto it = b.find(path);
    expect(it != b.end(), path + " missing from second run");
    expect(it->second == bytes, path + " differs between runs");
  }
  expect(a.size() == b.size(), "second run has extra files");
  for (const auto& rel : expected_outputs()) expect(a.count(rel) == 1, "missing output " + rel);

  // Split contract on the shipped corpus itself.
  const auto rows = read_csv(dir / "a" / "data" / "features" / "rows.csv");
  const auto perf = read_csv(dir / "a" / "out" / "tables" / "model_performance.csv");
  expect(rows.rows.size() == 138, fmt::format("{} modeling rows", rows.rows.size()));
  for (const auto& r : perf.rows) expect(r[perf.column("test_n")] == "28", "model_performance test_n " + r[perf.column("test_n")]);
  return fmt::format("{} files identical across two runs; 138 rows, test n 28", a.size());
}

std::string degradation() {
  testing::TempDir dir;
  std::ofstream(dir / "spec.conf") << "n_repos = 40\nrestricted_repos = 1\nseed = 3\n";
  int rc = run_cli(fmt::format("synth --spec \"{}\" --out \"{}\"", (dir / "spec.conf").string(), (dir / "corpus").string()),
                   dir / "synth.log");
  expect(rc == 0, "synth exited " + std::to_string(rc) + ": " + read_text_file(dir / "synth.log"));
  rc = run_cli(offline_args(dir / "run", dir / "corpus" / "fixture.json"), dir / "run.log");
  expect(rc == 0, "run exited " + std::to_string(rc) + ": " + read_text_file(dir / "run.log"));

  const auto truth = testing::load_truth(dir / "corpus");
  std::string restricted;
  for (const auto& p : truth.repos)
    if (p.fate == synth::RepoFate::Restricted) restricted = p.slug.full_name();
  expect(!restricted.empty(), "corpus has no restricted repository");

  const auto ex = read_csv(dir / "run" / "data" / "aligned" / "exclusions.csv");
  bool recorded = false;
  for (const auto& r : ex.rows) recorded = recorded || (r[0] == restricted && r[1].find("403") != std::string::npos);
  expect(recorded, "exclusions.csv lacks " + restricted);
  const auto summary = read_text_file(dir / "run" / "out" / "summary_pipeline.txt");
  expect(summary.find(restricted) != std::string::npos, "summary does not mention " + restricted);
  for (const auto& rel : expected_outputs()) expect(fs::exists(dir / "run" / "out" / rel), "missing output " + rel);
  const auto ds = read_csv(dir / "run" / "out" / "tables" / "dataset.csv");
  std::string metadata_only;
  for (const auto& r : ds.rows)
    if (r[0] == "Metadata-only repositories") metadata_only = r[1];
  expect(metadata_only == "1", "metadata-only count " + metadata_only);
  return restricted + " excluded (403), " + std::to_string(expected_outputs().size()) + " outputs present";
}

std::string monotone_deltas() {
  Rng rng(31);
  for (int trial = 0; trial < 5000; ++trial) {
    AlignedSeries s;
    const double density = rng.uniform(0, 3);
    for (auto& h : s.hourly) h = rng.poisson(density) * (rng.bernoulli(0.1) ? 10 : 1);
    const auto d24 = delta_stars(s, Horizon::H24), d48 = delta_stars(s, Horizon::H48), d7 = delta_stars(s, Horizon::D7);
    expect(d24 <= d48 && d48 <= d7, fmt::format("trial {}: {} / {} / {}", trial, d24, d48, d7));
  }
  return "5000 random series";
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  Gate gate;
  gate.run("statistical oracle equivalence (OLS + HC1, 1e-8)", 10, ols_oracle);
  gate.run("elastic net limits (lambda=0, lambda_max, KKT 1e-5)", 30, enet_limits);
  gate.run("gradient boosting monotone training MSE + single split", 30, gbt_monotone);
  gate.run("synthetic closed loop (deltas, curve 1e-9, importance order)", 60, closed_loop);
  gate.run("split contract (138 -> test n 28)", 1, split_contract);
  gate.run("hour-bin mapping (24 hours, 4 bins)", 1, hour_bins);
  gate.run("rate limiter sliding window (1000 requests)", 5, rate_limiter);
  gate.run("end-to-end determinism (all --offline twice)", 300, end_to_end);
  gate.run("degradation (one stargazer-restricted repository)", 0, degradation);
  gate.run("monotone deltas (24h <= 48h <= 7d)", 0, monotone_deltas);
  std::cout << fmt::format("{} of 10 criteria passed", 10 - gate.failures) << std::endl;
  return gate.failures == 0 ? 0 : 1;
}
