#include "launchpulse/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "launchpulse/csv.hpp"
#include "launchpulse/eventstudy.hpp"
#include "launchpulse/features.hpp"
#include "launchpulse/gh_ingest.hpp"
#include "launchpulse/hn_ingest.hpp"
#include "launchpulse/inference.hpp"
#include "launchpulse/jsonl.hpp"
#include "launchpulse/report.hpp"

namespace launchpulse {

namespace fs = std::filesystem;

namespace {

constexpr Horizon kHorizons[] = {Horizon::H24, Horizon::H48, Horizon::D7};
constexpr FeatureSet kFeatureSets[] = {FeatureSet::PreLaunchOnly, FeatureSet::WithLeaky};
const char* const kModels[] = {"elastic_net", "gradient_boosting"};
const char* const kContrasts[] = {"show_hn", "weekend", "hour_bin"};
const std::vector<std::string> kControls = {"baseline_stars", "hn_score", "repo_age_days", "title_length"};
const std::vector<std::string> kDayDummies = {"dow_tue", "dow_wed", "dow_thu", "dow_fri", "dow_sat", "dow_sun"};

constexpr std::size_t kAlgoliaBudgetPerHour = 10000;
constexpr std::size_t kGithubBudgetWithToken = 5000;
constexpr std::size_t kGithubBudgetAnonymous = 60;

SystemClock& system_clock() {
  static SystemClock clock;
  return clock;
}

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw MissingInput(p);
}

// ---------------------------------------------------------------------------
// Transport wiring

struct Wiring {
  Clock* clock = nullptr;
  Transport* transport = nullptr;
  std::unique_ptr<NetworkTransport> owned_network;
  std::unique_ptr<ResponseStore> store;
};

Transport& fixture_transport(PipelineContext& ctx) {
  if (ctx.fixture) return *ctx.fixture;
  if (!ctx.owned_fixture) {
    require_file(ctx.config.fixtures);
    const auto text = read_text_file(ctx.config.fixtures);
    ctx.owned_fixture = std::make_shared<FixtureTransport>(FixtureCorpus::from_json(nlohmann::json::parse(text)));
    ctx.fixture_digest = sha256_hex(text).substr(0, 16);
  }
  return *ctx.owned_fixture;
}

Wiring wire(PipelineContext& ctx) {
  Wiring w;
  w.clock = ctx.clock ? ctx.clock : &system_clock();
  fs::path cache_root = ctx.config.cache_dir;
  if (ctx.config.offline) {
    w.transport = &fixture_transport(ctx);
    if (ctx.fixture_digest.empty()) {
      auto* ft = dynamic_cast<FixtureTransport*>(ctx.fixture);
      ctx.fixture_digest = ft ? sha256_hex(ft->corpus().to_json().dump()).substr(0, 16) : "injected";
    }
    // One fixture's responses are never served for another.
    cache_root = cache_root / "fixtures" / ctx.fixture_digest;
  } else if (ctx.network) {
    w.transport = ctx.network;
  } else {
    w.owned_network = std::make_unique<NetworkTransport>();
    w.transport = w.owned_network.get();
  }
  if (ctx.config.use_cache) w.store = std::make_unique<ResponseStore>(cache_root, *w.clock);
  return w;
}

RateLimiter make_limiter(const PipelineContext& ctx, Clock& clock, std::size_t live_budget) {
  if (ctx.config.offline) return RateLimiter::unlimited(clock);
  return RateLimiter(live_budget, std::chrono::hours(1), clock);
}

// ---------------------------------------------------------------------------
// Shared readers

std::vector<LaunchEvent> load_pairs(const DataPaths& p) {
  require_file(p.pairs());
  return read_records<LaunchEvent>(p.pairs());
}

std::vector<FeatureRow> load_rows(const DataPaths& p) {
  require_file(p.rows());
  return feature_rows_from_csv(read_csv(p.rows()));
}

std::vector<AlignedSeries> load_series(const DataPaths& p) {
  require_file(p.series());
  return read_records<AlignedSeries>(p.series());
}

void emit(StageReport& r, const fs::path& path, const CsvTable& table) {
  write_csv(path, table);
  r.outputs.push_back(path);
}

void emit_text(StageReport& r, const fs::path& path, const std::string& text) {
  write_text_file(path, text);
  r.outputs.push_back(path);
}

// ---------------------------------------------------------------------------
// Stages

void stage_fetch_hn(PipelineContext& ctx, StageReport& r) {
  const auto& cfg = ctx.config;
  auto w = wire(ctx);
  auto limiter = make_limiter(ctx, *w.clock, kAlgoliaBudgetPerHour);
  ApiClient client(w.store.get(), *w.transport, limiter, *w.clock, {}, cfg.seed);
  hn::SearchQuery q;
  q.keywords = cfg.keywords;
  q.start = cfg.from;
  q.end = cfg.to;
  q.page_limit = cfg.hn_page_limit;
  q.hits_per_page = cfg.hn_hits_per_page;
  const auto posts = hn::search_posts(client, q, r.warnings);
  const auto events = hn::resolve_launch_events(posts);
  const DataPaths p{cfg.data_dir};
  write_records(p.hn_posts(), posts);
  write_records(p.pairs(), events);
  r.outputs = {p.hn_posts(), p.pairs()};
  r.network_requests = client.network_requests();
  spdlog::info("fetch-hn: {} posts, {} repository pairs", posts.size(), events.size());
}

void stage_fetch_gh(PipelineContext& ctx, StageReport& r) {
  const auto& cfg = ctx.config;
  const DataPaths p{cfg.data_dir};
  const auto events = load_pairs(p);
  auto w = wire(ctx);
  const std::size_t budget =
      cfg.rate_budget ? static_cast<std::size_t>(*cfg.rate_budget)
                      : (cfg.github_token ? kGithubBudgetWithToken : kGithubBudgetAnonymous);
  auto limiter = make_limiter(ctx, *w.clock, budget);
  ApiClient client(w.store.get(), *w.transport, limiter, *w.clock, {}, cfg.seed);
  gh::GhOptions opt;
  opt.max_pages = cfg.max_pages;
  opt.token = cfg.github_token;
  std::vector<RepoSlug> slugs;
  for (const auto& e : events) slugs.push_back(e.slug);
  const auto fetched = gh::fetch_all(client, slugs, opt, cfg.workers, r.warnings);

  std::vector<RepoSnapshot> snapshots;
  std::vector<RepoFetchStatus> statuses;
  fs::remove_all(p.stars_dir());
  for (const auto& f : fetched) {
    if (f.snapshot) {
      snapshots.push_back(*f.snapshot);
      const auto path = p.stars_dir() / (f.stars.slug.file_stem() + ".jsonl");
      write_star_log(path, f.stars);
    }
    statuses.push_back(f.status);
  }
  write_records(p.repos(), snapshots);
  write_records(p.gh_status(), statuses);
  r.outputs = {p.repos(), p.gh_status(), p.stars_dir()};
  r.network_requests = client.network_requests();
  spdlog::info("fetch-gh: {} repositories, {} with metadata", fetched.size(), snapshots.size());
}

void stage_align(PipelineContext& ctx, StageReport& r) {
  const DataPaths p{ctx.config.data_dir};
  const auto events = load_pairs(p);
  require_file(p.gh_status());
  std::map<RepoSlug, RepoFetchStatus> status;
  for (auto& s : read_records<RepoFetchStatus>(p.gh_status())) status.emplace(s.slug, s);

  std::vector<AlignedSeries> series;
  CsvTable excl;
  excl.header = {"slug", "reason"};
  for (const auto& e : events) {
    const auto it = status.find(e.slug);
    std::string reason;
    if (it == status.end()) {
      reason = "not fetched";
    } else if (!it->second.metadata_ok) {
      reason = it->second.reason.empty() ? "metadata unavailable" : it->second.reason;
    } else if (!it->second.stars_complete) {
      reason = it->second.reason.empty() ? "star history incomplete" : it->second.reason;
    }
    if (reason.empty()) {
      const auto path = p.stars_dir() / (e.slug.file_stem() + ".jsonl");
      if (!fs::exists(path)) {
        reason = "star log missing";
      } else {
        const auto log = read_star_log(path);
        if (!log.complete) {
          reason = log.reason.empty() ? "star history incomplete" : log.reason;
        } else {
          series.push_back(bucket_hourly(log, build_window(e.t0())));
          continue;
        }
      }
    }
    excl.rows.push_back({e.slug.full_name(), reason});
    r.warnings.add(fmt::format("{} excluded: {}", e.slug.full_name(), reason));
  }
  write_records(p.series(), series);
  emit(r, p.exclusions(), excl);
  r.outputs.insert(r.outputs.begin(), p.series());
  spdlog::info("align: {} series, {} excluded", series.size(), excl.rows.size());
}

CsvTable empty_matrix_csv(FeatureSet fs, Horizon h) {
  CsvTable t;
  t.header = design_columns(fs, h);
  t.header.push_back(std::string("target:d") + (h == Horizon::H24 ? "24" : h == Horizon::H48 ? "48" : "7"));
  return t;
}

void stage_features(PipelineContext& ctx, StageReport& r) {
  const DataPaths p{ctx.config.data_dir};
  const auto events = load_pairs(p);
  require_file(p.repos());
  const auto series = load_series(p);
  std::map<RepoSlug, LaunchEvent> by_slug;
  for (const auto& e : events) by_slug.emplace(e.slug, e);
  std::map<RepoSlug, RepoSnapshot> snaps;
  for (auto& s : read_records<RepoSnapshot>(p.repos())) snaps.emplace(s.slug, s);

  std::vector<FeatureRow> rows;
  CsvTable rej;
  rej.header = {"slug", "reason"};
  for (const auto& s : series) {
    const auto e = by_slug.find(s.slug);
    const auto snap = snaps.find(s.slug);
    if (e == by_slug.end() || snap == snaps.end()) {
      rej.rows.push_back({s.slug.full_name(), e == by_slug.end() ? "no launch event" : "no repository snapshot"});
      continue;
    }
    auto built = build_feature_row(e->second, snap->second, s);
    if (auto* row = std::get_if<FeatureRow>(&built)) {
      rows.push_back(std::move(*row));
    } else {
      const auto& why = std::get<RowRejected>(built).reason;
      rej.rows.push_back({s.slug.full_name(), why});
      r.warnings.add(fmt::format("{} rejected: {}", s.slug.full_name(), why));
    }
  }
  emit(r, p.rows(), feature_rows_to_csv(rows));
  emit(r, p.rejections(), rej);
  for (auto fs_ : kFeatureSets) {
    for (auto h : kHorizons) {
      const auto path = p.root / "features" / fmt::format("matrix_{}_{}.csv", feature_set_name(fs_), horizon_name(h));
      if (rows.empty()) {
        emit(r, path, empty_matrix_csv(fs_, h));
      } else {
        emit(r, path, design_matrix_to_csv(assemble_design_matrix(rows, fs_, h, &r.warnings), h));
      }
    }
  }
  spdlog::info("features: {} rows, {} rejected", rows.size(), rej.rows.size());
}

void stage_study(PipelineContext& ctx, StageReport& r) {
  const DataPaths p{ctx.config.data_dir};
  const auto series = load_series(p);
  const auto rows = load_rows(p);
  const fs::path tables = ctx.config.out_dir / "tables";

  std::optional<EventCurve> mean_curve, median_curve;
  if (!series.empty()) {
    mean_curve = event_curve(series, Statistic::Mean);
    median_curve = event_curve(series, Statistic::Median);
  }
  emit(r, tables / "event_curves.csv", report::event_curves_table(mean_curve, median_curve));

  std::optional<LaunchEffects> effects;
  std::vector<GroupComparison> comparisons;
  if (!rows.empty()) {
    effects = launch_effect_summary(rows);
    for (auto g : {Grouping::ShowHn, Grouping::Weekend, Grouping::HourBin})
      for (auto h : kHorizons) comparisons.push_back(group_comparison(rows, g, h));
  }
  emit(r, tables / "launch_effects.csv", report::launch_effects_table(effects));
  emit(r, tables / "group_comparisons.csv", report::group_comparisons_table(comparisons));
}

// ---------------------------------------------------------------------------
// Inference

struct ContrastFit {
  std::vector<CoefRow> rows;
  std::string note;  // why the fit is absent, or dropped columns
};

std::vector<std::string> contrast_columns(const std::string& contrast) {
  if (contrast == "show_hn") return {"is_show_hn"};
  if (contrast == "weekend") return {"is_weekend"};
  return {"hour_06_11", "hour_12_17", "hour_18_23"};
}

ContrastFit fit_contrast(const std::vector<FeatureRow>& rows, const std::string& contrast, Horizon h, Warnings& warnings) {
  ContrastFit out;
  std::vector<std::string> cols = {"intercept"};
  for (const auto& c : contrast_columns(contrast)) cols.push_back(c);
  for (const auto& c : kControls) cols.push_back(c);
  // Day-of-week dummies would absorb the weekend indicator.
  if (contrast != "weekend")
    for (const auto& c : kDayDummies) cols.push_back(c);

  std::vector<std::string> kept, dropped;
  for (const auto& c : cols) {
    bool constant = c != "intercept";
    if (constant && !rows.empty()) {
      const double first = design_value(rows.front(), c);
      constant = std::all_of(rows.begin(), rows.end(), [&](const auto& row) { return design_value(row, c) == first; });
    }
    if (c == "intercept" || !constant || rows.empty()) {
      kept.push_back(c);
    } else {
      dropped.push_back(c);
    }
  }
  if (!dropped.empty()) {
    std::string list;
    for (const auto& d : dropped) list += (list.empty() ? "" : " ") + d;
    out.note = "dropped constant columns: " + list;
    warnings.add(fmt::format("regression {} {}: {}", contrast, horizon_name(h), out.note));
  }
  if (rows.size() <= kept.size()) {
    out.note = fmt::format("not estimated: {} rows for {} columns", rows.size(), kept.size());
    warnings.add(fmt::format("regression {} {}: {}", contrast, horizon_name(h), out.note));
    return out;
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kept.size()));
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = design_value(row, kept[static_cast<std::size_t>(j)]);
    y(i) = static_cast<double>(row.target(h));
  }
  try {
    const auto fit = fit_regression(X, y, kept);
    std::vector<std::string> controls = kControls;
    controls.insert(controls.end(), kDayDummies.begin(), kDayDummies.end());
    out.rows = coef_table(fit, controls);
  } catch (const RankDeficientError& e) {
    out.note = std::string("not estimated: ") + e.what();
    warnings.add(fmt::format("regression {} {}: {}", contrast, horizon_name(h), out.note));
  }
  return out;
}

const CoefRow* find_coef(const ContrastFit& f, const std::string& name) {
  for (const auto& r : f.rows)
    if (r.name == name) return &r;
  return nullptr;
}

std::vector<report::TimingEffect> timing_effects(const std::vector<FeatureRow>& rows,
                                                 const std::map<std::string, ContrastFit>& fits) {
  std::vector<report::TimingEffect> out;
  if (rows.empty()) return out;
  const auto effects = launch_effect_summary(rows);
  for (const auto& h : effects.horizons) {
    out.push_back({fmt::format("Delta {} stars", horizon_name(h.horizon)), h.mean, std::nullopt, std::nullopt,
                   fmt::format("mean over {} repositories; median {}", effects.n, fmt_stars(h.median))});
  }
  auto adjusted = [&](const std::string& label, const std::string& key, const std::string& column, Grouping g) {
    report::TimingEffect t{label, std::nullopt, std::nullopt, std::nullopt, ""};
    const auto& fit = fits.at(key);
    const auto gc = group_comparison(rows, g, Horizon::H48);
    std::string direction = "unadjusted difference unavailable";
    if (gc.difference) {
      const auto& hi = *gc.difference > 0 ? gc.groups[1].label : gc.groups[0].label;
      direction = *gc.difference == 0 ? "unadjusted means equal"
                                      : fmt::format("{} higher unadjusted ({})", hi, fmt_stars(*gc.difference));
    }
    if (const auto* c = find_coef(fit, column)) {
      t.coefficient = c->coefficient;
      t.std_error = c->se;
      t.p_value = c->p;
      t.note = direction + (c->perfect_fit ? "; perfect fit" : "");
    } else {
      t.note = fit.note.empty() ? direction : fit.note;
    }
    out.push_back(t);
  };
  adjusted("Show HN vs Others (48h)", "show_hn_48h", "is_show_hn", Grouping::ShowHn);
  adjusted("Weekend vs Weekday (48h)", "weekend_48h", "is_weekend", Grouping::Weekend);
  const auto hb = group_comparison(rows, Grouping::HourBin, Horizon::H48);
  report::TimingEffect t{"Hour bins (unadjusted, 48h)", hb.difference, std::nullopt, std::nullopt, ""};
  t.note = hb.difference ? fmt::format("{} UTC best, {} UTC worst", hb.best_group, hb.worst_group)
                         : "fewer than two hour bins populated";
  out.push_back(t);
  return out;
}

void stage_infer(PipelineContext& ctx, StageReport& r) {
  const DataPaths p{ctx.config.data_dir};
  const auto rows = load_rows(p);
  const fs::path tables = ctx.config.out_dir / "tables";
  std::map<std::string, ContrastFit> fits;
  std::ostringstream txt;
  txt << "launchpulse inference\n\n";
  txt << fmt::format("OLS with HC1 standard errors, two-sided Student-t tests; n = {} rows.\n", rows.size());
  txt << "Controls: baseline_stars, hn_score, repo_age_days, title_length, day-of-week dummies (omitted for the "
         "weekend contrast).\n";
  for (const std::string contrast : kContrasts) {
    for (auto h : kHorizons) {
      const auto key = fmt::format("{}_{}", contrast, horizon_name(h));
      auto fit = fit_contrast(rows, contrast, h, r.warnings);
      emit(r, tables / fmt::format("regression_{}.csv", key), report::regression_table(fit.rows));
      txt << fmt::format("\n{} ({})\n", contrast, horizon_name(h));
      if (!fit.note.empty()) txt << "  note: " << fit.note << '\n';
      for (const auto& c : fit.rows) {
        if (c.is_control || c.name == "intercept") continue;
        txt << fmt::format("  {}: coef {}  se {}  t {}  p {}{}\n", c.name, fmt_stars(c.coefficient), fmt_stars(c.se),
                           fmt_fixed(c.t, 2), fmt_pvalue(c.p), c.perfect_fit ? "  [perfect fit]" : "");
      }
      fits.emplace(key, std::move(fit));
    }
  }
  emit(r, tables / "timing_effects.csv", report::timing_effects_table(timing_effects(rows, fits)));
  emit_text(r, ctx.config.out_dir / "summary_inference.txt", txt.str());
}

// ---------------------------------------------------------------------------
// Modelling

struct Prepared {
  Eigen::MatrixXd X;  // without intercept
  Eigen::VectorXd y;
  std::vector<std::string> columns;
};

Prepared prepare(const std::vector<FeatureRow>& rows, FeatureSet fs, Horizon h) {
  const auto m = assemble_design_matrix(rows, fs, h);
  Prepared p;
  p.X = m.X.rightCols(m.X.cols() - 1);
  p.y = m.y;
  p.columns.assign(m.columns.begin() + 1, m.columns.end());
  return p;
}

learn::ModelReport skipped_report(const std::string& model, Horizon h, FeatureSet fs, std::size_t n) {
  learn::ModelReport rep;
  rep.model_id = model;
  rep.horizon = horizon_name(h);
  rep.feature_set = feature_set_name(fs);
  rep.leaky = fs == FeatureSet::WithLeaky;
  rep.hyperparameters.push_back({"status", fmt::format("not fitted: {} rows", n)});
  return rep;
}

void stage_model(PipelineContext& ctx, StageReport& r) {
  const auto& cfg = ctx.config;
  const DataPaths p{cfg.data_dir};
  const auto rows = load_rows(p);
  const fs::path models = cfg.out_dir / "models";
  std::vector<learn::ModelReport> performance;

  const std::size_t min_rows = std::max<std::size_t>(5, static_cast<std::size_t>(2 * cfg.cv_folds));
  std::optional<learn::SplitIndices> split;
  if (rows.size() >= min_rows) split = learn::train_test_split(rows.size(), cfg.split_ratio, cfg.seed);
  if (split && split->train.size() < static_cast<std::size_t>(cfg.cv_folds)) split.reset();
  if (!split) r.warnings.add(fmt::format("model: {} rows is too few to fit (need {})", rows.size(), min_rows));

  for (auto h : kHorizons) {
    for (auto fs_ : kFeatureSets) {
      const auto tag = fmt::format("{}_{}", horizon_name(h), feature_set_name(fs_));
      if (!split) {
        for (const std::string m : kModels)
          emit(r, models / fmt::format("report_{}_{}.csv", m, tag),
               report::model_report_table(skipped_report(m, h, fs_, rows.size())));
        emit(r, models / fmt::format("cv_elastic_net_{}.csv", tag), report::cv_table({}));
        continue;
      }
      const auto prep = prepare(rows, fs_, h);
      const auto Xtr = learn::take_rows(prep.X, split->train), Xte = learn::take_rows(prep.X, split->test);
      const auto ytr = learn::take_rows(prep.y, split->train), yte = learn::take_rows(prep.y, split->test);

      auto base = [&](const char* id) {
        learn::ModelReport rep;
        rep.model_id = id;
        rep.horizon = horizon_name(h);
        rep.feature_set = feature_set_name(fs_);
        rep.leaky = fs_ == FeatureSet::WithLeaky;
        rep.train_n = split->train.size();
        rep.test_n = split->test.size();
        return rep;
      };

      // Elastic net with cross-validated (lambda, l1_ratio).
      learn::CvOptions cvo;
      cvo.folds = cfg.cv_folds;
      cvo.l1_grid = cfg.l1_grid;
      cvo.n_lambdas = cfg.n_lambdas;
      cvo.seed = cfg.seed;
      const auto cv = learn::cross_validate_enet(Xtr, ytr, cvo);
      emit(r, models / fmt::format("cv_elastic_net_{}.csv", tag), report::cv_table(cv));
      const auto enet = learn::elastic_net_fit(Xtr, ytr, cv.best_lambda, cv.best_l1_ratio, cvo.tol, cvo.max_iter, prep.columns);
      if (enet.reached_max_iter) r.warnings.add(fmt::format("elastic net {}: reached max_iter", tag));
      auto er = base("elastic_net");
      er.metrics = learn::evaluate(yte, enet.predict(Xte));
      er.hyperparameters = {{"lambda", fmt_exact(cv.best_lambda)},
                            {"l1_ratio", fmt_exact(cv.best_l1_ratio)},
                            {"cv_folds", std::to_string(cfg.cv_folds)}};
      er.coefficients.push_back({"intercept", enet.intercept});
      for (std::size_t j = 0; j < prep.columns.size(); ++j)
        er.coefficients.push_back({prep.columns[j], enet.coefficients(static_cast<Eigen::Index>(j))});
      er.importance = learn::permutation_importance([&](const Eigen::MatrixXd& X) { return enet.predict(X); }, Xte, yte,
                                                    prep.columns, cfg.importance_repeats, cfg.seed);
      emit(r, models / fmt::format("report_elastic_net_{}.csv", tag), report::model_report_table(er));
      performance.push_back(er);

      // Gradient boosting.
      auto gbo = cfg.gbt;
      gbo.seed = cfg.seed;
      const auto gbt = learn::gbt_fit(Xtr, ytr, gbo);
      auto gr = base("gradient_boosting");
      gr.metrics = learn::evaluate(yte, gbt.predict(Xte));
      gr.hyperparameters = {{"n_trees", std::to_string(gbo.n_trees)},
                            {"learning_rate", fmt_exact(gbo.learning_rate)},
                            {"max_depth", std::to_string(gbo.max_depth)},
                            {"min_leaf", std::to_string(gbo.min_leaf)}};
      gr.importance = learn::permutation_importance([&](const Eigen::MatrixXd& X) { return gbt.predict(X); }, Xte, yte,
                                                    prep.columns, cfg.importance_repeats, cfg.seed);
      emit(r, models / fmt::format("report_gradient_boosting_{}.csv", tag), report::model_report_table(gr));
      performance.push_back(gr);
    }
  }
  // Table order: model, then horizon, then feature set.
  std::stable_sort(performance.begin(), performance.end(),
                   [](const auto& a, const auto& b) { return a.model_id < b.model_id; });
  emit(r, cfg.out_dir / "tables" / "model_performance.csv", report::model_performance_table(performance));
}

// ---------------------------------------------------------------------------
// Report

std::optional<double> parse_opt(const std::string& s) {
  if (s == "-" || s.empty()) return std::nullopt;
  return std::stod(s);
}

// Dates of the first and last launch in the pairs file, so reruns of the report stage do
// not depend on the fetch range given on the command line.
std::string period_label(const std::vector<LaunchEvent>& events) {
  if (events.empty()) return "-";
  auto [lo, hi] = std::minmax_element(events.begin(), events.end(),
                                      [](const LaunchEvent& a, const LaunchEvent& b) { return a.t0() < b.t0(); });
  return fmt::format("{} to {}", format_date(lo->t0()), format_date(hi->t0()));
}

std::string placeholder_svg(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"420\" viewBox=\"0 0 720 420\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect x=\"0\" y=\"0\" width=\"720\" height=\"420\" fill=\"#ffffff\"/>\n"
      "<text x=\"360.00\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n"
      "<text x=\"360.00\" y=\"210.00\" text-anchor=\"middle\">no data</text>\n</svg>\n",
      title);
}

void stage_report(PipelineContext& ctx, StageReport& r) {
  const auto& cfg = ctx.config;
  const DataPaths p{cfg.data_dir};
  const auto events = load_pairs(p);
  require_file(p.gh_status());
  require_file(p.exclusions());
  require_file(p.rejections());
  const auto statuses = read_records<RepoFetchStatus>(p.gh_status());
  const auto series = load_series(p);
  const auto rows = load_rows(p);
  const auto tables = cfg.out_dir / "tables";
  for (const char* needed : {"timing_effects.csv", "model_performance.csv"}) require_file(tables / needed);

  report::DatasetCounts c;
  c.total_pairs = events.size();
  c.valid_series = series.size();
  for (const auto& s : statuses) c.metadata_only += s.metadata_ok && !s.stars_complete;
  c.modeling_rows = rows.size();
  for (const auto& e : events) (e.post.is_show_hn ? c.show_hn : c.non_show_hn)++;
  if (!rows.empty()) {
    std::vector<double> base, score, comments;
    for (const auto& row : rows) {
      base.push_back(static_cast<double>(row.baseline_stars));
      score.push_back(static_cast<double>(row.hn_score));
      comments.push_back(static_cast<double>(row.hn_comments));
    }
    c.mean_baseline_stars = mean(base);
    c.mean_hn_score = mean(score);
    c.mean_hn_comments = mean(comments);
  }
  c.period = period_label(events);
  const auto excl = read_csv(p.exclusions());
  for (const auto& row : excl.rows) c.exclusions.emplace_back(row.at(0), row.at(1));
  const auto rejected = read_csv(p.rejections());
  for (const auto& row : rejected.rows) c.exclusions.emplace_back(row.at(0), "feature row rejected: " + row.at(1));
  emit(r, tables / "dataset.csv", report::dataset_table(c));

  // Figures.
  const auto figures = cfg.out_dir / "figures";
  if (series.empty()) {
    emit_text(r, figures / "event_curve.svg", placeholder_svg("Event study curves"));
  } else {
    report::FigureSpec f;
    f.kind = report::FigureKind::EventCurve;
    f.title = "Event study curves";
    f.x_label = "Days relative to launch";
    f.y_label = "Cumulative stars since window start";
    for (auto stat : {Statistic::Mean, Statistic::Median}) {
      const auto curve = event_curve(series, stat);
      report::FigureSeries s{statistic_name(stat), {}, curve.values};
      for (int d : curve.days) s.x.push_back(d);
      f.series.push_back(std::move(s));
    }
    emit_text(r, figures / "event_curve.svg", report::render_svg(f));
  }
  if (rows.empty()) {
    emit_text(r, figures / "hour_of_day.svg", placeholder_svg("Hour-of-day impact"));
  } else {
    const auto gc = group_comparison(rows, Grouping::HourBin, Horizon::H48);
    report::FigureSpec f;
    f.kind = report::FigureKind::HourBars;
    f.title = "Hour-of-day impact (mean stars gained in 48h)";
    f.x_label = "Posting hour (UTC)";
    f.y_label = "Mean 48h stars";
    report::FigureSeries s{"mean_48h", {}, {}};
    for (const auto& g : gc.groups) {
      s.y.push_back(g.mean.value_or(0.0));
      f.bar_labels.push_back(fmt::format("{} (n={})", g.label, g.n));
    }
    f.series.push_back(std::move(s));
    emit_text(r, figures / "hour_of_day.svg", report::render_svg(f));
  }

  // Summary, read back from the emitted tables so every number matches a CSV.
  report::SummaryInputs in;
  in.counts = c;
  if (!rows.empty()) {
    in.effects = launch_effect_summary(rows);
    for (auto g : {Grouping::ShowHn, Grouping::Weekend, Grouping::HourBin})
      for (auto h : kHorizons) in.comparisons.push_back(group_comparison(rows, g, h));
  }
  const auto timing = read_csv(tables / "timing_effects.csv");
  for (const auto& row : timing.rows)
    in.timing.push_back({row.at(0), parse_opt(row.at(1)), parse_opt(row.at(2)), parse_opt(row.at(3)), row.at(4)});
  const auto perf = read_csv(tables / "model_performance.csv");
  for (const auto& row : perf.rows) {
    learn::ModelReport m;
    m.model_id = row.at(0);
    m.horizon = row.at(1);
    m.feature_set = row.at(2);
    m.metrics.mae = std::stod(row.at(3));
    m.metrics.rmse = std::stod(row.at(4));
    m.metrics.r2 = parse_opt(row.at(5));
    m.test_n = std::stoul(row.at(6));
    m.leaky = row.at(7) == "leaky";
    in.models.push_back(std::move(m));
  }
  emit_text(r, cfg.out_dir / "summary_pipeline.txt", report::write_summary(in));

  // Completeness check, then the manifest.
  std::vector<std::string> missing;
  for (const auto& rel : expected_outputs())
    if (rel != "manifest.csv" && !fs::exists(cfg.out_dir / rel)) missing.push_back(rel);
  const auto entries = report::collect_manifest(cfg.out_dir);
  emit(r, cfg.out_dir / "manifest.csv", report::manifest_table(entries));
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw std::runtime_error("incomplete output tree, missing: " + list);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::FetchHn: return "fetch-hn";
    case Stage::FetchGh: return "fetch-gh";
    case Stage::Align: return "align";
    case Stage::Features: return "features";
    case Stage::Study: return "study";
    case Stage::Infer: return "infer";
    case Stage::Model: return "model";
    case Stage::Report: return "report";
  }
  return "?";
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {Stage::FetchHn, Stage::FetchGh, Stage::Align, Stage::Features,
                                            Stage::Study,   Stage::Infer,   Stage::Model, Stage::Report};
  return stages;
}

std::optional<Stage> parse_stage(const std::string& name) {
  for (auto s : all_stages())
    if (name == stage_name(s)) return s;
  return std::nullopt;
}

std::vector<std::string> expected_outputs() {
  std::vector<std::string> out = {"tables/event_curves.csv",  "tables/launch_effects.csv", "tables/group_comparisons.csv",
                                  "tables/timing_effects.csv", "tables/model_performance.csv", "tables/dataset.csv",
                                  "figures/event_curve.svg",   "figures/hour_of_day.svg",   "summary_inference.txt",
                                  "summary_pipeline.txt",      "manifest.csv"};
  for (const char* c : kContrasts)
    for (auto h : kHorizons) out.push_back(fmt::format("tables/regression_{}_{}.csv", c, horizon_name(h)));
  for (auto h : kHorizons) {
    for (auto fs_ : kFeatureSets) {
      for (const char* m : kModels)
        out.push_back(fmt::format("models/report_{}_{}_{}.csv", m, horizon_name(h), feature_set_name(fs_)));
      out.push_back(fmt::format("models/cv_elastic_net_{}_{}.csv", horizon_name(h), feature_set_name(fs_)));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

StageReport run_stage(Stage stage, PipelineContext& ctx) {
  StageReport r;
  r.stage = stage;
  spdlog::info("stage {}", stage_name(stage));
  try {
    switch (stage) {
      case Stage::FetchHn: stage_fetch_hn(ctx, r); break;
      case Stage::FetchGh: stage_fetch_gh(ctx, r); break;
      case Stage::Align: stage_align(ctx, r); break;
      case Stage::Features: stage_features(ctx, r); break;
      case Stage::Study: stage_study(ctx, r); break;
      case Stage::Infer: stage_infer(ctx, r); break;
      case Stage::Model: stage_model(ctx, r); break;
      case Stage::Report: stage_report(ctx, r); break;
    }
  } catch (const MissingInput& e) {
    r.exit_code = 2;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.exit_code = 1;
    r.error = e.what();
  }
  if (r.exit_code != 0) spdlog::error("{}: {}", stage_name(stage), r.error);
  return r;
}

std::vector<StageReport> run_all(PipelineContext& ctx, int* exit_code) {
  std::vector<StageReport> reports;
  int code = 0;
  for (auto s : all_stages()) {
    reports.push_back(run_stage(s, ctx));
    code = reports.back().exit_code;
    if (code != 0) break;
  }
  if (exit_code) *exit_code = code;
  return reports;
}

std::size_t write_synth_corpus(const synth::SynthSpec& spec, const fs::path& dir) {
  const auto corpus = synth::generate_corpus(spec);
  const auto fixture_path = dir / "fixture.json";
  corpus.fixture.save(fixture_path);
  write_text_file(dir / "manifest.json", dump_document(synth::manifest_to_json(corpus.truth)));

  PipelineContext ctx;
  ctx.config.offline = true;
  ctx.config.use_cache = false;
  ctx.config.fixtures = fixture_path;
  ctx.config.data_dir = dir / "data";
  ctx.config.keywords = spec.keywords;
  ctx.config.from = spec.start;
  ctx.config.to = spec.end;
  ctx.config.workers = 1;
  SimulatedClock clock(spec.end + std::chrono::days(60));
  ctx.clock = &clock;
  std::size_t warnings = 0;
  for (auto s : {Stage::FetchHn, Stage::FetchGh}) {
    auto rep = run_stage(s, ctx);
    if (rep.exit_code != 0) throw std::runtime_error(fmt::format("synth {}: {}", stage_name(s), rep.error));
    warnings += rep.warnings.size();
  }
  return warnings;
}

}  // namespace launchpulse
