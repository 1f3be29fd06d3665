// launchpulse command-line driver.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "launchpulse/kvconfig.hpp"
#include "launchpulse/pipeline.hpp"
#include "launchpulse/synth.hpp"

using namespace launchpulse;

namespace {

struct Flags {
  std::optional<std::string> from, to, cache_dir, out_dir, data_dir, fixtures, config;
  std::optional<std::vector<std::string>> keywords;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_pages, rate_budget, workers;
  bool offline = false;
  bool no_cache = false;
  bool verbose = false;
  bool quiet = false;
};

const std::vector<std::string> kConfigKeys = {
    "from",      "to",         "keywords",   "cache_dir",      "out_dir",          "data_dir",
    "fixtures",  "seed",       "offline",    "max_pages",      "rate_budget",      "workers",
    "use_cache", "split_ratio", "cv_folds",  "l1_grid",        "n_lambdas",        "gbt_n_trees",
    "gbt_learning_rate",       "gbt_max_depth", "gbt_min_leaf", "importance_repeats", "hn_page_limit",
    "hn_hits_per_page"};

Timestamp exclusive_end(const std::string& date) { return parse_date(date) + std::chrono::days(1); }

// Precedence: command line > environment > config file > built-in defaults.
RunConfig resolve(const Flags& f) {
  RunConfig c;
  std::optional<std::string> cache;

  if (f.config) {
    const auto kv = KeyValues::load(*f.config);
    const auto unknown = kv.unknown_keys(kConfigKeys);
    if (!unknown.empty()) throw std::invalid_argument(*f.config + ": unknown key '" + unknown.front() + "'");
    if (auto v = kv.get("from")) c.from = parse_date(*v);
    if (auto v = kv.get("to")) c.to = exclusive_end(*v);
    c.keywords = kv.get_list("keywords", c.keywords);
    cache = kv.get("cache_dir");
    c.out_dir = kv.get_string("out_dir", c.out_dir.string());
    c.data_dir = kv.get_string("data_dir", c.data_dir.string());
    c.fixtures = kv.get_string("fixtures", c.fixtures.string());
    c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
    c.offline = kv.get_bool("offline", c.offline);
    c.use_cache = kv.get_bool("use_cache", c.use_cache);
    c.max_pages = static_cast<int>(kv.get_int("max_pages", c.max_pages));
    if (kv.has("rate_budget")) c.rate_budget = static_cast<int>(kv.get_int("rate_budget", 0));
    c.workers = static_cast<int>(kv.get_int("workers", c.workers));
    c.split_ratio = kv.get_double("split_ratio", c.split_ratio);
    c.cv_folds = static_cast<int>(kv.get_int("cv_folds", c.cv_folds));
    if (kv.has("l1_grid")) {
      c.l1_grid.clear();
      for (const auto& s : kv.get_list("l1_grid", {})) c.l1_grid.push_back(std::stod(s));
    }
    c.n_lambdas = static_cast<int>(kv.get_int("n_lambdas", c.n_lambdas));
    c.gbt.n_trees = static_cast<int>(kv.get_int("gbt_n_trees", c.gbt.n_trees));
    c.gbt.learning_rate = kv.get_double("gbt_learning_rate", c.gbt.learning_rate);
    c.gbt.max_depth = static_cast<int>(kv.get_int("gbt_max_depth", c.gbt.max_depth));
    c.gbt.min_leaf = static_cast<int>(kv.get_int("gbt_min_leaf", c.gbt.min_leaf));
    c.importance_repeats = static_cast<int>(kv.get_int("importance_repeats", c.importance_repeats));
    c.hn_page_limit = static_cast<int>(kv.get_int("hn_page_limit", c.hn_page_limit));
    c.hn_hits_per_page = static_cast<int>(kv.get_int("hn_hits_per_page", c.hn_hits_per_page));
  }

  if (const char* v = std::getenv("LAUNCHPULSE_CACHE_DIR"); v && *v) cache = v;
  if (const char* v = std::getenv("GITHUB_TOKEN"); v && *v) c.github_token = v;

  if (f.from) c.from = parse_date(*f.from);
  if (f.to) c.to = exclusive_end(*f.to);
  if (f.keywords) c.keywords = *f.keywords;
  if (f.cache_dir) cache = *f.cache_dir;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.data_dir) c.data_dir = *f.data_dir;
  if (f.fixtures) c.fixtures = *f.fixtures;
  if (f.seed) c.seed = *f.seed;
  if (f.offline) c.offline = true;
  if (f.no_cache) c.use_cache = false;
  if (f.max_pages) c.max_pages = *f.max_pages;
  if (f.rate_budget) c.rate_budget = *f.rate_budget;
  if (f.workers) c.workers = *f.workers;

  c.cache_dir = cache ? std::filesystem::path(*cache) : c.data_dir / "cache";
  if (c.from >= c.to) throw std::invalid_argument("--from must not be after --to");
  if (c.max_pages < 1) throw std::invalid_argument("--max-pages must be positive");
  if (c.rate_budget && *c.rate_budget < 1) throw std::invalid_argument("--rate-budget must be positive");
  if (c.workers < 1) throw std::invalid_argument("--workers must be positive");
  return c;
}

void print_reports(const std::vector<StageReport>& reports) {
  for (const auto& r : reports) {
    std::cerr << fmt::format("{:<9} exit={} warnings={} outputs={}{}\n", stage_name(r.stage), r.exit_code,
                             r.warnings.size(), r.outputs.size(), r.error.empty() ? "" : "  error: " + r.error);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"launchpulse: measure and predict the star gains of Hacker News launches"};
  app.require_subcommand(1);
  Flags f;

  app.add_option("--from", f.from, "First day of the post window (YYYY-MM-DD)");
  app.add_option("--to", f.to, "Last day of the post window, inclusive (YYYY-MM-DD)");
  app.add_option("--keywords", f.keywords, "Search keywords (comma-separated)")->delimiter(',');
  app.add_option("--cache-dir", f.cache_dir, "Response cache directory (env LAUNCHPULSE_CACHE_DIR)");
  app.add_option("--out-dir", f.out_dir, "Output tree root (default out)");
  app.add_option("--data-dir", f.data_dir, "Intermediate data root (default data)");
  app.add_option("--fixtures", f.fixtures, "Fixture corpus served in offline mode");
  app.add_option("--seed", f.seed, "Seed for splits, folds, boosting and permutations");
  app.add_flag("--offline", f.offline, "Serve every request from the fixture corpus");
  app.add_flag("--no-cache", f.no_cache, "Bypass the response cache");
  app.add_option("--max-pages", f.max_pages, "Stargazer page cap per repository");
  app.add_option("--rate-budget", f.rate_budget, "GitHub requests per hour");
  app.add_option("--workers", f.workers, "Concurrent repositories during fetch-gh");
  app.add_option("--config", f.config, "Flat key = value configuration file")->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", f.verbose, "Debug logging");
  app.add_flag("-q,--quiet", f.quiet, "Errors only");

  std::optional<std::string> stage_name_selected;
  for (auto s : all_stages()) {
    auto* sub = app.add_subcommand(stage_name(s), fmt::format("Run the {} stage", stage_name(s)));
    sub->fallthrough();
    sub->callback([&stage_name_selected, s] { stage_name_selected = stage_name(s); });
  }
  auto* all = app.add_subcommand("all", "Run every stage in order");
  all->fallthrough();

  std::string spec_path, synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth_cmd->add_option("--spec", spec_path, "Generator spec (flat key = value)")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->fallthrough();

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("launchpulse");
  spdlog::set_default_logger(logger);
  spdlog::set_level(f.quiet ? spdlog::level::err : f.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (synth_cmd->parsed()) {
      const auto spec = synth::SynthSpec::load(spec_path);
      const auto warnings = write_synth_corpus(spec, synth_out);
      std::cerr << fmt::format("synth: {} repositories written to {} ({} fetch warnings)\n", spec.n_repos, synth_out,
                               warnings);
      return 0;
    }
    PipelineContext ctx;
    ctx.config = resolve(f);
    if (all->parsed()) {
      int code = 0;
      const auto reports = run_all(ctx, &code);
      print_reports(reports);
      return code;
    }
    const auto stage = parse_stage(*stage_name_selected);
    const auto report = run_stage(*stage, ctx);
    print_reports({report});
    return report.exit_code;
  } catch (const MissingInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
