#include "launchpulse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "launchpulse/csv.hpp"
#include "launchpulse/eventstudy.hpp"
#include "launchpulse/jsonl.hpp"
#include "launchpulse/pipeline.hpp"
#include "launchpulse/rng.hpp"

namespace launchpulse::synth {

namespace {

const std::vector<std::string> kKnownKeys = {
    "n_repos",          "seed",           "start",           "end",            "pre_rate",
    "history_mean",     "burst_base",     "decay",           "noise_sd",       "effect_hn_score",
    "effect_baseline",  "effect_hour",    "effect_show_hn",  "heavy_tail_repos", "show_hn_fraction",
    "org_fraction",     "license_fraction", "readme_fraction", "duplicate_posts", "noise_posts",
    "restricted_repos", "missing_repos",  "check_importance", "keywords"};

const char* const kLicenses[] = {"MIT", "Apache-2.0", "BSD-3-Clause", "GPL-3.0"};
const char* const kPhrases[] = {"a tiny {} toolkit",        "fast {} evaluation harness",
                                "self-hosted {} playground", "{} for spreadsheets",
                                "minimal {} server in Rust", "local-first {} notebook",
                                "open {} benchmark suite",   "{} debugging with traces"};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw std::invalid_argument("synth spec: " + key + " " + what);
}

double zscore(double v, double mean, double sd) { return sd > 0 ? (v - mean) / sd : 0.0; }

struct Draft {
  std::string owner, name;  // display case
  Timestamp t0{}, created{};
  bool show = false, org = false;
  std::optional<std::string> license;
  std::optional<std::int64_t> readme;
  std::int64_t score = 0, comments = 0, history = 0;
  double noise = 0.0;
  std::string title, keyword;
  RepoFate fate = RepoFate::Valid;
};

nlohmann::json row_to_json(const FeatureRow& r) {
  return {{"slug", r.slug.full_name()},
          {"t0", format_timestamp(r.t0)},
          {"baseline_stars", r.baseline_stars},
          {"repo_age_days", r.repo_age_days},
          {"readme_length", r.readme_length},
          {"owner_is_org", r.owner_is_org},
          {"has_license", r.has_license},
          {"title_length", r.title_length},
          {"is_show_hn", r.is_show_hn},
          {"is_weekend", r.is_weekend},
          {"hour_bin", r.hour_bin},
          {"day_of_week", r.day_of_week},
          {"hn_score", r.hn_score},
          {"hn_comments", r.hn_comments},
          {"launch_day_stars", r.launch_day_stars},
          {"d24", r.d24},
          {"d48", r.d48},
          {"d7", r.d7},
          {"license_id", r.license_id}};
}

FeatureRow row_from_json(const nlohmann::json& j) {
  FeatureRow r;
  r.slug = parse_slug(j.at("slug").get<std::string>());
  r.t0 = parse_timestamp(j.at("t0").get<std::string>());
  r.baseline_stars = j.at("baseline_stars").get<std::int64_t>();
  r.repo_age_days = j.at("repo_age_days").get<double>();
  r.readme_length = j.at("readme_length").get<std::int64_t>();
  r.owner_is_org = j.at("owner_is_org").get<int>();
  r.has_license = j.at("has_license").get<int>();
  r.title_length = j.at("title_length").get<std::int64_t>();
  r.is_show_hn = j.at("is_show_hn").get<int>();
  r.is_weekend = j.at("is_weekend").get<int>();
  r.hour_bin = j.at("hour_bin").get<int>();
  r.day_of_week = j.at("day_of_week").get<int>();
  r.hn_score = j.at("hn_score").get<std::int64_t>();
  r.hn_comments = j.at("hn_comments").get<std::int64_t>();
  r.launch_day_stars = j.at("launch_day_stars").get<std::int64_t>();
  r.d24 = j.at("d24").get<std::int64_t>();
  r.d48 = j.at("d48").get<std::int64_t>();
  r.d7 = j.at("d7").get<std::int64_t>();
  r.license_id = j.at("license_id").get<std::string>();
  return r;
}

// Largest-remainder apportionment of `total` over `weights`; ties go to the earlier slot.
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::int64_t> out(weights.size(), 0);
  if (total <= 0 || sum <= 0) return out;
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double q = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::int64_t>(std::floor(q));
    used += out[i];
    rem.emplace_back(q - std::floor(q), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++out[rem[k % rem.size()].second];
  return out;
}

nlohmann::json hit_json(Timestamp at, const std::string& title, const std::string& url, std::int64_t points,
                        std::int64_t comments, bool show) {
  nlohmann::json tags = {"story"};
  if (show) tags.push_back("show_hn");
  return {{"created_at", format_timestamp(at)},
          {"created_at_i", to_unix(at)},
          {"title", title},
          {"url", url},
          {"points", points},
          {"num_comments", comments},
          {"_tags", tags}};
}

}  // namespace

const char* fate_name(RepoFate f) {
  switch (f) {
    case RepoFate::Valid: return "valid";
    case RepoFate::Restricted: return "restricted";
    case RepoFate::Missing: return "missing";
  }
  return "?";
}

void SynthSpec::validate() const {
  require(n_repos >= 1, "n_repos", "must be at least 1");
  require(start < end, "start", "must precede end");
  require(pre_rate >= 0 && std::isfinite(pre_rate), "pre_rate", "must be a non-negative number");
  require(history_mean >= 0, "history_mean", "must be non-negative");
  require(burst_base >= 0, "burst_base", "must be non-negative");
  require(decay >= 0 && decay <= 1, "decay", "must lie in [0, 1]");
  require(noise_sd >= 0, "noise_sd", "must be non-negative");
  for (auto [v, key] : {std::pair{show_hn_fraction, "show_hn_fraction"}, {org_fraction, "org_fraction"},
                        {license_fraction, "license_fraction"}, {readme_fraction, "readme_fraction"}})
    require(v >= 0 && v <= 1, key, "must lie in [0, 1]");
  require(heavy_tail_repos >= 0 && heavy_tail_repos <= n_repos, "heavy_tail_repos", "must lie in [0, n_repos]");
  require(duplicate_posts >= 0, "duplicate_posts", "must be non-negative");
  require(noise_posts >= 0, "noise_posts", "must be non-negative");
  require(restricted_repos >= 0 && missing_repos >= 0 && restricted_repos + missing_repos <= n_repos,
          "restricted_repos", "plus missing_repos must lie in [0, n_repos]");
  require(!keywords.empty(), "keywords", "must not be empty");
}

SynthSpec SynthSpec::from_key_values(const KeyValues& kv) {
  const auto unknown = kv.unknown_keys(kKnownKeys);
  if (!unknown.empty()) throw std::invalid_argument("synth spec: unknown key '" + unknown.front() + "'");
  SynthSpec s;
  s.n_repos = static_cast<int>(kv.get_int("n_repos", s.n_repos));
  s.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(s.seed)));
  if (auto v = kv.get("start")) s.start = parse_date(*v);
  if (auto v = kv.get("end")) s.end = parse_date(*v);
  s.pre_rate = kv.get_double("pre_rate", s.pre_rate);
  s.history_mean = kv.get_double("history_mean", s.history_mean);
  s.burst_base = kv.get_double("burst_base", s.burst_base);
  s.decay = kv.get_double("decay", s.decay);
  s.noise_sd = kv.get_double("noise_sd", s.noise_sd);
  s.effect_hn_score = kv.get_double("effect_hn_score", s.effect_hn_score);
  s.effect_baseline = kv.get_double("effect_baseline", s.effect_baseline);
  s.effect_hour = kv.get_double("effect_hour", s.effect_hour);
  s.effect_show_hn = kv.get_double("effect_show_hn", s.effect_show_hn);
  s.heavy_tail_repos = static_cast<int>(kv.get_int("heavy_tail_repos", s.heavy_tail_repos));
  s.show_hn_fraction = kv.get_double("show_hn_fraction", s.show_hn_fraction);
  s.org_fraction = kv.get_double("org_fraction", s.org_fraction);
  s.license_fraction = kv.get_double("license_fraction", s.license_fraction);
  s.readme_fraction = kv.get_double("readme_fraction", s.readme_fraction);
  s.duplicate_posts = static_cast<int>(kv.get_int("duplicate_posts", s.duplicate_posts));
  s.noise_posts = static_cast<int>(kv.get_int("noise_posts", s.noise_posts));
  s.restricted_repos = static_cast<int>(kv.get_int("restricted_repos", s.restricted_repos));
  s.missing_repos = static_cast<int>(kv.get_int("missing_repos", s.missing_repos));
  s.check_importance = kv.get_bool("check_importance", s.check_importance);
  s.keywords = kv.get_list("keywords", s.keywords);
  s.validate();
  return s;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) { return from_key_values(KeyValues::load(path)); }

Corpus generate_corpus(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto n = static_cast<std::size_t>(spec.n_repos);
  const auto range = static_cast<std::uint64_t>((spec.end - spec.start).count());

  // Pass 1: per-repository attributes.
  std::vector<Draft> drafts(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& d = drafts[i];
    d.owner = fmt::format("SynthLab{:03}", i);
    d.name = fmt::format("proj-{:03}", i);
    d.t0 = spec.start + std::chrono::seconds(rng.below(range));
    const double age_days = 8.0 + rng.uniform(0.0, 700.0);
    d.created = d.t0 - std::chrono::seconds(std::llround(age_days * 86400.0));
    d.show = rng.bernoulli(spec.show_hn_fraction);
    d.org = rng.bernoulli(spec.org_fraction);
    if (rng.bernoulli(spec.license_fraction)) d.license = kLicenses[rng.below(4)];
    if (rng.bernoulli(spec.readme_fraction)) d.readme = 200 + static_cast<std::int64_t>(rng.below(20000));
    d.score = std::clamp<std::int64_t>(std::llround(std::exp(3.0 + rng.normal())), 1, 3000);
    d.comments = static_cast<std::int64_t>(rng.below(200));
    d.history = spec.history_mean > 0 ? std::llround(spec.history_mean * std::exp(0.8 * rng.normal())) : 0;
    d.noise = rng.normal();
    d.keyword = spec.keywords[i % spec.keywords.size()];
    const std::string phrase = fmt::format(fmt::runtime(kPhrases[rng.below(8)]), d.keyword);
    d.title = fmt::format("{}{}: {}", d.show ? "Show HN: " : "", d.name, phrase);
    const auto missing_from = n - static_cast<std::size_t>(spec.missing_repos);
    const auto restricted_from = missing_from - static_cast<std::size_t>(spec.restricted_repos);
    d.fate = i >= missing_from ? RepoFate::Missing : i >= restricted_from ? RepoFate::Restricted : RepoFate::Valid;
  }

  // Background arrivals are deterministic: floor((h+1) r) - floor(h r) stars in hour h.
  std::array<std::int64_t, kWindowHours> background{};
  for (int h = 0; h < kWindowHours; ++h)
    background[h] = static_cast<std::int64_t>(std::floor((h + 1) * spec.pre_rate)) -
                    static_cast<std::int64_t>(std::floor(h * spec.pre_rate));
  const std::int64_t pre_window = std::accumulate(background.begin(), background.begin() + kLaunchHour, std::int64_t{0});

  // Standardization of the linked features over the whole corpus.
  std::vector<double> log_score(n), log_base(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_score[i] = std::log(static_cast<double>(drafts[i].score));
    log_base[i] = std::log1p(static_cast<double>(drafts[i].history + pre_window));
  }
  auto moments = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, std::sqrt(ss / static_cast<double>(v.size()))};
  };
  const auto [ms, ss] = moments(log_score);
  const auto [mb, sb] = moments(log_base);

  std::vector<double> day_weights(7);
  for (int d = 0; d < 7; ++d) day_weights[d] = std::pow(spec.decay, d);

  Corpus out;
  std::vector<std::pair<nlohmann::json, int>> hits;  // hit, insertion order
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = drafts[i];
    const EventWindow window = build_window(d.t0);
    PlantedRepo planted;
    planted.slug = make_slug(d.owner, d.name);
    planted.fate = d.fate;

    const double signal = spec.effect_hn_score * zscore(log_score[i], ms, ss) +
                          spec.effect_baseline * zscore(log_base[i], mb, sb) +
                          spec.effect_hour * (hour_bin(hour_of_day(d.t0)) == 2 ? 1.0 : 0.0) +
                          spec.effect_show_hn * (d.show ? 1.0 : 0.0) + spec.noise_sd * d.noise;
    std::int64_t burst = std::llround(spec.burst_base * std::max(0.0, 1.0 + signal));
    if (i < static_cast<std::size_t>(spec.heavy_tail_repos)) burst *= 10;
    planted.burst = burst;

    std::vector<Timestamp> stars;
    for (std::int64_t k = 0; k < d.history; ++k) {
      const auto span = static_cast<std::uint64_t>((window.start - d.created).count());
      stars.push_back(d.created + std::chrono::seconds(rng.below(span)));
    }
    auto hourly = background;
    const auto per_day = apportion(burst, day_weights);
    for (int day = 0; day < 7; ++day)
      for (std::int64_t k = 0; k < per_day[day]; ++k) ++hourly[kLaunchHour + 24 * day + static_cast<int>(rng.below(24))];
    for (int h = 0; h < kWindowHours; ++h)
      for (std::int64_t k = 0; k < hourly[h]; ++k)
        stars.push_back(window.start + std::chrono::hours(h) + std::chrono::seconds(rng.below(3600)));
    const std::int64_t tail = rng.poisson(spec.pre_rate * 72.0);
    for (std::int64_t k = 0; k < tail; ++k) stars.push_back(window.end + std::chrono::seconds(rng.below(30 * 86400)));
    std::sort(stars.begin(), stars.end());

    planted.hourly = hourly;
    planted.baseline_stars = d.history + pre_window;

    FeatureRow& r = planted.row;
    r.slug = planted.slug;
    r.t0 = d.t0;
    r.baseline_stars = planted.baseline_stars;
    r.repo_age_days = static_cast<double>((d.t0 - d.created).count()) / 86400.0;
    r.readme_length = d.readme.value_or(0);
    r.owner_is_org = d.org;
    r.has_license = d.license ? 1 : 0;
    r.title_length = static_cast<std::int64_t>(d.title.size());  // titles are ASCII
    r.is_show_hn = d.show;
    r.day_of_week = day_of_week(d.t0);
    r.is_weekend = r.day_of_week >= 5;
    r.hour_bin = hour_of_day(d.t0) / 6;
    r.hn_score = d.score;
    r.hn_comments = d.comments;
    r.d24 = std::accumulate(hourly.begin() + kLaunchHour, hourly.begin() + kLaunchHour + 24, std::int64_t{0});
    r.d48 = std::accumulate(hourly.begin() + kLaunchHour, hourly.begin() + kLaunchHour + 48, std::int64_t{0});
    r.d7 = std::accumulate(hourly.begin() + kLaunchHour, hourly.end(), std::int64_t{0});
    r.launch_day_stars = r.d24;
    r.license_id = d.license.value_or("");

    FixtureRepo repo;
    repo.status = d.fate == RepoFate::Missing ? 404 : 200;
    repo.stargazer_status = d.fate == RepoFate::Restricted ? 403 : 200;
    repo.readme_size = d.readme;
    repo.stargazers = stars;
    nlohmann::json meta = {{"full_name", d.owner + "/" + d.name},
                           {"name", d.name},
                           {"owner", {{"login", d.owner}, {"type", d.org ? "Organization" : "User"}}},
                           {"created_at", format_timestamp(d.created)},
                           {"stargazers_count", static_cast<std::int64_t>(stars.size())},
                           {"topics", {"llm", "open-source"}},
                           {"license", nullptr}};
    if (d.license) meta["license"] = {{"spdx_id", *d.license}, {"key", *d.license}};
    repo.metadata = std::move(meta);
    out.fixture.repos.emplace(planted.slug.full_name(), std::move(repo));

    hits.emplace_back(hit_json(d.t0, d.title, fmt::format("https://github.com/{}/{}", d.owner, d.name), d.score,
                               d.comments, d.show),
                      static_cast<int>(hits.size()));
    out.truth.repos.push_back(std::move(planted));
  }

  // Later posts of already-launched repositories, with URL spellings the resolver must fold.
  for (int k = 0; k < spec.duplicate_posts; ++k) {
    const auto& d = drafts[(static_cast<std::size_t>(k) * 7) % n];
    const Timestamp at = d.t0 + std::chrono::hours(1) + std::chrono::seconds(rng.below(47 * 3600));
    if (at >= spec.end) continue;
    const std::string urls[] = {fmt::format("https://www.github.com/{}/{}.git", d.owner, d.name),
                                fmt::format("https://github.com/{}/{}/tree/main", d.owner, d.name),
                                fmt::format("http://github.com/{}/{}#readme", d.owner, d.name)};
    hits.emplace_back(hit_json(at, fmt::format("{} revisited: notes on {}", d.name, d.keyword), urls[k % 3],
                               1 + static_cast<std::int64_t>(rng.below(20)), static_cast<std::int64_t>(rng.below(10)),
                               false),
                      static_cast<int>(hits.size()));
  }
  // Posts that match the keywords but link no repository.
  for (int k = 0; k < spec.noise_posts; ++k) {
    const std::string& kw = spec.keywords[static_cast<std::size_t>(k) % spec.keywords.size()];
    const std::string urls[] = {fmt::format("https://example.com/blog/notes-{}", k),
                                fmt::format("https://gist.github.com/someone/{:08x}", rng.below(1u << 31)),
                                fmt::format("https://github.com/SynthNoiseOrg{}", k), "https://github.com/features/copilot"};
    const Timestamp at = spec.start + std::chrono::seconds(rng.below(range));
    hits.emplace_back(hit_json(at, fmt::format("Ask HN: how do you use {} at work? ({})", kw, k), urls[k % 4],
                               static_cast<std::int64_t>(rng.below(50)), static_cast<std::int64_t>(rng.below(30)), false),
                      static_cast<int>(hits.size()));
  }
  std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    return a.first["created_at_i"].template get<long long>() < b.first["created_at_i"].template get<long long>();
  });
  for (std::size_t k = 0; k < hits.size(); ++k) {
    auto hit = hits[k].first;
    hit["objectID"] = std::to_string(38000000 + 3 * k);
    hit["_tags"].push_back("story_" + std::to_string(38000000 + 3 * k));
    out.fixture.hn_hits.push_back(std::move(hit));
  }

  auto& t = out.truth;
  std::sort(t.repos.begin(), t.repos.end(), [](const auto& a, const auto& b) { return a.slug < b.slug; });
  t.total_pairs = n;
  for (const auto& p : t.repos) {
    t.valid_series += p.fate == RepoFate::Valid;
    t.metadata_only += p.fate == RepoFate::Restricted;
    t.show_hn += p.row.is_show_hn;
  }
  if (spec.check_importance) {
    // Rank by each term's spread in the burst signal: |effect| times the standard deviation
    // of what it multiplies (the z-scores have unit spread, the hour dummy sqrt(p(1-p))).
    double p_hour = 0;
    for (const auto& r : t.repos) p_hour += r.row.hour_bin == 2;
    p_hour /= static_cast<double>(n);
    std::vector<std::pair<double, std::string>> declared = {
        {std::abs(spec.effect_hn_score), "hn_score"},
        {std::abs(spec.effect_baseline), "baseline_stars"},
        {std::abs(spec.effect_hour) * std::sqrt(p_hour * (1 - p_hour)), "hour_12_17"}};
    std::stable_sort(declared.begin(), declared.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [w, name] : declared) t.importance_order.push_back(name);
  }
  return out;
}

nlohmann::json manifest_to_json(const GroundTruth& truth) {
  nlohmann::json repos = nlohmann::json::array();
  for (const auto& p : truth.repos) {
    repos.push_back({{"slug", p.slug.full_name()},
                     {"fate", fate_name(p.fate)},
                     {"burst", p.burst},
                     {"baseline_stars", p.baseline_stars},
                     {"hourly", p.hourly},
                     {"row", row_to_json(p.row)}});
  }
  return {{"counts",
           {{"total_pairs", truth.total_pairs},
            {"valid_series", truth.valid_series},
            {"metadata_only", truth.metadata_only},
            {"show_hn", truth.show_hn}}},
          {"importance_order", truth.importance_order},
          {"repos", repos}};
}

GroundTruth manifest_from_json(const nlohmann::json& doc) {
  GroundTruth t;
  const auto& c = doc.at("counts");
  t.total_pairs = c.at("total_pairs").get<std::size_t>();
  t.valid_series = c.at("valid_series").get<std::size_t>();
  t.metadata_only = c.at("metadata_only").get<std::size_t>();
  t.show_hn = c.at("show_hn").get<std::size_t>();
  t.importance_order = doc.at("importance_order").get<std::vector<std::string>>();
  for (const auto& r : doc.at("repos")) {
    PlantedRepo p;
    p.slug = parse_slug(r.at("slug").get<std::string>());
    const auto fate = r.at("fate").get<std::string>();
    p.fate = fate == "valid" ? RepoFate::Valid : fate == "restricted" ? RepoFate::Restricted : RepoFate::Missing;
    p.burst = r.at("burst").get<std::int64_t>();
    p.baseline_stars = r.at("baseline_stars").get<std::int64_t>();
    const auto hourly = r.at("hourly").get<std::vector<std::int64_t>>();
    if (hourly.size() != kWindowHours) throw std::invalid_argument("manifest: " + p.slug.full_name() + " hourly length");
    std::copy(hourly.begin(), hourly.end(), p.hourly.begin());
    p.row = row_from_json(r.at("row"));
    t.repos.push_back(std::move(p));
  }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

struct Checker {
  VerifyResult result;
  template <typename A, typename B>
  void eq(const std::string& field, const A& got, const B& want) {
    ++result.checks;
    if (!(got == want)) result.failures.push_back(fmt::format("{}: got {}, expected {}", field, got, want));
  }
  void fail(const std::string& what) {
    ++result.checks;
    result.failures.push_back(what);
  }
};

std::string lookup(const CsvTable& t, const std::string& key_col, const std::string& key, const std::string& col) {
  const auto k = t.column(key_col), c = t.column(col);
  for (const auto& row : t.rows)
    if (row[k] == key) return row[c];
  return "<absent>";
}

// Independent expectations computed directly from the planted rows.
double plain_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double plain_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

}  // namespace

VerifyResult verify_against_manifest(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir,
                                     const GroundTruth& truth) {
  Checker ck;
  const DataPaths paths{data_dir};
  std::map<std::string, const PlantedRepo*> planted;
  std::vector<const PlantedRepo*> valid;
  for (const auto& p : truth.repos) {
    planted[p.slug.full_name()] = &p;
    if (p.fate == RepoFate::Valid) valid.push_back(&p);
  }

  // Aligned series: exact hourly counts and baseline for every valid repository.
  try {
    const auto series = read_records<AlignedSeries>(paths.series());
    ck.eq("series.count", series.size(), valid.size());
    for (const auto& s : series) {
      const auto name = s.slug.full_name();
      auto it = planted.find(name);
      if (it == planted.end() || it->second->fate != RepoFate::Valid) {
        ck.fail("series." + name + ": not a valid planted repository");
        continue;
      }
      const auto& p = *it->second;
      for (int h = 0; h < kWindowHours; ++h)
        if (s.hourly[h] != p.hourly[h]) ck.fail(fmt::format("series.{}.hourly[{}]: got {}, expected {}", name, h, s.hourly[h], p.hourly[h]));
      ck.eq("series." + name + ".baseline_stars", s.baseline_stars, p.baseline_stars);
      ck.eq("series." + name + ".d24", delta_stars(s, Horizon::H24), p.row.d24);
      ck.eq("series." + name + ".d48", delta_stars(s, Horizon::H48), p.row.d48);
      ck.eq("series." + name + ".d7", delta_stars(s, Horizon::D7), p.row.d7);
    }
  } catch (const std::exception& e) {
    ck.fail(std::string("series: ") + e.what());
  }

  // Feature rows: every planted field.
  try {
    const auto rows = feature_rows_from_csv(read_csv(paths.rows()));
    ck.eq("rows.count", rows.size(), valid.size());
    for (const auto& r : rows) {
      const auto name = r.slug.full_name();
      auto it = planted.find(name);
      if (it == planted.end()) {
        ck.fail("rows." + name + ": unknown repository");
        continue;
      }
      const auto& w = it->second->row;
      const auto pre = "rows." + name + ".";
      ck.eq(pre + "t0", format_timestamp(r.t0), format_timestamp(w.t0));
      ck.eq(pre + "baseline_stars", r.baseline_stars, w.baseline_stars);
      ck.eq(pre + "repo_age_days", r.repo_age_days, w.repo_age_days);
      ck.eq(pre + "readme_length", r.readme_length, w.readme_length);
      ck.eq(pre + "owner_is_org", r.owner_is_org, w.owner_is_org);
      ck.eq(pre + "has_license", r.has_license, w.has_license);
      ck.eq(pre + "title_length", r.title_length, w.title_length);
      ck.eq(pre + "is_show_hn", r.is_show_hn, w.is_show_hn);
      ck.eq(pre + "is_weekend", r.is_weekend, w.is_weekend);
      ck.eq(pre + "hour_bin", r.hour_bin, w.hour_bin);
      ck.eq(pre + "day_of_week", r.day_of_week, w.day_of_week);
      ck.eq(pre + "hn_score", r.hn_score, w.hn_score);
      ck.eq(pre + "hn_comments", r.hn_comments, w.hn_comments);
      ck.eq(pre + "launch_day_stars", r.launch_day_stars, w.launch_day_stars);
      ck.eq(pre + "d24", r.d24, w.d24);
      ck.eq(pre + "d48", r.d48, w.d48);
      ck.eq(pre + "d7", r.d7, w.d7);
      ck.eq(pre + "license_id", r.license_id, w.license_id);
    }
  } catch (const std::exception& e) {
    ck.fail(std::string("rows: ") + e.what());
  }

  // Dataset counts.
  try {
    const auto t = read_csv(out_dir / "tables" / "dataset.csv");
    auto stat = [&](const char* label) { return lookup(t, "statistic", label, "value"); };
    ck.eq("dataset.total_pairs", stat("Total HN-GitHub pairs"), std::to_string(truth.total_pairs));
    ck.eq("dataset.valid_series", stat("Valid GitHub time series"), std::to_string(truth.valid_series));
    ck.eq("dataset.metadata_only", stat("Metadata-only repositories"), std::to_string(truth.metadata_only));
    ck.eq("dataset.show_hn", stat("Show HN posts"), std::to_string(truth.show_hn));
    ck.eq("dataset.non_show_hn", stat("Non-Show HN posts"), std::to_string(truth.total_pairs - truth.show_hn));
  } catch (const std::exception& e) {
    ck.fail(std::string("dataset: ") + e.what());
  }

  if (!valid.empty()) {
    const std::pair<Horizon, std::int64_t FeatureRow::*> targets[] = {
        {Horizon::H24, &FeatureRow::d24}, {Horizon::H48, &FeatureRow::d48}, {Horizon::D7, &FeatureRow::d7}};

    // Launch effects.
    try {
      const auto t = read_csv(out_dir / "tables" / "launch_effects.csv");
      for (const auto& [h, field] : targets) {
        std::vector<double> v;
        for (const auto* p : valid) v.push_back(static_cast<double>(p->row.*field));
        ck.eq(fmt::format("launch_effects.{}.mean", horizon_name(h)), lookup(t, "horizon", horizon_name(h), "mean_stars"),
              fmt_stars(plain_mean(v)));
        ck.eq(fmt::format("launch_effects.{}.median", horizon_name(h)),
              lookup(t, "horizon", horizon_name(h), "median_stars"), fmt_stars(plain_median(v)));
      }
    } catch (const std::exception& e) {
      ck.fail(std::string("launch_effects: ") + e.what());
    }

    // Show HN and weekend differences.
    try {
      const auto t = read_csv(out_dir / "tables" / "group_comparisons.csv");
      const auto gc = t.column("grouping"), tc = t.column("target"), dc = t.column("difference");
      auto reported = [&](const std::string& grouping, Horizon h) {
        for (const auto& row : t.rows)
          if (row[gc] == grouping && row[tc] == horizon_name(h)) return row[dc];
        return std::string("<absent>");
      };
      for (const auto& [h, field] : targets) {
        for (auto [grouping, flag] : {std::pair{"show_hn", &FeatureRow::is_show_hn}, {"weekend", &FeatureRow::is_weekend}}) {
          std::vector<double> yes, no;
          for (const auto* p : valid) (p->row.*flag ? yes : no).push_back(static_cast<double>(p->row.*field));
          const std::string want = yes.empty() || no.empty() ? "-" : fmt_stars(plain_mean(yes) - plain_mean(no));
          ck.eq(fmt::format("group_comparisons.{}.{}", grouping, horizon_name(h)), reported(grouping, h), want);
        }
      }
    } catch (const std::exception& e) {
      ck.fail(std::string("group_comparisons: ") + e.what());
    }
  }

  // Planted importance order, recovered by the 24h boosting model with leaky features.
  if (!truth.importance_order.empty()) {
    try {
      const auto t = read_csv(out_dir / "models" / "report_gradient_boosting_24h_with_leaky.csv");
      const auto sc = t.column("section"), nc = t.column("name");
      std::vector<std::string> ranking;
      for (const auto& row : t.rows)
        if (row[sc] == "importance") ranking.push_back(row[nc]);
      std::vector<std::size_t> ranks;
      for (const auto& f : truth.importance_order) {
        auto it = std::find(ranking.begin(), ranking.end(), f);
        if (it == ranking.end()) {
          ck.fail("importance." + f + ": not reported");
          ranks.push_back(ranking.size());
        } else {
          ranks.push_back(static_cast<std::size_t>(it - ranking.begin()));
        }
      }
      ++ck.result.checks;
      if (!std::is_sorted(ranks.begin(), ranks.end()) || std::adjacent_find(ranks.begin(), ranks.end()) != ranks.end()) {
        std::string got;
        for (std::size_t k = 0; k < truth.importance_order.size(); ++k)
          got += fmt::format("{}{}=#{}", k ? ", " : "", truth.importance_order[k], ranks[k] + 1);
        ck.result.failures.push_back("importance_order: planted order not recovered (" + got + ")");
      }
    } catch (const std::exception& e) {
      ck.fail(std::string("importance: ") + e.what());
    }
  }
  return ck.result;
}

}  // namespace launchpulse::synth
