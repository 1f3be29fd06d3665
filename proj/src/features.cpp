#include "launchpulse/features.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace launchpulse {

namespace {

const std::vector<std::string> kPreLaunchColumns = {
    "intercept",   "baseline_stars", "repo_age_days", "readme_length", "owner_is_org", "has_license",
    "title_length", "is_show_hn",    "hour_06_11",    "hour_12_17",    "hour_18_23",   "dow_tue",
    "dow_wed",     "dow_thu",        "dow_fri",       "dow_sat",       "dow_sun"};

const char* kDayNames[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};

std::int64_t to_int(const std::string& s, const std::string& column) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(fmt::format("column {}: '{}' is not an integer", column, s));
  }
}

}  // namespace

std::int64_t FeatureRow::target(Horizon h) const {
  switch (h) {
    case Horizon::H24: return d24;
    case Horizon::H48: return d48;
    case Horizon::D7: return d7;
  }
  return 0;
}

int hour_bin(int hour_utc) {
  if (hour_utc < 0 || hour_utc > 23) throw std::out_of_range(fmt::format("hour {} outside 0..23", hour_utc));
  return hour_utc / 6;
}

const char* hour_bin_label(int bin) {
  static const char* labels[] = {"00-05", "06-11", "12-17", "18-23"};
  if (bin < 0 || bin > 3) throw std::out_of_range(fmt::format("hour bin {} outside 0..3", bin));
  return labels[bin];
}

std::int64_t utf8_length(const std::string& text) {
  std::int64_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::variant<FeatureRow, RowRejected> build_feature_row(const LaunchEvent& event, const RepoSnapshot& snapshot,
                                                        const AlignedSeries& series) {
  if (event.slug != snapshot.slug || event.slug != series.slug) {
    throw std::invalid_argument(fmt::format("feature inputs disagree on repository: event {}, snapshot {}, series {}",
                                            event.slug.full_name(), snapshot.slug.full_name(),
                                            series.slug.full_name()));
  }
  const Timestamp t0 = event.t0();
  if (series.t0 != t0) {
    throw std::invalid_argument(fmt::format("{}: series aligned at {} but event t0 is {}", event.slug.full_name(),
                                            format_timestamp(series.t0), format_timestamp(t0)));
  }
  if (snapshot.created_at > t0) {
    return RowRejected{fmt::format("repository created {} after launch {}", format_timestamp(snapshot.created_at),
                                   format_timestamp(t0))};
  }

  FeatureRow row;
  row.slug = event.slug;
  row.t0 = t0;
  row.baseline_stars = series.baseline_stars;
  row.repo_age_days = static_cast<double>((t0 - snapshot.created_at).count()) / 86400.0;
  row.readme_length = snapshot.readme_length;
  row.owner_is_org = snapshot.owner_is_org ? 1 : 0;
  row.has_license = snapshot.license_id ? 1 : 0;
  row.title_length = utf8_length(event.post.title);
  row.is_show_hn = event.post.is_show_hn ? 1 : 0;
  row.day_of_week = day_of_week(t0);
  row.is_weekend = row.day_of_week >= 5 ? 1 : 0;
  row.hour_bin = hour_bin(hour_of_day(t0));
  row.hn_score = event.post.score;
  row.hn_comments = event.post.num_comments;
  row.d24 = delta_stars(series, Horizon::H24);
  row.d48 = delta_stars(series, Horizon::H48);
  row.d7 = delta_stars(series, Horizon::D7);
  row.launch_day_stars = row.d24;
  row.license_id = snapshot.license_id.value_or("");
  return row;
}

const char* feature_set_name(FeatureSet fs) {
  return fs == FeatureSet::PreLaunchOnly ? "pre_launch_only" : "with_leaky";
}

std::vector<std::string> design_columns(FeatureSet fs, Horizon target) {
  auto cols = kPreLaunchColumns;
  if (fs == FeatureSet::WithLeaky) {
    cols.push_back("hn_score");
    cols.push_back("hn_comments");
    if (target != Horizon::H24) cols.push_back("launch_day_stars");
  }
  return cols;
}

std::vector<std::string> target_defining_quantities(Horizon target) {
  switch (target) {
    case Horizon::H24: return {"d24", "launch_day_stars"};
    case Horizon::H48: return {"d48"};
    case Horizon::D7: return {"d7"};
  }
  return {};
}

double design_value(const FeatureRow& row, const std::string& column) {
  if (column == "intercept") return 1.0;
  if (column == "baseline_stars") return static_cast<double>(row.baseline_stars);
  if (column == "repo_age_days") return row.repo_age_days;
  if (column == "readme_length") return static_cast<double>(row.readme_length);
  if (column == "owner_is_org") return row.owner_is_org;
  if (column == "has_license") return row.has_license;
  if (column == "title_length") return static_cast<double>(row.title_length);
  if (column == "is_show_hn") return row.is_show_hn;
  if (column == "is_weekend") return row.is_weekend;
  if (column == "hour_06_11") return row.hour_bin == 1;
  if (column == "hour_12_17") return row.hour_bin == 2;
  if (column == "hour_18_23") return row.hour_bin == 3;
  if (column.starts_with("dow_")) {
    for (int d = 1; d < 7; ++d) {
      if (column.substr(4) == kDayNames[d]) return row.day_of_week == d;
    }
  }
  if (column == "hn_score") return static_cast<double>(row.hn_score);
  if (column == "hn_comments") return static_cast<double>(row.hn_comments);
  if (column == "launch_day_stars") return static_cast<double>(row.launch_day_stars);
  throw std::invalid_argument(fmt::format("unknown design column '{}'", column));
}

DesignMatrix assemble_design_matrix(const std::vector<FeatureRow>& rows, FeatureSet fs, Horizon target,
                                    Warnings* warnings) {
  if (rows.empty()) throw std::invalid_argument("cannot assemble a design matrix from zero rows");
  DesignMatrix m;
  m.columns = design_columns(fs, target);
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(m.columns.size());
  m.X.resize(n, k);
  m.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) m.X(i, j) = design_value(row, m.columns[static_cast<std::size_t>(j)]);
    m.y(i) = static_cast<double>(row.target(target));
  }
  if (warnings != nullptr && n > 1) {
    for (Eigen::Index j = 1; j < k; ++j) {
      if ((m.X.col(j).array() == m.X(0, j)).all()) {
        warnings->add(fmt::format("design column '{}' is constant ({} rows, {} / {})", m.columns[j], n,
                                  feature_set_name(fs), horizon_name(target)));
      }
    }
  }
  return m;
}

CsvTable feature_rows_to_csv(const std::vector<FeatureRow>& rows) {
  CsvTable t;
  t.header = {"id:slug",          "id:t0",          "pre:baseline_stars", "pre:repo_age_days", "pre:readme_length",
              "pre:owner_is_org", "pre:has_license", "pre:title_length",  "pre:is_show_hn",    "pre:is_weekend",
              "pre:hour_bin",     "pre:day_of_week", "leaky:hn_score",    "leaky:hn_comments", "leaky:launch_day_stars",
              "target:d24",       "target:d48",      "target:d7",         "meta:license_id"};
  for (const auto& r : rows) {
    t.rows.push_back({r.slug.full_name(), format_timestamp(r.t0), std::to_string(r.baseline_stars),
                      fmt_exact(r.repo_age_days), std::to_string(r.readme_length), std::to_string(r.owner_is_org),
                      std::to_string(r.has_license), std::to_string(r.title_length), std::to_string(r.is_show_hn),
                      std::to_string(r.is_weekend), std::to_string(r.hour_bin), std::to_string(r.day_of_week),
                      std::to_string(r.hn_score), std::to_string(r.hn_comments), std::to_string(r.launch_day_stars),
                      std::to_string(r.d24), std::to_string(r.d48), std::to_string(r.d7), r.license_id});
  }
  return t;
}

std::vector<FeatureRow> feature_rows_from_csv(const CsvTable& t) {
  std::vector<FeatureRow> rows;
  const auto c = [&t](const char* name) { return t.column(name); };
  const auto slug = c("id:slug"), t0 = c("id:t0"), base = c("pre:baseline_stars"), age = c("pre:repo_age_days"),
             readme = c("pre:readme_length"), org = c("pre:owner_is_org"), lic = c("pre:has_license"),
             title = c("pre:title_length"), show = c("pre:is_show_hn"), weekend = c("pre:is_weekend"),
             bin = c("pre:hour_bin"), dow = c("pre:day_of_week"), score = c("leaky:hn_score"),
             comments = c("leaky:hn_comments"), lds = c("leaky:launch_day_stars"), d24 = c("target:d24"),
             d48 = c("target:d48"), d7 = c("target:d7"), license = c("meta:license_id");
  for (const auto& f : t.rows) {
    FeatureRow r;
    r.slug = parse_slug(f[slug]);
    r.t0 = parse_timestamp(f[t0]);
    r.baseline_stars = to_int(f[base], "baseline_stars");
    r.repo_age_days = std::stod(f[age]);
    r.readme_length = to_int(f[readme], "readme_length");
    r.owner_is_org = static_cast<int>(to_int(f[org], "owner_is_org"));
    r.has_license = static_cast<int>(to_int(f[lic], "has_license"));
    r.title_length = to_int(f[title], "title_length");
    r.is_show_hn = static_cast<int>(to_int(f[show], "is_show_hn"));
    r.is_weekend = static_cast<int>(to_int(f[weekend], "is_weekend"));
    r.hour_bin = static_cast<int>(to_int(f[bin], "hour_bin"));
    r.day_of_week = static_cast<int>(to_int(f[dow], "day_of_week"));
    r.hn_score = to_int(f[score], "hn_score");
    r.hn_comments = to_int(f[comments], "hn_comments");
    r.launch_day_stars = to_int(f[lds], "launch_day_stars");
    r.d24 = to_int(f[d24], "d24");
    r.d48 = to_int(f[d48], "d48");
    r.d7 = to_int(f[d7], "d7");
    r.license_id = f[license];
    rows.push_back(std::move(r));
  }
  return rows;
}

CsvTable design_matrix_to_csv(const DesignMatrix& m, Horizon target) {
  CsvTable t;
  t.header = m.columns;
  t.header.push_back(std::string("target_") + horizon_name(target));
  for (Eigen::Index i = 0; i < m.X.rows(); ++i) {
    std::vector<std::string> row;
    row.reserve(t.header.size());
    for (Eigen::Index j = 0; j < m.X.cols(); ++j) row.push_back(fmt_exact(m.X(i, j)));
    row.push_back(fmt_exact(m.y(i)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace launchpulse
