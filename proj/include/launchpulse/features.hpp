#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "launchpulse/align.hpp"
#include "launchpulse/csv.hpp"
#include "launchpulse/diagnostics.hpp"
#include "launchpulse/types.hpp"

namespace launchpulse {

/// One modeling observation. The pre-launch block is known at t0; the leaky block accrues
/// after posting; targets are the star gains to predict.
struct FeatureRow {
  RepoSlug slug;
  Timestamp t0{};

  // pre-launch
  std::int64_t baseline_stars = 0;
  double repo_age_days = 0.0;
  std::int64_t readme_length = 0;
  int owner_is_org = 0;
  int has_license = 0;
  std::int64_t title_length = 0;  // Unicode code points
  int is_show_hn = 0;
  int is_weekend = 0;
  int hour_bin = 0;     // 0..3
  int day_of_week = 0;  // Monday = 0

  // leaky
  std::int64_t hn_score = 0;
  std::int64_t hn_comments = 0;
  std::int64_t launch_day_stars = 0;

  // targets
  std::int64_t d24 = 0;
  std::int64_t d48 = 0;
  std::int64_t d7 = 0;

  // recorded, not encoded
  std::string license_id;

  std::int64_t target(Horizon h) const;
  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

/// 00-05 -> 0, 06-11 -> 1, 12-17 -> 2, 18-23 -> 3. Throws std::out_of_range outside 0..23.
int hour_bin(int hour_utc);

/// Label for a bin, e.g. "12-17".
const char* hour_bin_label(int bin);

struct RowRejected {
  std::string reason;
};

/// Throws std::invalid_argument when the inputs disagree on the slug; returns RowRejected
/// when the repository was created after t0.
std::variant<FeatureRow, RowRejected> build_feature_row(const LaunchEvent& event, const RepoSnapshot& snapshot,
                                                        const AlignedSeries& series);

std::int64_t utf8_length(const std::string& text);

enum class FeatureSet { PreLaunchOnly, WithLeaky };

const char* feature_set_name(FeatureSet fs);  // "pre_launch_only" / "with_leaky"

/// Column order of the design matrix. Pre-launch: intercept, baseline_stars, repo_age_days,
/// readme_length, owner_is_org, has_license, title_length, is_show_hn, hour_06_11,
/// hour_12_17, hour_18_23, dow_tue ... dow_sun (reference: hour bin 00-05, Monday).
/// WithLeaky appends hn_score, hn_comments and, for the 48h and 7d targets only,
/// launch_day_stars.
std::vector<std::string> design_columns(FeatureSet fs, Horizon target);

/// Quantities that define each target; no design column may be among them.
std::vector<std::string> target_defining_quantities(Horizon target);

struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> columns;
};

/// Throws std::invalid_argument on an empty row set. Constant non-intercept columns are
/// kept and reported through `warnings`.
DesignMatrix assemble_design_matrix(const std::vector<FeatureRow>& rows, FeatureSet fs, Horizon target,
                                    Warnings* warnings = nullptr);

/// Value of one named design column for a row (same names as design_columns()).
double design_value(const FeatureRow& row, const std::string& column);

/// rows.csv: header fields carry their block as a prefix (`id:`, `pre:`, `leaky:`,
/// `target:`, `meta:`).
CsvTable feature_rows_to_csv(const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> feature_rows_from_csv(const CsvTable& table);

CsvTable design_matrix_to_csv(const DesignMatrix& m, Horizon target);

}  // namespace launchpulse
