#pragma once

#include <optional>
#include <string>
#include <vector>

#include "launchpulse/align.hpp"
#include "launchpulse/features.hpp"

namespace launchpulse {

enum class Statistic { Mean, Median };
const char* statistic_name(Statistic s);

/// Cumulative stars gained since window start, sampled at the 15 day boundaries
/// -7, -6, ..., +7 (day 0 is the launch instant), aggregated across repositories.
struct EventCurve {
  Statistic statistic = Statistic::Mean;
  std::vector<int> days;       // -7..7
  std::vector<double> values;  // one per day
  std::size_t n = 0;
};

inline constexpr int kCurveFirstDay = -kWindowDays / 2;
inline constexpr int kCurvePoints = kWindowDays + 1;

/// Per-repository cumulative series at the day boundaries (value at day d = stars in
/// [window start, t0 + d days)).
std::vector<double> cumulative_by_day(const AlignedSeries& series);

/// Throws std::invalid_argument on an empty set.
EventCurve event_curve(const std::vector<AlignedSeries>& series_set, Statistic statistic);

/// Median of an even-sized set is the average of the two middle values.
double median(std::vector<double> values);
double mean(const std::vector<double>& values);

struct HorizonEffect {
  Horizon horizon;
  double mean = 0.0;
  double median = 0.0;
};

struct LaunchEffects {
  std::size_t n = 0;
  std::vector<HorizonEffect> horizons;  // 24h, 48h, 7d
};

LaunchEffects launch_effect_summary(const std::vector<FeatureRow>& rows);

enum class Grouping { ShowHn, Weekend, HourBin };
const char* grouping_name(Grouping g);

struct GroupStat {
  std::string label;
  std::size_t n = 0;
  std::optional<double> mean;  // absent for empty groups
};

struct GroupComparison {
  Grouping grouping;
  Horizon target;
  std::vector<GroupStat> groups;
  /// Binary groupings: group1 - group0 (Show HN minus others, weekend minus weekday).
  /// Hour bins: best minus worst nonempty bin. Absent when fewer than two groups are
  /// populated.
  std::optional<double> difference;
  std::string best_group;  // hour bins only
  std::string worst_group;
};

GroupComparison group_comparison(const std::vector<FeatureRow>& rows, Grouping grouping, Horizon target);

}  // namespace launchpulse
