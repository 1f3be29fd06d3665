#include "launchpulse/eventstudy.hpp"

#include <algorithm>
#include <stdexcept>

namespace launchpulse {

const char* statistic_name(Statistic s) { return s == Statistic::Mean ? "mean" : "median"; }

const char* grouping_name(Grouping g) {
  switch (g) {
    case Grouping::ShowHn: return "show_hn";
    case Grouping::Weekend: return "weekend";
    case Grouping::HourBin: return "hour_bin";
  }
  return "?";
}

std::vector<double> cumulative_by_day(const AlignedSeries& series) {
  std::vector<double> out(kCurvePoints, 0.0);
  std::int64_t running = 0;
  for (int d = 0; d < kWindowDays; ++d) {
    running += series.daily[d];
    out[d + 1] = static_cast<double>(running);
  }
  return out;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

EventCurve event_curve(const std::vector<AlignedSeries>& series_set, Statistic statistic) {
  if (series_set.empty()) throw std::invalid_argument("event curve needs at least one series");
  std::vector<std::vector<double>> cumulative;
  cumulative.reserve(series_set.size());
  for (const auto& s : series_set) cumulative.push_back(cumulative_by_day(s));

  EventCurve curve;
  curve.statistic = statistic;
  curve.n = series_set.size();
  for (int p = 0; p < kCurvePoints; ++p) {
    std::vector<double> column;
    column.reserve(cumulative.size());
    for (const auto& c : cumulative) column.push_back(c[p]);
    curve.days.push_back(kCurveFirstDay + p);
    curve.values.push_back(statistic == Statistic::Mean ? mean(column) : median(std::move(column)));
  }
  return curve;
}

LaunchEffects launch_effect_summary(const std::vector<FeatureRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("launch effect summary needs at least one row");
  LaunchEffects out;
  out.n = rows.size();
  for (Horizon h : {Horizon::H24, Horizon::H48, Horizon::D7}) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& r : rows) values.push_back(static_cast<double>(r.target(h)));
    out.horizons.push_back({h, mean(values), median(values)});
  }
  return out;
}

GroupComparison group_comparison(const std::vector<FeatureRow>& rows, Grouping grouping, Horizon target) {
  GroupComparison out{grouping, target, {}, std::nullopt, {}, {}};
  std::vector<std::string> labels;
  auto group_of = [grouping](const FeatureRow& r) {
    switch (grouping) {
      case Grouping::ShowHn: return r.is_show_hn;
      case Grouping::Weekend: return r.is_weekend;
      case Grouping::HourBin: return r.hour_bin;
    }
    return 0;
  };
  switch (grouping) {
    case Grouping::ShowHn: labels = {"other", "show_hn"}; break;
    case Grouping::Weekend: labels = {"weekday", "weekend"}; break;
    case Grouping::HourBin: labels = {"00-05", "06-11", "12-17", "18-23"}; break;
  }
  std::vector<std::vector<double>> values(labels.size());
  for (const auto& r : rows) values.at(static_cast<std::size_t>(group_of(r))).push_back(static_cast<double>(r.target(target)));

  for (std::size_t g = 0; g < labels.size(); ++g) {
    GroupStat stat{labels[g], values[g].size(), std::nullopt};
    if (!values[g].empty()) stat.mean = mean(values[g]);
    out.groups.push_back(stat);
  }

  if (grouping != Grouping::HourBin) {
    if (out.groups[0].mean && out.groups[1].mean) out.difference = *out.groups[1].mean - *out.groups[0].mean;
    return out;
  }
  std::optional<std::size_t> best, worst;
  for (std::size_t g = 0; g < out.groups.size(); ++g) {
    if (!out.groups[g].mean) continue;
    if (!best || *out.groups[g].mean > *out.groups[*best].mean) best = g;
    if (!worst || *out.groups[g].mean < *out.groups[*worst].mean) worst = g;
  }
  std::size_t populated = 0;
  for (const auto& g : out.groups) populated += g.mean.has_value();
  if (populated >= 2) {
    out.difference = *out.groups[*best].mean - *out.groups[*worst].mean;
    out.best_group = out.groups[*best].label;
    out.worst_group = out.groups[*worst].label;
  }
  return out;
}

}  // namespace launchpulse
