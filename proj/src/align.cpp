#include "launchpulse/align.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace launchpulse {

EventWindow build_window(Timestamp t0) {
  using std::chrono::hours;
  return EventWindow{t0, t0 - hours{kLaunchHour}, t0 + hours{kWindowHours - kLaunchHour}};
}

const char* horizon_name(Horizon h) {
  switch (h) {
    case Horizon::H24: return "24h";
    case Horizon::H48: return "48h";
    case Horizon::D7: return "7d";
  }
  return "?";
}

AlignedSeries bucket_hourly(const StarEventLog& log, const EventWindow& window) {
  if (!std::is_sorted(log.starred_at.begin(), log.starred_at.end())) {
    throw std::invalid_argument(fmt::format("star log for {} is not sorted", log.slug.full_name()));
  }
  AlignedSeries series;
  series.slug = log.slug;
  series.t0 = window.t0;
  for (const auto t : log.starred_at) {
    if (t < window.t0) ++series.baseline_stars;
    if (t < window.start || !(t < window.end)) continue;
    const auto offset = std::chrono::duration_cast<std::chrono::hours>(t - window.start).count();
    ++series.hourly[static_cast<std::size_t>(offset)];
  }
  for (int d = 0; d < kWindowDays; ++d) {
    std::int64_t total = 0;
    for (int h = 0; h < kHoursPerDay; ++h) total += series.hourly[d * kHoursPerDay + h];
    series.daily[d] = total;
  }
  return series;
}

std::int64_t delta_stars(const AlignedSeries& series, Horizon horizon) {
  std::int64_t total = 0;
  for (int h = 0; h < horizon_hours(horizon); ++h) total += series.hourly[kLaunchHour + h];
  return total;
}

}  // namespace launchpulse
