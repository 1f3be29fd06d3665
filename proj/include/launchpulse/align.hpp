#pragma once

#include <array>
#include <cstdint>

#include "launchpulse/types.hpp"

namespace launchpulse {

inline constexpr int kWindowDays = 14;
inline constexpr int kHoursPerDay = 24;
inline constexpr int kWindowHours = kWindowDays * kHoursPerDay;  // 336
inline constexpr int kLaunchHour = kWindowHours / 2;             // hour index of t0

/// Half-open event window [t0 - 168h, t0 + 168h).
struct EventWindow {
  Timestamp t0{};
  Timestamp start{};
  Timestamp end{};
};

EventWindow build_window(Timestamp t0);

enum class Horizon { H24, H48, D7 };

constexpr int horizon_hours(Horizon h) {
  switch (h) {
    case Horizon::H24: return 24;
    case Horizon::H48: return 48;
    case Horizon::D7: return 168;
  }
  return 0;
}

const char* horizon_name(Horizon h);  // "24h", "48h", "7d"

/// Star gains bucketed by event-relative hour; hour i covers [start + i h, start + (i+1) h).
struct AlignedSeries {
  RepoSlug slug;
  Timestamp t0{};
  std::array<std::int64_t, kWindowHours> hourly{};
  std::array<std::int64_t, kWindowDays> daily{};
  std::int64_t baseline_stars = 0;  // events strictly before t0

  friend bool operator==(const AlignedSeries&, const AlignedSeries&) = default;
};

/// Buckets a sorted star log into the window and fills the daily totals and baseline.
/// Throws std::invalid_argument if the log is not sorted.
AlignedSeries bucket_hourly(const StarEventLog& log, const EventWindow& window);

/// Stars gained in hours [t0, t0 + horizon).
std::int64_t delta_stars(const AlignedSeries& series, Horizon horizon);

}  // namespace launchpulse
