#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "launchpulse/csv.hpp"
#include "launchpulse/eventstudy.hpp"
#include "launchpulse/inference.hpp"
#include "launchpulse/learn.hpp"

namespace launchpulse::report {

// Table builders. Star-denominated numbers carry 1 decimal, p-values 2, model metrics 3.

CsvTable event_curves_table(const std::optional<EventCurve>& mean_curve, const std::optional<EventCurve>& median_curve);

/// Horizon rows with mean/median and the published reference means for comparison.
CsvTable launch_effects_table(const std::optional<LaunchEffects>& effects);

CsvTable group_comparisons_table(const std::vector<GroupComparison>& comparisons);

/// Columns: effect, coefficient, std_error, p_value, note.
CsvTable regression_table(const std::vector<CoefRow>& rows);

struct TimingEffect {
  std::string effect;
  std::optional<double> coefficient;
  std::optional<double> std_error;
  std::optional<double> p_value;
  std::string note;
};

/// Same five columns as regression_table; absent values render as "-".
CsvTable timing_effects_table(const std::vector<TimingEffect>& effects);

CsvTable model_performance_table(const std::vector<learn::ModelReport>& reports);

/// Long format: section, name, value (metric / setting / hyperparameter / coefficient / importance).
CsvTable model_report_table(const learn::ModelReport& report);

CsvTable cv_table(const learn::CvResult& cv);

struct DatasetCounts {
  std::size_t total_pairs = 0;
  std::size_t valid_series = 0;
  std::size_t metadata_only = 0;  // snapshot present, star history unusable
  std::size_t modeling_rows = 0;
  std::size_t show_hn = 0;
  std::size_t non_show_hn = 0;
  std::optional<double> mean_baseline_stars;
  std::optional<double> mean_hn_score;
  std::optional<double> mean_hn_comments;
  std::string period;
  std::vector<std::pair<std::string, std::string>> exclusions;  // slug, reason
};

CsvTable dataset_table(const DatasetCounts& counts);

// Figures

enum class FigureKind { EventCurve, HourBars };

struct FigureSeries {
  std::string label;
  std::vector<double> x;  // event curve only
  std::vector<double> y;
};

struct FigureSpec {
  FigureKind kind = FigureKind::EventCurve;
  std::vector<FigureSeries> series;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> bar_labels;  // hour bars: one per value of series[0]
};

/// Self-contained SVG (no external fonts, scripts or images); byte-identical for identical
/// input. Throws std::invalid_argument on empty data or a non-finite value, naming the series.
std::string render_svg(const FigureSpec& figure);

// Summaries

struct SummaryInputs {
  DatasetCounts counts;
  std::optional<LaunchEffects> effects;
  std::vector<GroupComparison> comparisons;
  std::vector<TimingEffect> timing;
  std::vector<learn::ModelReport> models;
};

std::string write_summary(const SummaryInputs& inputs);

struct ManifestEntry {
  std::string path;  // relative, '/'-separated
  std::uintmax_t bytes = 0;
};

/// Lists every regular file under `out_dir` except manifest.csv itself, sorted by path.
std::vector<ManifestEntry> collect_manifest(const std::filesystem::path& out_dir);
CsvTable manifest_table(const std::vector<ManifestEntry>& entries);

}  // namespace launchpulse::report
