#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace launchpulse {

/// Comma-separated, LF line endings, fields quoted only when they contain a comma, quote,
/// CR or LF (quotes doubled inside).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
  static CsvTable parse(std::string_view text);

  /// Index of a header column; throws std::out_of_range naming the column.
  std::size_t column(std::string_view name) const;
};

std::string csv_escape(std::string_view field);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Fixed-point formatting used by every emitted table: star counts 1 decimal, p-values 2,
/// metrics 3. Non-finite values render as "nan"/"inf"/"-inf"; negative zero renders as zero.
std::string fmt_fixed(double value, int decimals);
inline std::string fmt_stars(double v) { return fmt_fixed(v, 1); }
inline std::string fmt_pvalue(double v) { return fmt_fixed(v, 2); }
inline std::string fmt_metric(double v) { return fmt_fixed(v, 3); }

/// Shortest representation that round-trips exactly.
std::string fmt_exact(double value);

}  // namespace launchpulse
