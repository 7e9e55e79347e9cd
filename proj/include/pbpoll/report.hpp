#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pbpoll {

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

struct Report {
  std::string title = "Consistency report";
  std::vector<Table> tables;

  friend bool operator==(const Report&, const Report&) = default;
};

enum class ReportFormat { Markdown, Csv };

/// "markdown" / "md" or "csv". Throws Error(UnsupportedFormat).
ReportFormat parse_report_format(std::string_view name);

/// Markdown: a level-1 heading, then one level-2 heading and pipe table per
/// table. CSV: the report title on the first line, then per table a blank
/// line, the title, the header and the rows. An empty report renders the
/// heading (or title line) only.
std::string render_report(const Report& report, ReportFormat format);

/// Inverse of the CSV rendering.
Report parse_csv_report(std::string_view text);

enum class Rounding { HalfUp, Truncate };

/// 100 * num / den with `decimals` fractional digits, computed exactly. With
/// strip_zero, an all-zero fraction is dropped ("75" rather than "75.0").
/// den == 0 renders as 0.
std::string format_percent(std::int64_t num, std::int64_t den, int decimals, Rounding rounding,
                           bool strip_zero = false);

/// "72.7% (32)": one decimal, half up, ".0" dropped.
std::string count_cell(std::int64_t count, std::int64_t total);

}  // namespace pbpoll
