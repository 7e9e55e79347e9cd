#include "pbpoll/report.hpp"

#include "pbpoll/error.hpp"

namespace pbpoll {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  throw Error(Errc::UnsupportedFormat, "unsupported report format '" + std::string(name) + "'");
}

namespace {

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

void md_row(std::string& out, const std::vector<std::string>& cells) {
  out += "|";
  for (const auto& c : cells) out += " " + md_cell(c) + " |";
  out += "\n";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void csv_row(std::string& out, const std::vector<std::string>& cells) {
  // A lone empty cell would look like the blank separator line.
  if (cells.size() == 1 && cells[0].empty()) {
    out += "\"\"\n";
    return;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_field(cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string render_report(const Report& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Markdown) {
    out += "# " + report.title + "\n";
    for (const auto& t : report.tables) {
      out += "\n## " + t.title + "\n\n";
      md_row(out, t.header);
      out += "|";
      for (std::size_t i = 0; i < t.header.size(); ++i) out += " --- |";
      out += "\n";
      for (const auto& r : t.rows) md_row(out, r);
    }
    return out;
  }
  csv_row(out, {report.title});
  for (const auto& t : report.tables) {
    out += '\n';
    csv_row(out, {t.title});
    csv_row(out, t.header);
    for (const auto& r : t.rows) csv_row(out, r);
  }
  return out;
}

Report parse_csv_report(std::string_view text) {
  // Split into records of fields, keeping blank lines as empty records.
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      if (any || !field.empty()) fields.push_back(std::move(field));
      lines.push_back(std::move(fields));
      fields.clear();
      field.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(Errc::ParseError, "unterminated quoted field");
  if (any || !field.empty()) {
    fields.push_back(std::move(field));
    lines.push_back(std::move(fields));
  }

  Report report;
  if (lines.empty() || lines[0].size() != 1) throw Error(Errc::ParseError, "missing report title");
  report.title = lines[0][0];
  std::size_t i = 1;
  while (i < lines.size()) {
    if (!lines[i].empty()) throw Error(Errc::ParseError, "expected a blank line before a table");
    ++i;
    if (i + 1 >= lines.size() || lines[i].size() != 1) throw Error(Errc::ParseError, "truncated table");
    Table t;
    t.title = lines[i++][0];
    t.header = lines[i++];
    while (i < lines.size() && !lines[i].empty()) t.rows.push_back(lines[i++]);
    report.tables.push_back(std::move(t));
  }
  return report;
}

std::string format_percent(std::int64_t num, std::int64_t den, int decimals, Rounding rounding,
                           bool strip_zero) {
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  std::int64_t scaled = 0;
  if (den != 0) {
    const __int128 top = static_cast<__int128>(num) * 100 * scale;
    scaled = rounding == Rounding::HalfUp
                 ? static_cast<std::int64_t>((2 * top + den) / (2 * static_cast<__int128>(den)))
                 : static_cast<std::int64_t>(top / den);
  }
  std::string out = std::to_string(scaled / scale);
  if (decimals > 0) {
    std::string frac = std::to_string(scaled % scale);
    frac.insert(frac.begin(), static_cast<std::size_t>(decimals) - frac.size(), '0');
    if (!(strip_zero && frac.find_first_not_of('0') == std::string::npos)) out += "." + frac;
  }
  return out;
}

std::string count_cell(std::int64_t count, std::int64_t total) {
  return format_percent(count, total, 1, Rounding::HalfUp, true) + "% (" + std::to_string(count) + ")";
}

}  // namespace pbpoll
