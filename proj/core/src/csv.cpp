#include "acrnn/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "acrnn/checkpoint.hpp"
#include "acrnn/errors.hpp"

namespace acrnn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == ' ' || delimiter == '\t') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      fields.push_back(line.substr(start, i - start));
    }
    return fields;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

bool is_missing(std::string_view cell) {
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower.empty() || lower == "na" || lower == "nan" || lower == "null" || lower == "?";
}

}  // namespace

SeriesFrame parse_csv(std::istream& in, const CsvOptions& options) {
  SeriesFrame frame;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t file_row = 0;
  bool header_pending = options.header;
  std::string line;

  while (std::getline(in, line)) {
    ++file_row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, options.delimiter);
    if (fields.size() <= options.skip_columns) {
      throw FormatError("row " + std::to_string(file_row) + " has only " + std::to_string(fields.size()) +
                        " fields but " + std::to_string(options.skip_columns) + " leading columns are skipped");
    }
    const std::size_t n = fields.size() - options.skip_columns;
    if (header_pending) {
      for (std::size_t c = options.skip_columns; c < fields.size(); ++c) {
        std::string name(fields[c]);
        if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
        frame.names.push_back(std::move(name));
      }
      width = n;
      header_pending = false;
      continue;
    }
    if (width == 0) width = n;
    if (n != width) {
      throw FormatError("ragged row " + std::to_string(file_row) + ": expected " + std::to_string(width) +
                        " values, found " + std::to_string(n));
    }
    for (std::size_t c = options.skip_columns; c < fields.size(); ++c) {
      const std::string_view cell = fields[c];
      if (is_missing(cell)) {
        throw ParseError("missing value at row " + std::to_string(file_row) + ", column " + std::to_string(c + 1) +
                             "; impute or drop it before ingestion",
                         file_row, c + 1);
      }
      double value = 0.0;
      std::string_view digits = cell;
      if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || !std::isfinite(value)) {
        throw ParseError("non-numeric value '" + std::string(cell) + "' at row " + std::to_string(file_row) +
                             ", column " + std::to_string(c + 1),
                         file_row, c + 1);
      }
      values.push_back(value);
    }
  }
  if (width == 0 || values.empty()) throw FormatError("table has no data rows");
  const std::size_t rows = values.size() / width;
  frame.data = Matrix(rows, width, std::move(values));
  if (frame.names.empty()) {
    for (std::size_t c = 0; c < width; ++c) frame.names.push_back("var" + std::to_string(c + 1));
  }
  return frame;
}

SeriesFrame ingest_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_csv(in, options);
}

void write_csv(std::ostream& out, const SeriesFrame& frame, char delimiter) {
  for (std::size_t c = 0; c < frame.variables(); ++c) {
    if (c > 0) out << delimiter;
    out << (c < frame.names.size() ? frame.names[c] : "var" + std::to_string(c + 1));
  }
  out << '\n';
  for (std::size_t r = 0; r < frame.length(); ++r) {
    for (std::size_t c = 0; c < frame.variables(); ++c) {
      if (c > 0) out << delimiter;
      out << format_real(frame.data(r, c));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const SeriesFrame& frame, char delimiter) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, frame, delimiter);
}

}  // namespace acrnn
