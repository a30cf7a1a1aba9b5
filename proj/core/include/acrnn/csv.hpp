#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "acrnn/preprocess.hpp"

namespace acrnn {

struct CsvOptions {
  /// Field separator. ' ' or '\t' treat any run of blanks/tabs as one separator.
  char delimiter = ',';
  bool header = true;
  /// Leading non-numeric columns (timestamps, dates) dropped from every row.
  std::size_t skip_columns = 0;
};

/// Reads a rectangular numeric table into a frame. Variable names come from
/// the header or default to var1..varN.
///
/// Throws ParseError (1-based row/column of the file) for a non-numeric cell
/// or a missing value (empty cell, NA, NaN), and FormatError for ragged rows
/// or an empty table.
SeriesFrame parse_csv(std::istream& in, const CsvOptions& options = {});
SeriesFrame ingest_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes the frame with a header row; reals in shortest round-trip form.
void write_csv(std::ostream& out, const SeriesFrame& frame, char delimiter = ',');
void write_csv(const std::filesystem::path& path, const SeriesFrame& frame, char delimiter = ',');

}  // namespace acrnn
