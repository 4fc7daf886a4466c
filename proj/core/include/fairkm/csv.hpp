#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairkm/preprocess.hpp"
#include "fairkm/types.hpp"

namespace fairkm {

/// Raw CSV: header plus string fields. Quoted fields may contain commas,
/// doubled quotes and newlines. `line_numbers[r]` is the 1-based line on which
/// row r starts.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

/// Throws InputError on an empty input or unterminated quote.
CsvTable parse_csv(std::istream& in);

struct IngestOptions {
  std::string group_column;
  /// Columns one-hot encoded instead of parsed as numbers.
  std::vector<std::string> categorical;
};

struct IngestResult {
  Dataset dataset;
  /// 1-based source lines of rows dropped for missing values ("", "?", "NA",
  /// "NaN", "null") or a wrong field count.
  std::vector<std::size_t> rejected_lines;
  /// Present when categorical columns were declared.
  std::optional<OneHotEncoder> encoder;
};

/// Group labels map to ids in sorted label order. Numeric columns keep their
/// header order and are followed by the indicator columns.
/// Throws InputError for: empty file / header only, missing group column,
/// unknown categorical column, a non-numeric value in an undeclared column,
/// or no rows left after rejection.
IngestResult ingest_csv(std::istream& in, const IngestOptions& options);
IngestResult ingest_csv(const std::filesystem::path& path, const IngestOptions& options);

/// Writes points as x0..x{d-1} plus a "group" column holding the group labels.
void write_dataset_csv(std::ostream& out, const Dataset& dataset);

}  // namespace fairkm
