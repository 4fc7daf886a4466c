#include "fairkm/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "fairkm/errors.hpp"

namespace fairkm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool is_missing(const std::string& v) {
  return v.empty() || v == "?" || v == "NA" || v == "NaN" || v == "nan" || v == "null";
}

bool parse_number(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const char* role) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw InputError(std::string(role) + " column '" + name + "' not found in header");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(field_quoted ? field : trim(field));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty() && !record_has_content;
    if (!blank) {
      if (table.header.empty()) {
        table.header = std::move(record);
      } else {
        table.rows.push_back(std::move(record));
        table.line_numbers.push_back(record_line);
      }
    }
    record.clear();
    record_has_content = false;
  };

  char c = 0;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      case '\r':
        break;
      default:
        field += c;
        record_has_content = true;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field starting on line " + std::to_string(record_line));
  if (record_has_content || !field.empty()) end_record();
  if (table.header.empty()) throw InputError("empty CSV input: no header row");
  // A UTF-8 byte-order mark would otherwise become part of the first name.
  if (table.header[0].rfind("\xEF\xBB\xBF", 0) == 0) table.header[0].erase(0, 3);
  return table;
}

IngestResult ingest_csv(std::istream& in, const IngestOptions& options) {
  const CsvTable table = parse_csv(in);
  if (table.rows.empty()) throw InputError("CSV has a header but no data rows");
  if (options.group_column.empty()) throw InputError("no group column given");
  const std::size_t group_col = find_column(table.header, options.group_column, "group");

  std::vector<std::size_t> categorical_cols;
  for (const auto& name : options.categorical) {
    if (name == options.group_column) {
      throw InputError("column '" + name + "' cannot be both the group and a categorical column");
    }
    categorical_cols.push_back(find_column(table.header, name, "categorical"));
  }
  std::vector<std::size_t> numeric_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == group_col) continue;
    if (std::find(categorical_cols.begin(), categorical_cols.end(), c) != categorical_cols.end()) continue;
    numeric_cols.push_back(c);
  }
  if (numeric_cols.empty() && categorical_cols.empty()) throw InputError("CSV has no feature columns");

  std::vector<std::size_t> rejected;
  std::vector<std::vector<double>> numeric_rows;
  std::vector<std::vector<std::string>> categorical_rows;
  std::vector<std::string> group_values;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    if (row.size() != table.header.size()) {
      rejected.push_back(line);
      continue;
    }
    bool missing = is_missing(row[group_col]);
    for (std::size_t c : categorical_cols) missing = missing || is_missing(row[c]);
    std::vector<double> values;
    values.reserve(numeric_cols.size());
    for (std::size_t c : numeric_cols) {
      if (is_missing(row[c])) {
        missing = true;
        break;
      }
      double v = 0.0;
      if (!parse_number(row[c], v)) {
        throw InputError("non-numeric value '" + row[c] + "' in column '" + table.header[c] +
                         "' on line " + std::to_string(line) +
                         " (declare it categorical to encode it)");
      }
      values.push_back(v);
    }
    if (missing) {
      rejected.push_back(line);
      continue;
    }
    numeric_rows.push_back(std::move(values));
    std::vector<std::string> labels;
    for (std::size_t c : categorical_cols) labels.push_back(row[c]);
    categorical_rows.push_back(std::move(labels));
    group_values.push_back(row[group_col]);
  }
  if (numeric_rows.empty()) throw InputError("every data row was rejected");

  std::optional<OneHotEncoder> encoder;
  if (!categorical_cols.empty()) {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> columns(categorical_cols.size());
    for (std::size_t c : categorical_cols) names.push_back(table.header[c]);
    for (const auto& labels : categorical_rows) {
      for (std::size_t c = 0; c < labels.size(); ++c) columns[c].push_back(labels[c]);
    }
    encoder = OneHotEncoder::fit(names, columns);
  }

  const std::size_t n = numeric_rows.size();
  const std::size_t width = encoder ? encoder->width() : 0;
  RowMatrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(numeric_cols.size() + width));
  std::vector<double> buffer(width);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t c = 0; c < numeric_cols.size(); ++c) {
      points(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) = numeric_rows[p][c];
    }
    if (encoder) {
      encoder->encode_row(categorical_rows[p], buffer);
      for (std::size_t c = 0; c < width; ++c) {
        points(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(numeric_cols.size() + c)) = buffer[c];
      }
    }
  }

  const std::set<std::string> unique(group_values.begin(), group_values.end());
  const std::vector<std::string> labels(unique.begin(), unique.end());
  std::map<std::string, int> id_of;
  for (std::size_t j = 0; j < labels.size(); ++j) id_of[labels[j]] = static_cast<int>(j);
  std::vector<int> group_of;
  group_of.reserve(n);
  for (const auto& g : group_values) group_of.push_back(id_of[g]);

  std::vector<std::string> feature_names;
  for (std::size_t c : numeric_cols) feature_names.push_back(table.header[c]);
  if (encoder) {
    for (auto& name : encoder->output_names()) feature_names.push_back(std::move(name));
  }
  return IngestResult{Dataset(std::move(points), std::move(group_of), labels, std::move(feature_names)),
                      std::move(rejected), std::move(encoder)};
}

IngestResult ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path.string() + "'");
  return ingest_csv(in, options);
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (std::size_t c = 0; c < dataset.d(); ++c) buf << 'x' << c << ',';
  buf << "group\n";
  for (std::size_t p = 0; p < dataset.n(); ++p) {
    const auto row = dataset.point(p);
    for (std::size_t c = 0; c < dataset.d(); ++c) buf << row[static_cast<Eigen::Index>(c)] << ',';
    buf << quote_if_needed(dataset.group_labels()[static_cast<std::size_t>(dataset.group_of(p))]) << '\n';
  }
  out << buf.str();
}

}  // namespace fairkm
