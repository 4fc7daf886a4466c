#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fairkm/clustering.hpp"
#include "fairkm/csv.hpp"

namespace fairkm {

enum class AlgorithmChoice { lloyd, fair_lloyd, both };

AlgorithmChoice parse_algorithm(std::string_view name);

/// Everything that determines a run. Output bytes depend only on these
/// fields; `threads` and `timing` are excluded from the report.
struct RunSpec {
  std::filesystem::path input;
  std::string group_column;
  std::vector<std::string> categorical;
  std::size_t k_min = 2;
  std::size_t k_max = 2;
  AlgorithmChoice algorithm = AlgorithmChoice::both;
  InitMethod init = InitMethod::random;
  int restarts = 200;
  int iterations = 200;
  std::uint64_t seed = 0;
  std::string preprocess = "zscore";
  int threads = 1;
  /// Adds wall-clock seconds to the report (makes it run-dependent).
  bool timing = false;

  void validate() const;
};

/// Parses "7" or "4..16".
std::pair<std::size_t, std::size_t> parse_k_range(std::string_view text);

struct RunOutputs {
  std::string report_json;
  /// k,algorithm,group,avg_cost
  std::string group_cost_csv;
  /// k,algorithm,max_cost_ratio
  std::string ratio_csv;
};

/// Preprocess, cluster each k with each selected algorithm, and render the
/// outputs. The report is validated against the bundled schema.
RunOutputs run_experiment(const RunSpec& spec, const IngestResult& input);
RunOutputs run_experiment(const RunSpec& spec);

/// The JSON Schema every report must satisfy.
std::string_view report_schema();

/// Throws InputError listing the first violation.
void validate_report(std::string_view report_json);

}  // namespace fairkm
