#include "fairkm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

#include "fairkm/errors.hpp"
#include "fairkm/metrics.hpp"
#include "fairkm/preprocess.hpp"

namespace fairkm {

namespace {

using nlohmann::json;

constexpr const char* kReportSchema =
#include "report_schema.inc"
    ;

constexpr int kSchemaVersion = 1;

std::string_view algorithm_name(AlgorithmChoice a) {
  switch (a) {
    case AlgorithmChoice::lloyd:
      return "lloyd";
    case AlgorithmChoice::fair_lloyd:
      return "fair-lloyd";
    case AlgorithmChoice::both:
      return "both";
  }
  return "unknown";
}

// Non-finite values have no JSON literal; they are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json array_of(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

json matrix_of(const RowMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(array_of(m.row(r).transpose()));
  return out;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

json metrics_json(const MetricsReport& m) {
  return {{"per_group_cost", array_of(m.per_group_cost)},
          {"max_cost_ratio", m.max_cost_ratio ? number(*m.max_cost_ratio) : json(nullptr)},
          {"overall_cost", number(m.overall_cost)},
          {"balance", m.balance ? number(*m.balance) : json(nullptr)},
          {"price_of_fairness", m.price_of_fairness ? number(*m.price_of_fairness) : json(nullptr)}};
}

json fair_report_json(const FairSolveReport& r) {
  return {{"gamma", array_of(r.gamma)},
          {"group_costs", array_of(r.group_costs)},
          {"objective", number(r.objective)},
          {"lower_bound", number(r.lower_bound)},
          {"certificate_gap", number(r.certificate_gap)},
          {"iterations", r.iterations}};
}

}  // namespace

AlgorithmChoice parse_algorithm(std::string_view name) {
  if (name == "lloyd") return AlgorithmChoice::lloyd;
  if (name == "fair-lloyd" || name == "fair_lloyd" || name == "fair") return AlgorithmChoice::fair_lloyd;
  if (name == "both") return AlgorithmChoice::both;
  throw InputError("unknown algorithm '" + std::string(name) + "' (expected lloyd, fair-lloyd or both)");
}

std::pair<std::size_t, std::size_t> parse_k_range(std::string_view text) {
  auto parse_one = [&](std::string_view part) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(std::string(part), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size() || v == 0) {
      throw InputError("invalid k '" + std::string(text) + "' (expected N or A..B with N, A, B >= 1)");
    }
    return static_cast<std::size_t>(v);
  };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const std::size_t k = parse_one(text);
    return {k, k};
  }
  const std::size_t lo = parse_one(text.substr(0, dots));
  const std::size_t hi = parse_one(text.substr(dots + 2));
  if (lo > hi) throw InputError("empty k range '" + std::string(text) + "'");
  return {lo, hi};
}

void RunSpec::validate() const {
  if (group_column.empty()) throw InputError("a group column is required");
  if (k_min < 1 || k_min > k_max) throw InputError("k range must be non-empty with k >= 1");
  if (restarts < 1) throw InputError("restarts must be >= 1");
  if (iterations < 1) throw InputError("iterations must be >= 1");
  if (threads < 1) throw InputError("threads must be >= 1");
  PipelineSpec::parse(preprocess);
}

RunOutputs run_experiment(const RunSpec& spec, const IngestResult& input) {
  spec.validate();
  const Dataset& raw = input.dataset;
  if (spec.k_max > raw.n()) {
    throw InputError("k = " + std::to_string(spec.k_max) + " exceeds the " +
                     std::to_string(raw.n()) + " usable rows");
  }
  const PipelineSpec pipeline = PipelineSpec::parse(spec.preprocess);

  json report;
  report["schema_version"] = kSchemaVersion;
  json groups = json::array();
  for (std::size_t j = 0; j < raw.m(); ++j) {
    groups.push_back({{"label", raw.group_labels()[j]}, {"size", raw.group_sizes()[j]}});
  }
  report["input"] = {{"path", spec.input.generic_string()},
                     {"group_column", spec.group_column},
                     {"categorical", spec.categorical},
                     {"n", raw.n()},
                     {"d", raw.d()},
                     {"m", raw.m()},
                     {"groups", std::move(groups)},
                     {"rejected_lines", input.rejected_lines}};
  report["config"] = {{"k_min", spec.k_min},
                      {"k_max", spec.k_max},
                      {"algorithm", algorithm_name(spec.algorithm)},
                      {"init", to_string(spec.init)},
                      {"restarts", spec.restarts},
                      {"iterations", spec.iterations},
                      {"seed", spec.seed},
                      {"preprocess", pipeline.to_string()}};

  std::ostringstream group_csv;
  std::ostringstream ratio_csv;
  group_csv << "k,algorithm,group,avg_cost\n";
  ratio_csv << "k,algorithm,max_cost_ratio\n";
  json runs = json::array();

  for (std::size_t k = spec.k_min; k <= spec.k_max; ++k) {
    PreprocessPlan plan = fit_pipeline(raw, pipeline, k);
    plan.encoder = input.encoder;
    const Dataset data = plan.apply(raw);

    ClusteringConfig config;
    config.k = k;
    config.max_outer_iterations = spec.iterations;
    config.restarts = spec.restarts;
    config.seed = spec.seed;
    config.init = spec.init;
    config.threads = spec.threads;

    std::optional<ClusteringResult> baseline;
    std::vector<std::pair<std::string, ClusteringResult>> results;
    if (spec.algorithm != AlgorithmChoice::fair_lloyd) {
      baseline = lloyd(data, config);
      results.emplace_back("lloyd", *baseline);
    }
    if (spec.algorithm != AlgorithmChoice::lloyd) {
      results.emplace_back("fair-lloyd", fair_lloyd(data, config));
    }

    for (const auto& [name, result] : results) {
      const bool is_fair = name == "fair-lloyd";
      const MetricsReport metrics =
          compute_metrics(data, result, is_fair && baseline ? &*baseline : nullptr);
      json run = {{"k", k},
                  {"algorithm", name},
                  {"objective", number(result.objective())},
                  {"objective_trace", json::array()},
                  {"iterations", result.iterations_run},
                  {"best_restart", result.best_restart},
                  {"centers", matrix_of(result.centers.matrix())},
                  {"metrics", metrics_json(metrics)},
                  {"fair_report", result.fair_report ? fair_report_json(*result.fair_report)
                                                     : json(nullptr)},
                  {"preprocess_plan", json::parse(plan.to_json())}};
      for (double v : result.objective_trace) run["objective_trace"].push_back(number(v));
      if (spec.timing) run["wall_time_seconds"] = std::round(result.wall_time * 1000.0) / 1000.0;
      runs.push_back(std::move(run));

      for (std::size_t j = 0; j < data.m(); ++j) {
        group_csv << k << ',' << name << ',' << data.group_labels()[j] << ','
                  << csv_number(metrics.per_group_cost[static_cast<Eigen::Index>(j)]) << '\n';
      }
      ratio_csv << k << ',' << name << ','
                << (metrics.max_cost_ratio ? csv_number(*metrics.max_cost_ratio) : std::string("nan"))
                << '\n';
    }
  }
  report["runs"] = std::move(runs);

  RunOutputs out;
  out.report_json = report.dump(2) + "\n";
  try {
    validate_report(out.report_json);
  } catch (const InputError& e) {
    throw std::logic_error(std::string("generated report failed validation: ") + e.what());
  }
  out.group_cost_csv = group_csv.str();
  out.ratio_csv = ratio_csv.str();
  return out;
}

RunOutputs run_experiment(const RunSpec& spec) {
  spec.validate();
  const IngestResult input = ingest_csv(spec.input, IngestOptions{spec.group_column, spec.categorical});
  return run_experiment(spec, input);
}

std::string_view report_schema() { return kReportSchema; }

void validate_report(std::string_view report_json) {
  static const rapidjson::SchemaDocument schema = [] {
    rapidjson::Document doc;
    doc.Parse(kReportSchema);
    if (doc.HasParseError()) throw std::logic_error("bundled report schema is not valid JSON");
    return rapidjson::SchemaDocument(doc);
  }();
  rapidjson::Document doc;
  doc.Parse(report_json.data(), report_json.size());
  if (doc.HasParseError()) {
    throw InputError(std::string("report is not valid JSON: ") +
                     rapidjson::GetParseError_En(doc.GetParseError()));
  }
  rapidjson::SchemaValidator validator(schema);
  if (!doc.Accept(validator)) {
    rapidjson::StringBuffer where;
    validator.GetInvalidDocumentPointer().StringifyUriFragment(where);
    throw InputError(std::string("report violates schema: keyword '") +
                     validator.GetInvalidSchemaKeyword() + "' at " + where.GetString());
  }
}

}  // namespace fairkm
