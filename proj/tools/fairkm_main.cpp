// fairkm: Lloyd vs fair (minimax group cost) k-means from the command line.
//
//   fairkm run --input data.csv --group-col sex --k 2..10 --algo both
//              --out-report report.json --out-plotdata costs.csv
//   fairkm gen --preset skewed --n 2000 --seed 7 --out synthetic.csv
//
// Exit codes: 0 success, 1 input error, 2 internal error. Errors are printed
// to stderr as a single JSON object.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairkm/errors.hpp"
#include "fairkm/pipeline.hpp"
#include "fairkm/synthetic.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

int report_error(const char* kind, const std::string& message, int code) {
  nlohmann::json err = {{"error", {{"type", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fairkm::InputError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw fairkm::InputError("failed writing '" + path + "'");
}

std::string default_ratio_path(const std::string& plotdata) {
  const auto dot = plotdata.rfind('.');
  const auto slash = plotdata.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return plotdata + ".ratio.csv";
  }
  return plotdata.substr(0, dot) + ".ratio" + plotdata.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lloyd and fair (minimax group cost) k-means"};
  app.require_subcommand(1);

  struct RunOptions {
    std::string input, group_col, k = "2", algo = "both", init = "random";
    std::vector<std::string> categorical;
    int restarts = 200, iters = 200, threads = 1;
    std::uint64_t seed = 0;
    std::string preprocess = "zscore";
    std::string out_report = "report.json", out_plotdata = "plotdata.csv", out_ratio;
    bool timing = false;
  } run;
  auto* run_cmd = app.add_subcommand("run", "Cluster a CSV file and write a report");
  run_cmd->add_option("--input", run.input, "Input CSV with a header row")->required();
  run_cmd->add_option("--group-col", run.group_col, "Column holding the group label")->required();
  run_cmd->add_option("--categorical", run.categorical, "Columns to one-hot encode")->delimiter(',');
  run_cmd->add_option("--k", run.k, "Number of clusters: N or A..B")->capture_default_str();
  run_cmd->add_option("--algo", run.algo, "lloyd | fair-lloyd | both")->capture_default_str();
  run_cmd->add_option("--init", run.init, "random | kmeanspp | weighted | partition | mixed")->capture_default_str();
  run_cmd->add_option("--restarts", run.restarts, "Initializations per k")->capture_default_str();
  run_cmd->add_option("--iters", run.iters, "Max Lloyd rounds per initialization")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Base random seed")->capture_default_str();
  run_cmd->add_option("--preprocess", run.preprocess,
                      "Comma list of zscore, pca:N, pca:k (or none)")->capture_default_str();
  run_cmd->add_option("--out-report", run.out_report, "JSON report path")->capture_default_str();
  run_cmd->add_option("--out-plotdata", run.out_plotdata,
                      "CSV of k,algorithm,group,avg_cost")->capture_default_str();
  run_cmd->add_option("--out-ratio", run.out_ratio,
                      "CSV of k,algorithm,max_cost_ratio (default: <plotdata>.ratio.csv)");
  run_cmd->add_option("--threads", run.threads, "Worker threads for restarts")->capture_default_str();
  run_cmd->add_flag("--timing", run.timing, "Include wall-clock seconds in the report");

  struct GenOptions {
    std::string preset = "skewed", out;
    std::size_t n = 2000;
    std::uint64_t seed = 0;
  } gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic group-labelled CSV");
  gen_cmd->add_option("--preset", gen.preset, "skewed | symmetric | three-group")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Total number of points")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output CSV (metadata goes to <out>.meta.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage_error", e.what(), kExitInput);
  }

  try {
    if (*gen_cmd) {
      const auto data = fairkm::generate_synthetic(fairkm::preset_params(gen.preset, gen.n, gen.seed));
      fairkm::write_synthetic(data, gen.out);
      return 0;
    }

    fairkm::RunSpec spec;
    spec.input = run.input;
    spec.group_column = run.group_col;
    spec.categorical = run.categorical;
    std::tie(spec.k_min, spec.k_max) = fairkm::parse_k_range(run.k);
    spec.algorithm = fairkm::parse_algorithm(run.algo);
    try {
      spec.init = fairkm::parse_init_method(run.init);
    } catch (const std::invalid_argument& e) {
      throw fairkm::InputError(e.what());
    }
    spec.restarts = run.restarts;
    spec.iterations = run.iters;
    spec.seed = run.seed;
    spec.preprocess = run.preprocess;
    spec.threads = run.threads;
    spec.timing = run.timing;

    const fairkm::RunOutputs out = fairkm::run_experiment(spec);
    write_file(run.out_report, out.report_json);
    write_file(run.out_plotdata, out.group_cost_csv);
    write_file(run.out_ratio.empty() ? default_ratio_path(run.out_plotdata) : run.out_ratio,
               out.ratio_csv);
    return 0;
  } catch (const fairkm::InputError& e) {
    return report_error("input_error", e.what(), kExitInput);
  } catch (const fairkm::EncodingError& e) {
    return report_error("encoding_error", e.what(), kExitInput);
  } catch (const fairkm::UnsupportedModeError& e) {
    return report_error("unsupported", e.what(), kExitInput);
  } catch (const std::exception& e) {
    return report_error("internal_error", e.what(), kExitInternal);
  }
}
