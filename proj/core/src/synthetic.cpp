#include "fairkm/synthetic.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "fairkm/csv.hpp"
#include "fairkm/errors.hpp"
#include "fairkm/summation.hpp"

namespace fairkm {

namespace {

using Index = Eigen::Index;
using nlohmann::json;

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

void SyntheticParams::validate() const {
  if (blob_centers.rows() < 1 || blob_centers.cols() < 1) {
    throw std::invalid_argument("synthetic: need at least one blob and one dimension");
  }
  if (groups.empty()) throw std::invalid_argument("synthetic: need at least one group");
  for (const auto& g : groups) {
    if (g.size == 0) throw std::invalid_argument("synthetic: group '" + g.label + "' is empty");
    if (g.offset.size() != blob_centers.cols() || g.stddev.size() != blob_centers.cols()) {
      throw std::invalid_argument("synthetic: group '" + g.label + "' has wrong dimension");
    }
    if (!((g.stddev.array() > 0.0).all())) {
      throw std::invalid_argument("synthetic: stddev must be positive");
    }
  }
}

SyntheticData generate_synthetic(const SyntheticParams& params) {
  params.validate();
  const Index d = params.blob_centers.cols();
  std::size_t n = 0;
  for (const auto& g : params.groups) n += g.size;

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<Index> pick_blob(0, params.blob_centers.rows() - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  RowMatrix points(static_cast<Index>(n), d);
  std::vector<int> group_of;
  std::vector<int> blob_of;
  std::vector<std::string> labels;
  Index row = 0;
  for (std::size_t j = 0; j < params.groups.size(); ++j) {
    const auto& g = params.groups[j];
    labels.push_back(g.label);
    for (std::size_t p = 0; p < g.size; ++p, ++row) {
      const Index b = pick_blob(rng);
      for (Index s = 0; s < d; ++s) {
        points(row, s) = params.blob_centers(b, s) + g.offset[s] + g.stddev[s] * normal(rng);
      }
      group_of.push_back(static_cast<int>(j));
      blob_of.push_back(static_cast<int>(b));
    }
  }
  return SyntheticData{Dataset(std::move(points), std::move(group_of), std::move(labels)),
                       std::move(blob_of), params};
}

SyntheticParams skewed_two_group_params(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("skewed preset needs n >= 2");
  SyntheticParams params;
  params.blob_centers = RowMatrix(2, 2);
  params.blob_centers << 0.0, 0.0, 6.0, 0.0;
  const std::size_t minority = std::max<std::size_t>(1, (3 * n) / 10);
  params.groups.push_back({"A", n - minority, vec2(0.0, 0.0), vec2(1.0, 2.5)});
  params.groups.push_back({"B", minority, vec2(1.5, 1.5), vec2(0.6, 0.6)});
  params.seed = seed;
  return params;
}

SyntheticParams symmetric_two_group_params(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("symmetric preset needs n >= 2");
  SyntheticParams params;
  params.blob_centers = RowMatrix(2, 2);
  params.blob_centers << 0.0, 0.0, 6.0, 0.0;
  params.groups.push_back({"A", n / 2, vec2(0.0, 0.0), vec2(1.0, 1.0)});
  params.groups.push_back({"B", n - n / 2, vec2(0.0, 0.0), vec2(1.0, 1.0)});
  params.seed = seed;
  return params;
}

SyntheticParams three_group_params(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("three-group preset needs n >= 3");
  SyntheticParams params;
  params.blob_centers = RowMatrix(3, 2);
  params.blob_centers << 0.0, 0.0, 6.0, 0.0, 3.0, 5.0;
  const std::size_t a = n / 2;
  const std::size_t b = (3 * n) / 10;
  params.groups.push_back({"A", a, vec2(0.0, 0.0), vec2(1.0, 1.0)});
  params.groups.push_back({"B", b, vec2(1.0, 0.5), vec2(0.5, 1.5)});
  params.groups.push_back({"C", n - a - b, vec2(-0.8, 1.0), vec2(1.5, 0.5)});
  params.seed = seed;
  return params;
}

SyntheticParams preset_params(std::string_view name, std::size_t n, std::uint64_t seed) {
  if (name == "skewed") return skewed_two_group_params(n, seed);
  if (name == "symmetric") return symmetric_two_group_params(n, seed);
  if (name == "three-group") return three_group_params(n, seed);
  throw InputError("unknown synthetic preset '" + std::string(name) +
                   "' (expected skewed, symmetric or three-group)");
}

std::string synthetic_metadata_json(const SyntheticData& data) {
  const Dataset& ds = data.dataset;
  json doc;
  doc["seed"] = data.params.seed;
  doc["n"] = ds.n();
  doc["d"] = ds.d();
  json blobs = json::array();
  for (Index b = 0; b < data.params.blob_centers.rows(); ++b) {
    blobs.push_back(to_json(data.params.blob_centers.row(b).transpose()));
  }
  doc["blob_centers"] = std::move(blobs);
  json groups = json::array();
  for (std::size_t j = 0; j < data.params.groups.size(); ++j) {
    const auto& g = data.params.groups[j];
    groups.push_back({{"label", g.label},
                      {"count", ds.group_sizes()[j]},
                      {"offset", to_json(g.offset)},
                      {"stddev", to_json(g.stddev)}});
  }
  doc["groups"] = std::move(groups);
  std::vector<double> means;
  for (std::size_t c = 0; c < ds.d(); ++c) {
    CompensatedSum s;
    for (std::size_t p = 0; p < ds.n(); ++p) s.add(ds.point(p)[static_cast<Index>(c)]);
    means.push_back(s.value() / static_cast<double>(ds.n()));
  }
  doc["column_means"] = means;
  return doc.dump(2) + "\n";
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& csv_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + csv_path.string() + "'");
    write_dataset_csv(out, data.dataset);
  }
  std::filesystem::path meta = csv_path;
  meta += ".meta.json";
  std::ofstream out(meta, std::ios::binary);
  if (!out) throw InputError("cannot write '" + meta.string() + "'");
  out << synthetic_metadata_json(data);
}

}  // namespace fairkm
