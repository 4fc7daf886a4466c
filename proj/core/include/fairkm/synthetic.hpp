#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fairkm/types.hpp"

namespace fairkm {

/// One demographic group of a Gaussian-mixture instance. Every point of the
/// group picks a blob uniformly at random and is drawn around
/// blob_center + offset with per-axis standard deviation `stddev`.
struct SyntheticGroup {
  std::string label;
  std::size_t size = 0;
  Vector offset;  // d
  Vector stddev;  // d, all > 0
};

struct SyntheticParams {
  RowMatrix blob_centers;  // blobs x d
  std::vector<SyntheticGroup> groups;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  Dataset dataset;
  std::vector<int> blob_of;  // ground-truth blob per point
  SyntheticParams params;
};

/// Deterministic per seed. Points are emitted group by group.
SyntheticData generate_synthetic(const SyntheticParams& params);

/// Two elongated blobs with a 70/30 group split; the minority group sits
/// off-axis with a tighter spread, so unconstrained k-means serves it worse.
SyntheticParams skewed_two_group_params(std::size_t n, std::uint64_t seed);
/// Both groups drawn from the same mixture with equal sizes.
SyntheticParams symmetric_two_group_params(std::size_t n, std::uint64_t seed);
/// Three groups with different offsets and spreads over three blobs.
SyntheticParams three_group_params(std::size_t n, std::uint64_t seed);
/// Looks up a preset by name: "skewed", "symmetric" or "three-group".
SyntheticParams preset_params(std::string_view name, std::size_t n, std::uint64_t seed);

/// JSON sidecar: seed, blob centers, per-group parameters and counts, and the
/// column means of the generated points.
std::string synthetic_metadata_json(const SyntheticData& data);

/// Writes `csv_path` (x0.., group) and `csv_path` + ".meta.json".
void write_synthetic(const SyntheticData& data, const std::filesystem::path& csv_path);

}  // namespace fairkm
