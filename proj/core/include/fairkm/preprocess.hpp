#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairkm/types.hpp"

namespace fairkm {

/// Indicator encoding of categorical columns. Labels of each column are
/// sorted, so the label -> output column map does not depend on row order.
class OneHotEncoder {
 public:
  struct Column {
    std::string name;
    std::vector<std::string> labels;  // sorted, unique
  };

  OneHotEncoder() = default;
  explicit OneHotEncoder(std::vector<Column> columns);

  /// `values[c]` holds every observed label of column `names[c]`.
  static OneHotEncoder fit(const std::vector<std::string>& names,
                           const std::vector<std::vector<std::string>>& values);

  const std::vector<Column>& columns() const noexcept { return columns_; }
  std::size_t width() const noexcept { return width_; }
  /// "<column>=<label>" for every output column.
  std::vector<std::string> output_names() const;

  /// One row of labels (one per encoded column) into `out` (size width()).
  /// Throws EncodingError on a label that was not seen by fit().
  void encode_row(std::span<const std::string> labels, std::span<double> out) const;
  /// Rows x columns of labels into a rows x width() indicator matrix.
  RowMatrix encode(const std::vector<std::vector<std::string>>& rows) const;
  /// Inverse of encode_row. Throws EncodingError unless each block holds a single 1.
  std::vector<std::string> decode_row(std::span<const double> indicators) const;

 private:
  std::vector<Column> columns_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
};

struct ZScoreStep {
  Vector mean;
  Vector stddev;  // population standard deviation, floored (see kStddevFloor)
};

struct PcaStep {
  Vector mean;
  Eigen::MatrixXd basis;  // d x r, orthonormal columns, leading eigenvectors first
  Vector eigenvalues;     // all d covariance eigenvalues, descending
};

using PreprocessStep = std::variant<ZScoreStep, PcaStep>;

/// Fitted, replayable preprocessing: an optional categorical encoder applied
/// at ingest, then numeric steps in order.
struct PreprocessPlan {
  std::optional<OneHotEncoder> encoder;
  std::vector<PreprocessStep> steps;

  /// Applies the numeric steps. Feature names follow the transform ("pc1"...).
  Dataset apply(const Dataset& dataset) const;

  /// Versioned JSON document ({"version": 1, ...}); doubles round-trip exactly.
  std::string to_json() const;
  static PreprocessPlan from_json(std::string_view text);
};

inline constexpr double kStddevFloor = 1e-12;

/// Per-feature mean and population standard deviation. Needs n >= 2.
PreprocessPlan fit_zscore(const Dataset& dataset);

/// Top-r principal directions of the sample covariance (n - 1 denominator).
/// The largest-magnitude entry of each direction is made positive.
/// Throws std::invalid_argument unless 1 <= r <= min(n, d).
PreprocessPlan fit_pca(const Dataset& dataset, std::size_t r);

/// Parsed form of a pipeline string such as "zscore,pca:k" or "pca:3".
struct PipelineSpec {
  struct Step {
    enum class Kind { zscore, pca } kind = Kind::zscore;
    /// Target dimension for pca; nullopt means "track the cluster count".
    std::optional<std::size_t> dim;
  };
  std::vector<Step> steps;

  /// "" or "none" give an empty pipeline. "fair-pca" is recognised and
  /// rejected with UnsupportedModeError; other unknown names raise InputError.
  static PipelineSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Fits the steps in order, each on the output of the previous one.
/// A "pca:k" step uses min(k, current dimension) components.
PreprocessPlan fit_pipeline(const Dataset& dataset, const PipelineSpec& spec, std::size_t k);

}  // namespace fairkm
