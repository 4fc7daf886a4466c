#include "fairkm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fairkm/errors.hpp"
#include "fairkm/summation.hpp"

namespace fairkm {

namespace {

using Index = Eigen::Index;
using nlohmann::json;

constexpr int kPlanVersion = 1;

Index ix(std::size_t v) { return static_cast<Index>(v); }

Vector column_means(const RowMatrix& x) {
  Vector mean(x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    CompensatedSum s;
    for (Index r = 0; r < x.rows(); ++r) s.add(x(r, c));
    mean[c] = s.value() / static_cast<double>(x.rows());
  }
  return mean;
}

std::vector<std::string> numbered(std::string_view prefix, std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back(std::string(prefix) + std::to_string(i + 1));
  return names;
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), ix(values.size()));
}

}  // namespace

// ---------------------------------------------------------------------------
// One-hot

OneHotEncoder::OneHotEncoder(std::vector<Column> columns) : columns_(std::move(columns)) {
  for (auto& column : columns_) {
    std::sort(column.labels.begin(), column.labels.end());
    column.labels.erase(std::unique(column.labels.begin(), column.labels.end()),
                        column.labels.end());
    if (column.labels.empty()) {
      throw std::invalid_argument("one-hot column '" + column.name + "' has no labels");
    }
    offsets_.push_back(width_);
    width_ += column.labels.size();
  }
}

OneHotEncoder OneHotEncoder::fit(const std::vector<std::string>& names,
                                 const std::vector<std::vector<std::string>>& values) {
  if (names.size() != values.size()) {
    throw std::invalid_argument("OneHotEncoder::fit: names and value columns differ in count");
  }
  std::vector<Column> columns;
  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::set<std::string> unique(values[c].begin(), values[c].end());
    columns.push_back({names[c], std::vector<std::string>(unique.begin(), unique.end())});
  }
  return OneHotEncoder(std::move(columns));
}

std::vector<std::string> OneHotEncoder::output_names() const {
  std::vector<std::string> names;
  for (const auto& column : columns_) {
    for (const auto& label : column.labels) names.push_back(column.name + "=" + label);
  }
  return names;
}

void OneHotEncoder::encode_row(std::span<const std::string> labels, std::span<double> out) const {
  if (labels.size() != columns_.size() || out.size() != width_) {
    throw std::invalid_argument("OneHotEncoder::encode_row: shape mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const auto& known = columns_[c].labels;
    const auto it = std::lower_bound(known.begin(), known.end(), labels[c]);
    if (it == known.end() || *it != labels[c]) {
      throw EncodingError("unseen label '" + labels[c] + "' in categorical column '" +
                          columns_[c].name + "'");
    }
    out[offsets_[c] + static_cast<std::size_t>(it - known.begin())] = 1.0;
  }
}

RowMatrix OneHotEncoder::encode(const std::vector<std::vector<std::string>>& rows) const {
  RowMatrix out(ix(rows.size()), ix(width_));
  std::vector<double> buffer(width_);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    encode_row(rows[r], buffer);
    out.row(ix(r)) = Eigen::Map<const Eigen::RowVectorXd>(buffer.data(), ix(width_));
  }
  return out;
}

std::vector<std::string> OneHotEncoder::decode_row(std::span<const double> indicators) const {
  if (indicators.size() != width_) throw std::invalid_argument("decode_row: width mismatch");
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    std::optional<std::size_t> hot;
    for (std::size_t a = 0; a < columns_[c].labels.size(); ++a) {
      const double v = indicators[offsets_[c] + a];
      if (v == 1.0 && !hot) {
        hot = a;
      } else if (v != 0.0) {
        throw EncodingError("column '" + columns_[c].name + "' is not a one-hot block");
      }
    }
    if (!hot) throw EncodingError("column '" + columns_[c].name + "' has no active indicator");
    labels.push_back(columns_[c].labels[*hot]);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Numeric steps

PreprocessPlan fit_zscore(const Dataset& dataset) {
  if (dataset.n() < 2) throw std::invalid_argument("fit_zscore: need at least two points");
  const RowMatrix& x = dataset.points();
  ZScoreStep step;
  step.mean = column_means(x);
  step.stddev.resize(x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    CompensatedSum s;
    for (Index r = 0; r < x.rows(); ++r) {
      const double dev = x(r, c) - step.mean[c];
      s.add(dev * dev);
    }
    step.stddev[c] = std::max(std::sqrt(s.value() / static_cast<double>(x.rows())), kStddevFloor);
  }
  PreprocessPlan plan;
  plan.steps.emplace_back(std::move(step));
  return plan;
}

PreprocessPlan fit_pca(const Dataset& dataset, std::size_t r) {
  const std::size_t limit = std::min(dataset.n(), dataset.d());
  if (r < 1 || r > limit) {
    throw std::invalid_argument("fit_pca: target dimension " + std::to_string(r) +
                                " outside [1, " + std::to_string(limit) + "]");
  }
  if (dataset.n() < 2) throw std::invalid_argument("fit_pca: need at least two points");
  PcaStep step;
  step.mean = column_means(dataset.points());
  const RowMatrix centered = dataset.points().rowwise() - step.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(dataset.n() - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("fit_pca: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; reverse to descending.
  const Index d = cov.rows();
  step.eigenvalues = eig.eigenvalues().reverse();
  step.basis.resize(d, ix(r));
  for (std::size_t c = 0; c < r; ++c) {
    Vector v = eig.eigenvectors().col(d - 1 - ix(c));
    Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v[pivot] < 0.0) v = -v;
    step.basis.col(ix(c)) = v;
  }
  PreprocessPlan plan;
  plan.steps.emplace_back(std::move(step));
  return plan;
}

Dataset PreprocessPlan::apply(const Dataset& dataset) const {
  RowMatrix x = dataset.points();
  std::vector<std::string> names = dataset.feature_names();
  for (const auto& step : steps) {
    if (const auto* z = std::get_if<ZScoreStep>(&step)) {
      if (z->mean.size() != x.cols()) throw std::invalid_argument("zscore step: dimension mismatch");
      x = ((x.rowwise() - z->mean.transpose()).array().rowwise() / z->stddev.transpose().array())
              .matrix();
    } else {
      const auto& p = std::get<PcaStep>(step);
      if (p.mean.size() != x.cols()) throw std::invalid_argument("pca step: dimension mismatch");
      x = (x.rowwise() - p.mean.transpose()) * p.basis;
      names = numbered("pc", static_cast<std::size_t>(p.basis.cols()));
    }
  }
  return dataset.with_points(std::move(x), std::move(names));
}

std::string PreprocessPlan::to_json() const {
  json doc;
  doc["version"] = kPlanVersion;
  if (encoder) {
    json columns = json::array();
    for (const auto& column : encoder->columns()) {
      columns.push_back({{"name", column.name}, {"labels", column.labels}});
    }
    doc["onehot"] = std::move(columns);
  } else {
    doc["onehot"] = nullptr;
  }
  json list = json::array();
  for (const auto& step : steps) {
    if (const auto* z = std::get_if<ZScoreStep>(&step)) {
      list.push_back({{"type", "zscore"}, {"mean", vector_json(z->mean)},
                      {"stddev", vector_json(z->stddev)}});
    } else {
      const auto& p = std::get<PcaStep>(step);
      json basis = json::array();
      for (Index c = 0; c < p.basis.cols(); ++c) basis.push_back(vector_json(p.basis.col(c)));
      list.push_back({{"type", "pca"}, {"mean", vector_json(p.mean)},
                      {"components", std::move(basis)},
                      {"eigenvalues", vector_json(p.eigenvalues)}});
    }
  }
  doc["steps"] = std::move(list);
  return doc.dump(2);
}

PreprocessPlan PreprocessPlan::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("version").get<int>() != kPlanVersion) {
      throw InputError("unsupported preprocess plan version " + doc.at("version").dump());
    }
    PreprocessPlan plan;
    if (doc.contains("onehot") && !doc["onehot"].is_null()) {
      std::vector<OneHotEncoder::Column> columns;
      for (const auto& c : doc["onehot"]) {
        columns.push_back({c.at("name").get<std::string>(),
                           c.at("labels").get<std::vector<std::string>>()});
      }
      plan.encoder = OneHotEncoder(std::move(columns));
    }
    for (const auto& s : doc.at("steps")) {
      const auto type = s.at("type").get<std::string>();
      if (type == "zscore") {
        plan.steps.emplace_back(ZScoreStep{vector_from(s.at("mean")), vector_from(s.at("stddev"))});
      } else if (type == "pca") {
        PcaStep p;
        p.mean = vector_from(s.at("mean"));
        p.eigenvalues = vector_from(s.at("eigenvalues"));
        const auto& comps = s.at("components");
        p.basis.resize(p.mean.size(), ix(comps.size()));
        for (std::size_t c = 0; c < comps.size(); ++c) {
          const Vector col = vector_from(comps[c]);
          if (col.size() != p.mean.size()) throw InputError("pca component has wrong length");
          p.basis.col(ix(c)) = col;
        }
        plan.steps.emplace_back(std::move(p));
      } else {
        throw InputError("unknown preprocess step type '" + type + "'");
      }
    }
    return plan;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed preprocess plan: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Pipeline strings

PipelineSpec PipelineSpec::parse(std::string_view text) {
  PipelineSpec spec;
  if (text.empty() || text == "none") return spec;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string token(text.substr(start, end - start));
    if (token == "zscore") {
      spec.steps.push_back({Step::Kind::zscore, std::nullopt});
    } else if (token.rfind("pca:", 0) == 0) {
      const std::string arg = token.substr(4);
      if (arg == "k") {
        spec.steps.push_back({Step::Kind::pca, std::nullopt});
      } else {
        std::size_t used = 0;
        unsigned long value = 0;
        try {
          value = std::stoul(arg, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != arg.size() || arg.empty() || value == 0) {
          throw InputError("pca dimension must be a positive integer or 'k', got '" + arg + "'");
        }
        spec.steps.push_back({Step::Kind::pca, static_cast<std::size_t>(value)});
      }
    } else if (token == "fair-pca" || token == "fair_pca" || token.rfind("fair-pca:", 0) == 0) {
      throw UnsupportedModeError("fair-pca preprocessing is not supported by this tool");
    } else {
      throw InputError("unknown preprocess step '" + token + "'");
    }
    start = end + 1;
  }
  return spec;
}

std::string PipelineSpec::to_string() const {
  if (steps.empty()) return "none";
  std::string out;
  for (const auto& step : steps) {
    if (!out.empty()) out += ',';
    if (step.kind == Step::Kind::zscore) {
      out += "zscore";
    } else {
      out += "pca:" + (step.dim ? std::to_string(*step.dim) : std::string("k"));
    }
  }
  return out;
}

PreprocessPlan fit_pipeline(const Dataset& dataset, const PipelineSpec& spec, std::size_t k) {
  PreprocessPlan plan;
  Dataset current = dataset;
  for (const auto& step : spec.steps) {
    PreprocessPlan fitted;
    if (step.kind == PipelineSpec::Step::Kind::zscore) {
      fitted = fit_zscore(current);
    } else {
      const std::size_t r = step.dim ? *step.dim : std::min(k, current.d());
      fitted = fit_pca(current, r);
    }
    current = fitted.apply(current);
    plan.steps.push_back(std::move(fitted.steps.front()));
  }
  return plan;
}

}  // namespace fairkm
