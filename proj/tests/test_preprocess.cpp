#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fairkm/errors.hpp"
#include "fairkm/preprocess.hpp"
#include "support.hpp"

using namespace fairkm;
using namespace fairkm::testing;

namespace {

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix x(static_cast<Index>(n), static_cast<Index>(d));
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 0; c < x.cols(); ++c) x(r, c) = normal(rng) * (1.0 + static_cast<double>(c)) + 3.0 * static_cast<double>(c);
  }
  std::vector<int> g(n, 0);
  g[0] = 1;
  return Dataset(std::move(x), std::move(g));
}

Eigen::MatrixXd sample_covariance(const RowMatrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

// Cyclic Jacobi rotations; eigenvalues sorted descending.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off < 1e-30) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

const PcaStep& pca_of(const PreprocessPlan& plan) { return std::get<PcaStep>(plan.steps.back()); }

}  // namespace

TEST(ZScore, TwoValueFeature) {
  const Dataset ds(rows({{0.0, 5.0}, {2.0, 5.0}}), {0, 0});
  const auto out = fit_zscore(ds).apply(ds);
  EXPECT_EQ(out.points()(0, 0), -1.0);
  EXPECT_EQ(out.points()(1, 0), 1.0);
  EXPECT_EQ(out.points()(0, 1), 0.0);
  EXPECT_EQ(out.points()(1, 1), 0.0);
}

TEST(ZScore, RandomMatrixMoments) {
  std::mt19937_64 rng(1);
  const auto ds = random_dataset(rng, 200, 6);
  const auto out = fit_zscore(ds).apply(ds);
  for (Index c = 0; c < 6; ++c) {
    const auto col = out.points().col(c);
    EXPECT_NEAR(col.mean(), 0.0, 1e-10);
    EXPECT_NEAR((col.array() - col.mean()).square().mean(), 1.0, 1e-8);
  }
  EXPECT_EQ(out.group_labels(), ds.group_labels());
}

TEST(ZScore, RefitOnOutputIsIdentityLike) {
  std::mt19937_64 rng(2);
  const auto ds = random_dataset(rng, 150, 4);
  const auto out = fit_zscore(ds).apply(ds);
  const auto again = std::get<ZScoreStep>(fit_zscore(out).steps[0]);
  EXPECT_LE(again.mean.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((again.stddev.array() - 1.0).abs().maxCoeff(), 1e-8);
}

TEST(ZScore, NeedsTwoPoints) {
  EXPECT_THROW(fit_zscore(Dataset(rows({{1.0}}), {0})), std::invalid_argument);
}

TEST(Pca, FullRankPreservesDistances) {
  std::mt19937_64 rng(3);
  const auto ds = random_dataset(rng, 60, 5);
  const auto out = fit_pca(ds, 5).apply(ds);
  for (std::size_t p = 0; p < 60; p += 7) {
    for (std::size_t q = p + 1; q < 60; q += 5) {
      const double before = (ds.point(p) - ds.point(q)).norm();
      const double after = (out.point(p) - out.point(q)).norm();
      EXPECT_NEAR(before, after, 1e-8 * std::max(1.0, before));
    }
  }
  EXPECT_EQ(out.feature_names().front(), "pc1");
}

TEST(Pca, RankOneDataReconstructsExactly) {
  RowMatrix x(20, 3);
  for (Index r = 0; r < 20; ++r) {
    const double t = static_cast<double>(r) - 7.5;
    x.row(r) << 1 + 2 * t, -1 - t, 0.5 * t;
  }
  const Dataset ds(x, std::vector<int>(20, 0));
  const auto plan = fit_pca(ds, 1);
  const auto& step = pca_of(plan);
  const auto out = plan.apply(ds);
  const RowMatrix rebuilt = (out.points() * step.basis.transpose()).rowwise() + step.mean.transpose();
  EXPECT_LE((rebuilt - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Pca, TopThreeVarianceAndReconstructionMatchEigenvalues) {
  std::mt19937_64 rng(4);
  const auto ds = random_dataset(rng, 100, 10);
  const auto oracle = jacobi_eigenvalues(sample_covariance(ds.points()));
  const auto plan = fit_pca(ds, 3);
  const auto& step = pca_of(plan);
  const auto out = plan.apply(ds);

  double top = 0.0, rest = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i) (i < 3 ? top : rest) += oracle[i];
  const double projected = sample_covariance(out.points()).trace();
  EXPECT_NEAR(projected, top, 1e-8 * top);

  const RowMatrix rebuilt = (out.points() * step.basis.transpose()).rowwise() + step.mean.transpose();
  const double residual = (ds.points() - rebuilt).squaredNorm() / 99.0;
  EXPECT_NEAR(residual, rest, 1e-6 * rest);

  for (std::size_t i = 0; i < oracle.size(); ++i) {
    EXPECT_NEAR(step.eigenvalues[static_cast<Index>(i)], oracle[i], 1e-9 * oracle[0]);
  }
}

TEST(Pca, BasisIsOrthonormalWithSignConvention) {
  std::mt19937_64 rng(5);
  const auto ds = random_dataset(rng, 80, 7);
  const auto plan = fit_pca(ds, 4);
  const auto& b = pca_of(plan).basis;
  const Eigen::MatrixXd gram = b.transpose() * b;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
  for (Index c = 0; c < b.cols(); ++c) {
    Index at = 0;
    b.col(c).cwiseAbs().maxCoeff(&at);
    EXPECT_GT(b(at, c), 0.0);
  }
}

TEST(Pca, RejectsOutOfRangeDimension) {
  std::mt19937_64 rng(6);
  const auto ds = random_dataset(rng, 5, 3);
  EXPECT_THROW(fit_pca(ds, 0), std::invalid_argument);
  EXPECT_THROW(fit_pca(ds, 4), std::invalid_argument);
  const auto wide = random_dataset(rng, 3, 6);
  EXPECT_THROW(fit_pca(wide, 4), std::invalid_argument);
}

TEST(OneHot, BinaryAndTernaryColumns) {
  const auto enc = OneHotEncoder::fit({"sex", "color"}, {{"m", "f", "m"}, {"red", "blue", "green"}});
  EXPECT_EQ(enc.width(), 5u);
  EXPECT_EQ(enc.output_names(),
            (std::vector<std::string>{"sex=f", "sex=m", "color=blue", "color=green", "color=red"}));
  const RowMatrix m = enc.encode({{"m", "red"}, {"f", "blue"}, {"m", "green"}});
  for (Index r = 0; r < 3; ++r) {
    EXPECT_EQ(m.row(r).head(2).sum(), 1.0);
    EXPECT_EQ(m.row(r).tail(3).sum(), 1.0);
  }
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(0, 4), 1.0);
}

TEST(OneHot, UnseenLabelRaisesEncodingError) {
  const auto enc = OneHotEncoder::fit({"c"}, {{"x", "y"}});
  EXPECT_THROW(enc.encode({{"z"}}), EncodingError);
}

TEST(OneHot, DecodeRoundTrip) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> a = {"q", "b", "zz", "a"}, b = {"1", "0"};
  const auto enc = OneHotEncoder::fit({"a", "b"}, {a, b});
  std::uniform_int_distribution<std::size_t> pick_a(0, 3), pick_b(0, 1);
  for (int t = 0; t < 50; ++t) {
    const std::vector<std::string> labels = {a[pick_a(rng)], b[pick_b(rng)]};
    std::vector<double> row(enc.width());
    enc.encode_row(labels, row);
    EXPECT_EQ(enc.decode_row(row), labels);
  }
  std::vector<double> bad(enc.width(), 0.0);
  EXPECT_THROW(enc.decode_row(bad), EncodingError);
}

TEST(Plan, JsonRoundTripIsExact) {
  std::mt19937_64 rng(8);
  const auto ds = random_dataset(rng, 50, 4);
  PreprocessPlan plan = fit_pipeline(ds, PipelineSpec::parse("zscore,pca:3"), 2);
  plan.encoder = OneHotEncoder::fit({"c"}, {{"u", "v"}});
  const auto back = PreprocessPlan::from_json(plan.to_json());
  EXPECT_EQ(back.to_json(), plan.to_json());
  EXPECT_EQ(back.apply(ds).points(), plan.apply(ds).points());
  ASSERT_TRUE(back.encoder.has_value());
  EXPECT_EQ(back.encoder->output_names(), plan.encoder->output_names());
}

TEST(Plan, MalformedJsonIsInputError) {
  EXPECT_THROW(PreprocessPlan::from_json("{"), InputError);
  EXPECT_THROW(PreprocessPlan::from_json(R"({"version": 99, "steps": []})"), InputError);
  EXPECT_THROW(PreprocessPlan::from_json(R"({"version": 1, "steps": [{"type": "warp"}]})"), InputError);
}

TEST(Pipeline, ParseForms) {
  EXPECT_TRUE(PipelineSpec::parse("").steps.empty());
  EXPECT_TRUE(PipelineSpec::parse("none").steps.empty());
  const auto s = PipelineSpec::parse("zscore,pca:k");
  ASSERT_EQ(s.steps.size(), 2u);
  EXPECT_FALSE(s.steps[1].dim.has_value());
  EXPECT_EQ(s.to_string(), "zscore,pca:k");
  EXPECT_EQ(PipelineSpec::parse("pca:3").steps[0].dim, std::optional<std::size_t>(3));
  EXPECT_THROW(PipelineSpec::parse("fair-pca"), UnsupportedModeError);
  EXPECT_THROW(PipelineSpec::parse("whiten"), InputError);
  EXPECT_THROW(PipelineSpec::parse("pca:0"), InputError);
}

TEST(Pipeline, PcaTracksClusterCountClampedToDimension) {
  std::mt19937_64 rng(9);
  const auto ds = random_dataset(rng, 40, 4);
  const auto spec = PipelineSpec::parse("zscore,pca:k");
  EXPECT_EQ(fit_pipeline(ds, spec, 3).apply(ds).d(), 3u);
  EXPECT_EQ(fit_pipeline(ds, spec, 9).apply(ds).d(), 4u);
}
