#include <gtest/gtest.h>

#include <cmath>

#include "masf/metrics.hpp"
#include "test_util.hpp"

namespace masf {
namespace {

using testing::random_field;

StepRecord record_of(const Field& raw, const Field& refined, int t = 1) {
  return StepRecord{t, t - 1, raw, raw, refined};
}

TEST(TvIncrements, ConstantSeriesIsZero) {
  std::mt19937_64 rng(80);
  const Field x = random_field({4, 4, 1}, rng);
  const std::vector<StepRecord> recs(6, record_of(x, x));
  for (double d : tv_increments(recs, false)) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(trajectory_tv(recs, true), 0.0);
}

TEST(TvIncrements, HandComputed) {
  const Shape s{1, 2, 1};
  const std::vector<StepRecord> recs = {
      record_of(Field(s, std::vector<double>{0, 0}), Field(s, 0.0)),
      record_of(Field(s, std::vector<double>{3, 4}), Field(s, 1.0)),
      record_of(Field(s, std::vector<double>{3, 5}), Field(s, 1.0)),
  };
  const auto raw = tv_increments(recs, false);
  ASSERT_EQ(raw.size(), 3u);
  EXPECT_EQ(raw[0], 0.0);
  EXPECT_DOUBLE_EQ(raw[1], 5.0);
  EXPECT_DOUBLE_EQ(raw[2], 1.0);
  EXPECT_DOUBLE_EQ(trajectory_tv(recs, false), 6.0);
  EXPECT_DOUBLE_EQ(trajectory_tv(recs, true), std::sqrt(2.0));
  EXPECT_THROW(trajectory_tv(std::span(recs).first(1), false), ParameterError);
}

TEST(SubbandNorms, CheckerboardIsPureDiagonalDetail) {
  const Shape s{4, 4, 1};
  std::vector<double> v(16);
  for (std::size_t h = 0; h < 4; ++h)
    for (std::size_t w = 0; w < 4; ++w) v[h * 4 + w] = (h + w) % 2 ? -1.0 : 1.0;
  const Field x(s, v);
  const std::vector<StepRecord> recs = {record_of(x, x)};
  const auto n = subband_norms(recs);
  EXPECT_NEAR(n[0][0], 0.0, 1e-15);
  EXPECT_NEAR(n[1][0], 0.0, 1e-15);
  EXPECT_NEAR(n[2][0], 0.0, 1e-15);
  EXPECT_NEAR(n[3][0], 4.0, 1e-14);  // 4 blocks, each hh = 2
}

TEST(SubbandNorms, ParsevalPerStep) {
  std::mt19937_64 rng(81);
  std::vector<StepRecord> recs;
  for (int i = 0; i < 5; ++i) {
    const Field x = random_field({6, 8, 3}, rng, -3, 3);
    recs.push_back(record_of(x, x));
  }
  const auto n = subband_norms(recs);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    double e = 0.0;
    for (std::size_t f = 0; f < 4; ++f) e += n[f][k] * n[f][k];
    EXPECT_NEAR(e, sum_squares(recs[k].x0_est), 1e-10);
  }
}

TEST(CellTrace, PicksCell) {
  const Shape s{2, 2, 1};
  std::vector<StepRecord> recs;
  for (int i = 0; i < 3; ++i) {
    const Field x(s, std::vector<double>{0, double(i), 0, 0});
    recs.push_back(record_of(x, Field(s, 0.0)));
  }
  EXPECT_EQ(cell_trace(recs, 1, false), (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(cell_trace(recs, 1, true), (std::vector<double>{0, 0, 0}));
  EXPECT_THROW(cell_trace(recs, 4, false), DimensionError);
  const std::size_t cells[] = {1};
  const TrajectoryStats st = trajectory_stats(recs, cells);
  EXPECT_DOUBLE_EQ(st.tv_raw, 2.0);
  EXPECT_EQ(st.tv_refined, 0.0);
  ASSERT_EQ(st.cell_traces.size(), 1u);
}

TEST(GaussianW2, HandComputed) {
  const Shape s{1, 1, 1};
  // mean 1, population std 1
  const std::vector<Field> xs = {Field(s, 0.0), Field(s, 2.0)};
  EXPECT_DOUBLE_EQ(gaussian_w2(xs, Field(s, 1.0), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(gaussian_w2(xs, Field(s, 0.0), 4.0), 1.0 + 1.0);
  EXPECT_THROW(gaussian_w2(std::span(xs).first(1), Field(s, 0.0), 1.0), ParameterError);
  EXPECT_THROW(gaussian_w2(xs, Field(Shape{1, 2, 1}, 0.0), 1.0), DimensionError);
}

TEST(GaussianW2, MonteCarloOfTargetIsSmall) {
  std::mt19937_64 rng(82);
  std::normal_distribution<double> n(0.5, 2.0);
  const Shape s{2, 2, 1};
  std::vector<Field> xs;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> v(4);
    for (double& x : v) x = n(rng);
    xs.emplace_back(s, std::move(v));
  }
  EXPECT_LE(gaussian_w2(xs, Field(s, 0.5), 4.0), 0.01);
}

}  // namespace
}  // namespace masf
