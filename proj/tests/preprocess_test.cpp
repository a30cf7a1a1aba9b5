#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "acrnn/errors.hpp"
#include "acrnn/preprocess.hpp"
#include "support.hpp"

using namespace acrnn;
using acrnn::testing::random_matrix;

namespace {

SeriesFrame frame_of(Matrix data) {
  SeriesFrame f;
  for (std::size_t c = 0; c < data.cols(); ++c) f.names.push_back("x" + std::to_string(c));
  f.data = std::move(data);
  return f;
}

}  // namespace

TEST(Normalizer, PopulationStatistics) {
  const auto stats = fit_normalizer(frame_of(Matrix{{1}, {2}, {3}}));
  EXPECT_DOUBLE_EQ(stats[0].mean, 2.0);
  EXPECT_NEAR(stats[0].std, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_FALSE(stats[0].constant);
}

TEST(Normalizer, ConstantColumnIsFlagged) {
  const auto stats = fit_normalizer(frame_of(Matrix{{5}, {5}, {5}}));
  EXPECT_EQ(stats[0].mean, 5.0);
  EXPECT_TRUE(stats[0].constant);
  EXPECT_EQ(stats[0].std, 1.0);
  const SeriesFrame z = apply_normalizer(frame_of(Matrix{{5}, {5}, {5}}), stats);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(z.data(r, 0), 0.0);
}

TEST(Normalizer, Examples) {
  const SeriesFrame f = frame_of(Matrix{{1}, {2}, {3}});
  const SeriesFrame z = apply_normalizer(f, fit_normalizer(f));
  EXPECT_NEAR(z.data(0, 0), -1.2247, 1e-4);
  EXPECT_NEAR(z.data(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(z.data(2, 0), 1.2247, 1e-4);

  const auto again = fit_normalizer(z);
  EXPECT_NEAR(again[0].mean, 0.0, 1e-12);
  EXPECT_NEAR(again[0].std, 1.0, 1e-12);
  const SeriesFrame unchanged = apply_normalizer(z, again);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(unchanged.data(r, 0), z.data(r, 0), 1e-12);
}

TEST(Normalizer, Errors) {
  EXPECT_THROW(fit_normalizer(frame_of(Matrix(0, 1))), ContractError);
  const SeriesFrame f = frame_of(Matrix{{1, 2}, {3, 4}});
  EXPECT_THROW(apply_normalizer(f, fit_normalizer(frame_of(Matrix{{1}, {2}}))), ContractError);
}

TEST(Normalizer, RoundTripAndMomentsOnRandomFrames) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 2 + rng() % 60, cols = 1 + rng() % 5;
    const Matrix data = random_matrix(rng, rows, cols, -50.0, 50.0);
    const SeriesFrame f = frame_of(data);
    const auto stats = fit_normalizer(f);
    const SeriesFrame z = apply_normalizer(f, stats);
    const SeriesFrame back = invert_normalizer(z, stats);
    for (std::size_t i = 0; i < data.size(); ++i) EXPECT_NEAR(back.data.data()[i], data.data()[i], 1e-12);

    const auto moments = fit_normalizer(z);
    for (const NormStats& s : moments) {
      EXPECT_LT(std::abs(s.mean), 1e-10);
      EXPECT_LT(std::abs(s.std - 1.0), 1e-10);
    }
  }
}

TEST(GaussianKernel, MatchesNormalizedExponentials) {
  const auto k = gaussian_kernel(5, 2.0);
  std::vector<double> oracle;
  double total = 0.0;
  for (int i = -2; i <= 2; ++i) {
    oracle.push_back(std::exp(-i * i / 8.0));
    total += oracle.back();
  }
  ASSERT_EQ(k.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(k[i], oracle[i] / total, 1e-15);
  const std::vector<double> printed = {0.1525, 0.2218, 0.2514, 0.2218, 0.1525};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(k[i], printed[i], 5e-5);
  EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-12);
}

TEST(GaussianSmooth, Examples) {
  const SeriesFrame constant = frame_of(Matrix(20, 2, 3.5));
  const SeriesFrame sc = gaussian_smooth(constant);
  for (double x : sc.data.storage()) EXPECT_NEAR(x, 3.5, 1e-12);

  Matrix impulse(21, 1, 0.0);
  impulse(10, 0) = 1.0;
  const SeriesFrame si = gaussian_smooth(frame_of(impulse));
  const auto k = gaussian_kernel(5, 2.0);
  for (int d = -2; d <= 2; ++d) EXPECT_NEAR(si.data(10 + d, 0), k[d + 2], 1e-15);

  Matrix ramp(30, 1);
  for (std::size_t t = 0; t < 30; ++t) ramp(t, 0) = 0.7 * t - 3.0;
  const SeriesFrame sr = gaussian_smooth(frame_of(ramp));
  for (std::size_t t = 2; t + 2 < 30; ++t) EXPECT_NEAR(sr.data(t, 0), ramp(t, 0), 1e-12);
}

TEST(GaussianSmooth, ReflectPaddingRepeatsEdgeSample) {
  const Matrix x{{1}, {2}, {4}, {8}, {16}, {32}};
  const auto k = gaussian_kernel(5, 2.0);
  // Padded on the left as [2, 1 | 1, 2, 4, ...].
  const double first = k[0] * 2 + k[1] * 1 + k[2] * 1 + k[3] * 2 + k[4] * 4;
  EXPECT_NEAR(gaussian_smooth(frame_of(x)).data(0, 0), first, 1e-15);
}

TEST(GaussianSmooth, CommutesWithConstantShift) {
  std::mt19937_64 rng(22);
  const Matrix x = random_matrix(rng, 40, 3);
  std::vector<double> moved = x.storage();
  for (double& v : moved) v += 7.25;
  const Matrix shifted(x.rows(), x.cols(), moved);
  const SeriesFrame a = gaussian_smooth(frame_of(x));
  const SeriesFrame b = gaussian_smooth(frame_of(shifted));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(b.data.data()[i], a.data.data()[i] + 7.25, 1e-12);
}

TEST(GaussianSmooth, Errors) {
  EXPECT_THROW(gaussian_smooth(frame_of(Matrix(10, 1)), 4, 2.0), ContractError);
  EXPECT_THROW(gaussian_smooth(frame_of(Matrix(10, 1)), 5, 0.0), ContractError);
}

TEST(Downsample, Examples) {
  const Matrix x{{1}, {2}, {3}, {4}};
  EXPECT_EQ(downsample_avg(x, 2), (Matrix{{1.5}, {3.5}}));
  EXPECT_EQ(downsample_avg(x, 4), (Matrix{{2.5}}));
  const Matrix two{{1, 10}, {2, 20}, {3, 30}, {4, 40}};
  EXPECT_EQ(downsample_avg(two, 2), (Matrix{{1.5, 15}, {3.5, 35}}));
  EXPECT_THROW(downsample_avg(Matrix(6, 1), 4), ContractError);
}

TEST(Downsample, PreservesGlobalMean) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_matrix(rng, 4 * (1 + rng() % 16), 2);
    for (std::size_t factor : {2u, 4u}) {
      const Matrix d = downsample_avg(x, factor);
      for (std::size_t c = 0; c < 2; ++c) {
        const auto a = x.col(c), b = d.col(c);
        EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0) / a.size(),
                    std::accumulate(b.begin(), b.end(), 0.0) / b.size(), 1e-14);
      }
    }
  }
}

TEST(BuildWindows, Examples) {
  Matrix series(10, 1);
  for (std::size_t t = 0; t < 10; ++t) series(t, 0) = static_cast<double>(t);
  const auto w = build_windows(series, 8, 1, 1);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[1].offset, 1u);
  EXPECT_EQ(w[1].input(0, 0), 1.0);
  EXPECT_EQ(w[1].target(0, 0), 9.0);

  EXPECT_THROW(build_windows(series, 6, 1, 1), ContractError);
  EXPECT_EQ(build_windows(series, 8, 2, 1).size(), 1u);
  EXPECT_THROW(build_windows(series, 8, 3, 1), EmptyResultError);
}

TEST(BuildWindows, ContiguousAndStrided) {
  std::mt19937_64 rng(24);
  const Matrix series = random_matrix(rng, 50, 2);
  const auto w = build_windows(series, 12, 3, 4);
  EXPECT_EQ(w.size(), (50 - 15) / 4 + 1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i].offset, 4 * i);
    EXPECT_EQ(w[i].input, series.slice_rows(w[i].offset, 12));
    EXPECT_EQ(w[i].target, series.slice_rows(w[i].offset + 12, 3));
  }
}

TEST(BlockedKfold, Examples) {
  const auto even = blocked_kfold(10, 5);
  ASSERT_EQ(even.size(), 5u);
  for (const Fold& f : even) EXPECT_EQ(f.test.size(), 2u);

  const auto odd = blocked_kfold(11, 5);
  std::vector<std::size_t> sizes;
  for (const Fold& f : odd) sizes.push_back(f.test.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 2, 2, 2, 2}));

  EXPECT_THROW(blocked_kfold(4, 5), ContractError);
  EXPECT_THROW(blocked_kfold(10, 1), ContractError);
}

TEST(BlockedKfold, PartitionProperty) {
  for (std::size_t n = 2; n < 80; ++n) {
    for (std::size_t k = 2; k <= std::min<std::size_t>(n, 9); ++k) {
      const auto folds = blocked_kfold(n, k);
      ASSERT_EQ(folds.size(), k);
      std::vector<int> seen(n, 0);
      std::size_t lo = n, hi = 0;
      for (const Fold& f : folds) {
        lo = std::min(lo, f.test.size());
        hi = std::max(hi, f.test.size());
        for (std::size_t i = 1; i < f.test.size(); ++i) EXPECT_EQ(f.test[i], f.test[i - 1] + 1);
        for (std::size_t i : f.test) ++seen[i];
        std::set<std::size_t> train(f.train.begin(), f.train.end());
        EXPECT_EQ(train.size() + f.test.size(), n);
        for (std::size_t i : f.test) EXPECT_FALSE(train.contains(i));
      }
      EXPECT_LE(hi - lo, 1u);
      for (int c : seen) EXPECT_EQ(c, 1);
    }
  }
}
