#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "acrnn/errors.hpp"
#include "acrnn/metrics.hpp"
#include "support.hpp"

using namespace acrnn;
using acrnn::testing::random_matrix;
using acrnn::testing::uniform_values;

namespace {

using Seq = std::vector<double>;

// Textbook (n+1) x (m+1) table with infinite borders.
double dtw_table(const Seq& a, const Seq& b) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(a.size() + 1, std::vector<double>(b.size() + 1, inf));
  d[0][0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::abs(a[i - 1] - b[j - 1]) + std::min({d[i - 1][j], d[i][j - 1], d[i - 1][j - 1]});
  return d[a.size()][b.size()];
}

double path_cost(const WarpPath& p, const Seq& a, const Seq& b) {
  double total = 0.0;
  for (auto [i, j] : p.cells) total += std::abs(a[i] - b[j]);
  return total;
}

std::vector<Seq> all_sequences(const Seq& alphabet, std::size_t max_len) {
  std::vector<Seq> out;
  std::vector<Seq> frontier = {{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Seq> next;
    for (const Seq& s : frontier)
      for (double x : alphabet) {
        Seq t = s;
        t.push_back(x);
        next.push_back(t);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

Seq random_walk(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> step(0.0, 1.0);
  Seq s(n);
  double x = 0.0;
  for (double& v : s) v = x += step(rng);
  return s;
}

}  // namespace

TEST(PointMetrics, Examples) {
  const Matrix a{{1, 2}};
  EXPECT_EQ(mse_metric(a, a), 0.0);
  EXPECT_EQ(mae_metric(a, a), 0.0);
  EXPECT_EQ(mae_metric(Matrix{{1, -1}}, Matrix{{0, 0}}), 1.0);
  EXPECT_EQ(mse_metric(Matrix{{1, -1}}, Matrix{{0, 0}}), 1.0);
  EXPECT_THROW(mae_metric(a, Matrix{{1}}), ContractError);
  EXPECT_THROW(mse_metric(a, Matrix{{1}, {2}}), ContractError);
}

TEST(PointMetrics, MaeBoundedByRootMse) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 1 + rng() % 8, c = 1 + rng() % 4;
    const Matrix a = random_matrix(rng, r, c, -5, 5), b = random_matrix(rng, r, c, -5, 5);
    EXPECT_LE(mae_metric(a, b), std::sqrt(mse_metric(a, b)) + 1e-12);
  }
}

TEST(DtwExact, Examples) {
  const Seq a = {1, 2, 3};
  EXPECT_EQ(dtw_exact(a, a), 0.0);
  EXPECT_EQ(dtw_exact(Seq{1, 2, 3}, Seq{2, 3, 4}), 2.0);
  EXPECT_EQ(dtw_exact(Seq{5}, Seq{1, 2}), 7.0);
  EXPECT_THROW(dtw_exact(Seq{}, a), ContractError);
}

TEST(DtwExact, SymmetryAndNonNegativity) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const Seq a = uniform_values(rng, 1 + rng() % 30), b = uniform_values(rng, 1 + rng() % 30);
    EXPECT_EQ(dtw_exact(a, b), dtw_exact(b, a));
    EXPECT_GE(dtw_exact(a, b), 0.0);
    EXPECT_EQ(dtw_exact(a, a), 0.0);
    EXPECT_NEAR(dtw_exact(a, b), dtw_table(a, b), 1e-12);
  }
}

TEST(DtwExact, PathIsValidAndCostsTheDistance) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const Seq a = uniform_values(rng, 1 + rng() % 20), b = uniform_values(rng, 1 + rng() % 20);
    const DtwResult r = dtw_exact_path(a, b);
    EXPECT_TRUE(r.path.is_valid(a.size(), b.size()));
    EXPECT_NEAR(path_cost(r.path, a, b), r.cost, 1e-12);
    EXPECT_EQ(r.cost, dtw_exact(a, b));
  }
}

TEST(WarpPath, Validity) {
  EXPECT_TRUE((WarpPath{{{0, 0}, {1, 1}, {1, 2}}}).is_valid(2, 3));
  EXPECT_FALSE((WarpPath{{{0, 0}, {1, 2}}}).is_valid(2, 3));
  EXPECT_FALSE((WarpPath{{{0, 1}, {1, 2}}}).is_valid(2, 3));
  EXPECT_FALSE((WarpPath{{{0, 0}, {1, 1}}}).is_valid(2, 3));
  EXPECT_FALSE((WarpPath{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}}).is_valid(2, 2));
}

TEST(DtwBruteforce, ExhaustiveSmallAlphabet) {
  const auto seqs = all_sequences({0.0, 1.0, 2.5}, 4);
  for (const Seq& a : seqs)
    for (const Seq& b : seqs) ASSERT_NEAR(dtw_bruteforce(a, b), dtw_exact(a, b), 1e-12);
}

TEST(DtwBruteforce, RandomCorpusUpToSix) {
  std::mt19937_64 rng(54);
  const Seq values = uniform_values(rng, 6, -3.0, 3.0);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  for (std::size_t n = 1; n <= 6; ++n)
    for (std::size_t m = 1; m <= 6; ++m)
      for (int rep = 0; rep < 20; ++rep) {
        Seq a(n), b(m);
        for (double& x : a) x = values[pick(rng)];
        for (double& x : b) x = values[pick(rng)];
        EXPECT_EQ(dtw_bruteforce(a, b), dtw_exact(a, b));
        Seq ra(a.rbegin(), a.rend()), rb(b.rbegin(), b.rend());
        EXPECT_NEAR(dtw_bruteforce(ra, rb), dtw_bruteforce(a, b), 1e-12);
      }
  EXPECT_THROW(dtw_bruteforce(Seq(8, 0.0), Seq(2, 0.0)), ContractError);
}

TEST(Coarsen, KeepsOddTail) {
  EXPECT_EQ(coarsen_by_half(Seq{1, 2, 3, 4, 5}), (Seq{1.5, 3.5, 5}));
  EXPECT_EQ(coarsen_by_half(Seq{1, 3}), (Seq{2}));
  EXPECT_EQ(coarsen_by_half(Seq{7}), (Seq{7}));
}

TEST(FastDtw, BaseCaseAndFullRadiusAreExact) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    const Seq a = uniform_values(rng, 1 + rng() % 40), b = uniform_values(rng, 1 + rng() % 40);
    const std::size_t full = std::max(a.size(), b.size());
    EXPECT_EQ(fastdtw(a, b, full), dtw_exact(a, b));
    EXPECT_EQ(fastdtw(a, b, full + 3), dtw_exact(a, b));
  }
  const Seq a = {1, 4, 2}, b = {0, 3};
  EXPECT_EQ(fastdtw(a, b, 1), dtw_exact(a, b));
}

TEST(FastDtw, NeverBelowExactAndPathValid) {
  std::mt19937_64 rng(56);
  for (int trial = 0; trial < 300; ++trial) {
    const Seq a = random_walk(rng, 2 + rng() % 63), b = random_walk(rng, 2 + rng() % 63);
    for (std::size_t r : {0u, 1u, 2u, 5u}) {
      const DtwResult res = fastdtw_path(a, b, r);
      EXPECT_TRUE(res.path.is_valid(a.size(), b.size()));
      EXPECT_NEAR(path_cost(res.path, a, b), res.cost, 1e-9);
      EXPECT_GE(res.cost, dtw_exact(a, b) - 1e-12);
      EXPECT_EQ(res.cost, fastdtw(a, b, r));
    }
  }
}

TEST(FastDtw, ApproachesExactAsRadiusGrows) {
  // The search window at radius r+1 contains the one at radius r only in
  // aggregate, so single pairs may wiggle; the average error must not grow.
  std::mt19937_64 rng(57);
  std::vector<double> mean_excess(8, 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Seq a = random_walk(rng, 48), b = random_walk(rng, 40);
    const double exact = dtw_exact(a, b);
    for (std::size_t r = 0; r < mean_excess.size(); ++r) mean_excess[r] += (fastdtw(a, b, r) - exact) / 200.0;
  }
  for (std::size_t r = 1; r < mean_excess.size(); ++r) EXPECT_LE(mean_excess[r], mean_excess[r - 1] + 1e-12);
}

TEST(DtwMultivariate, SumsPerVariable) {
  std::mt19937_64 rng(58);
  const Matrix p = random_matrix(rng, 12, 3), t = random_matrix(rng, 12, 3);
  double exact = 0.0, fast = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    exact += dtw_exact(p.col(c), t.col(c));
    fast += fastdtw(p.col(c), t.col(c), 1);
  }
  EXPECT_DOUBLE_EQ(dtw_multivariate(p, t, std::nullopt), exact);
  EXPECT_DOUBLE_EQ(dtw_multivariate(p, t, 1), fast);
  EXPECT_THROW(dtw_multivariate(p, random_matrix(rng, 12, 2), 1), ContractError);
}
