#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "acrnn/matrix.hpp"

namespace acrnn {

/// Per-variable normalization statistics.
struct NormStats {
  double mean = 0.0;
  double std = 1.0;
  /// The column had (numerically) zero spread; std was replaced by 1.
  bool constant = false;

  friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// A multivariate series: `data` is T_total x v, one column per variable.
struct SeriesFrame {
  std::vector<std::string> names;
  Matrix data;
  /// Set once the frame has been normalized.
  std::optional<std::vector<NormStats>> norm_stats;

  std::size_t length() const noexcept { return data.rows(); }
  std::size_t variables() const noexcept { return data.cols(); }
};

/// One supervised instance: `input` (T x v) immediately followed in time by
/// `target` (L x v).
struct ForecastWindow {
  Matrix input;
  Matrix target;
  std::size_t offset = 0;  // row of the source series where `input` starts
};

/// Train/test index split of one cross-validation fold.
struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Columns with population std below this are flagged constant.
inline constexpr double kConstantStdThreshold = 1e-8;

/// Mean and population (1/N) standard deviation per column. Requires at least two rows.
std::vector<NormStats> fit_normalizer(const SeriesFrame& frame);

/// (x - mean) / std per column; the result carries `stats` as its norm_stats.
SeriesFrame apply_normalizer(const SeriesFrame& frame, const std::vector<NormStats>& stats);

/// Exact inverse of apply_normalizer; the result has no norm_stats.
SeriesFrame invert_normalizer(const SeriesFrame& frame, const std::vector<NormStats>& stats);

/// Same maps on a bare matrix (e.g. a forecast block).
Matrix apply_normalizer(const Matrix& data, const std::vector<NormStats>& stats);
Matrix invert_normalizer(const Matrix& data, const std::vector<NormStats>& stats);

/// Normalized Gaussian kernel g_k ∝ exp(-k^2 / (2 std^2)), k = -(size-1)/2 .. (size-1)/2.
std::vector<double> gaussian_kernel(int size, double std);

/// Per-variable convolution with gaussian_kernel(size, std). Out-of-range
/// samples are mirrored about the edge including the edge sample itself,
/// i.e. (c b a | a b c d | d c b).
SeriesFrame gaussian_smooth(const SeriesFrame& frame, int size = 5, double std = 2.0);

/// Replaces each group of `factor` consecutive rows by its mean, per column.
/// T must be divisible by factor.
Matrix downsample_avg(const Matrix& block, std::size_t factor);

/// Windows at offsets 0, stride, 2*stride, ... while offset + T + L <= T_total.
/// T must be a multiple of 4 so the model can downsample it twice.
std::vector<ForecastWindow> build_windows(const Matrix& series, std::size_t input_length,
                                          std::size_t horizon, std::size_t stride = 1);

/// k contiguous test blocks covering 0..n-1 in order. Block sizes differ by at
/// most one, the larger blocks coming first. Each train set is the complement.
std::vector<Fold> blocked_kfold(std::size_t n_windows, std::size_t k = 5);

}  // namespace acrnn
