#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "acrnn/matrix.hpp"

namespace acrnn {

/// Monotone alignment between two sequences as 0-based (i, j) pairs, from
/// (0, 0) to (n - 1, m - 1), each step one of (1,0), (0,1), (1,1).
struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> cells;

  bool is_valid(std::size_t n, std::size_t m) const;
};

struct DtwResult {
  double cost = 0.0;
  WarpPath path;
};

double mse_metric(const Matrix& pred, const Matrix& target);
double mae_metric(const Matrix& pred, const Matrix& target);

/// Full O(nm) dynamic program with pointwise distance |a_i - b_j|:
///   D(i, j) = |a_i - b_j| + min(D(i-1, j), D(i, j-1), D(i-1, j-1)).
double dtw_exact(std::span<const double> a, std::span<const double> b);
DtwResult dtw_exact_path(std::span<const double> a, std::span<const double> b);

/// Minimum over every valid warp path, by exhaustive enumeration. Test
/// oracle; both lengths must be at most kBruteforceMaxLength.
inline constexpr std::size_t kBruteforceMaxLength = 7;
double dtw_bruteforce(std::span<const double> a, std::span<const double> b);

/// Multi-resolution DTW approximation: halve both sequences, solve the
/// coarse problem recursively, project its path back up, widen it by
/// `radius` cells and solve the DP only inside that window. Sequences of at
/// most radius + 2 samples are solved exactly. The result is the cost of a
/// valid warp path, so it never undercuts dtw_exact.
double fastdtw(std::span<const double> a, std::span<const double> b, std::size_t radius);
DtwResult fastdtw_path(std::span<const double> a, std::span<const double> b, std::size_t radius);

/// Averages neighbouring pairs; an odd trailing sample is kept as-is.
std::vector<double> coarsen_by_half(std::span<const double> x);

/// Sum over variables (columns) of the per-column DTW cost. Uses FastDTW with
/// the given radius, or the exact DP when radius is empty.
double dtw_multivariate(const Matrix& pred, const Matrix& target, std::optional<std::size_t> radius);

}  // namespace acrnn
