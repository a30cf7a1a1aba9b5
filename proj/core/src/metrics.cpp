#include "acrnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "acrnn/errors.hpp"

namespace acrnn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const Matrix& pred, const Matrix& target, const char* op) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ContractError(std::string(op) + ": prediction " + std::to_string(pred.rows()) + "x" +
                        std::to_string(pred.cols()) + " vs target " + std::to_string(target.rows()) + "x" +
                        std::to_string(target.cols()));
  }
  if (pred.empty()) throw ContractError(std::string(op) + ": empty input");
}

void check_sequences(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.empty() || b.empty()) throw ContractError(std::string(op) + ": sequences must be non-empty");
}

// Inclusive column range [lo, hi] allowed in one row of the cost matrix.
struct RowWindow {
  std::size_t lo;
  std::size_t hi;
};

// DP restricted to `window` (one entry per row of a). Returns the cost and an
// optimal path; ties prefer the diagonal, then the vertical step.
DtwResult windowed_dtw(std::span<const double> a, std::span<const double> b, const std::vector<RowWindow>& window) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> cost(n);
  auto at = [&](std::size_t i, std::size_t j) -> double {
    const RowWindow& w = window[i];
    if (j < w.lo || j > w.hi) return kInf;
    return cost[i][j - w.lo];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const RowWindow& w = window[i];
    cost[i].assign(w.hi - w.lo + 1, kInf);
    for (std::size_t j = w.lo; j <= w.hi; ++j) {
      const double d = std::abs(a[i] - b[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
        if (i > 0) best = std::min(best, at(i - 1, j));
        if (j > 0) best = std::min(best, at(i, j - 1));
      }
      cost[i][j - w.lo] = d + best;
    }
  }

  DtwResult result;
  result.cost = at(n - 1, b.size() - 1);
  if (!std::isfinite(result.cost)) throw NumericError("dtw: search window does not connect the corners");
  std::size_t i = n - 1, j = b.size() - 1;
  result.path.cells.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1), up = at(i - 1, j), left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    result.path.cells.emplace_back(i, j);
  }
  std::reverse(result.path.cells.begin(), result.path.cells.end());
  return result;
}

std::vector<RowWindow> full_window(std::size_t n, std::size_t m) { return std::vector<RowWindow>(n, {0, m - 1}); }

// Projects a coarse path onto the finer grid (each coarse cell covers a 2x2
// block) after widening it by `radius` coarse cells in every direction.
std::vector<RowWindow> expand_window(const WarpPath& coarse, std::size_t n, std::size_t m, std::size_t radius) {
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<RowWindow> window(n, {none, 0});
  auto mark = [&](std::size_t i, std::size_t j_lo, std::size_t j_hi) {
    if (i >= n) return;
    j_hi = std::min(j_hi, m - 1);
    if (j_lo > j_hi) return;
    window[i].lo = std::min(window[i].lo, j_lo);
    window[i].hi = std::max(window[i].hi, j_hi);
  };
  for (const auto& [ci, cj] : coarse.cells) {
    const std::size_t i_lo = ci >= radius ? ci - radius : 0;
    const std::size_t j_lo = cj >= radius ? cj - radius : 0;
    const std::size_t i_hi = ci + radius;
    const std::size_t j_hi = cj + radius;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
      mark(2 * i, 2 * j_lo, 2 * j_hi + 1);
      mark(2 * i + 1, 2 * j_lo, 2 * j_hi + 1);
    }
  }
  // Every fine row is covered because the coarse path visits every coarse row.
  for (std::size_t i = 0; i < n; ++i) {
    if (window[i].lo == none) throw NumericError("fastdtw: projected window misses row " + std::to_string(i));
  }
  return window;
}

}  // namespace

bool WarpPath::is_valid(std::size_t n, std::size_t m) const {
  if (cells.empty() || cells.front() != std::pair<std::size_t, std::size_t>{0, 0}) return false;
  if (cells.back() != std::pair<std::size_t, std::size_t>{n - 1, m - 1}) return false;
  for (std::size_t k = 1; k < cells.size(); ++k) {
    const auto [pi, pj] = cells[k - 1];
    const auto [ci, cj] = cells[k];
    const std::size_t di = ci - pi, dj = cj - pj;
    if (ci < pi || cj < pj || di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
  }
  return true;
}

double mse_metric(const Matrix& pred, const Matrix& target) {
  check_pair(pred, target, "mse_metric");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.data()[i] - target.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double mae_metric(const Matrix& pred, const Matrix& target) {
  check_pair(pred, target, "mae_metric");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred.data()[i] - target.data()[i]);
  return acc / static_cast<double>(pred.size());
}

DtwResult dtw_exact_path(std::span<const double> a, std::span<const double> b) {
  check_sequences(a, b, "dtw_exact");
  return windowed_dtw(a, b, full_window(a.size(), b.size()));
}

double dtw_exact(std::span<const double> a, std::span<const double> b) {
  check_sequences(a, b, "dtw_exact");
  // Two-row version of the same recurrence; no path needed.
  const std::size_t m = b.size();
  std::vector<double> prev(m), curr(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = std::abs(a[i] - b[j]);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, curr[j - 1]);
      }
      curr[j] = d + best;
    }
    std::swap(prev, curr);
  }
  return prev[m - 1];
}

double dtw_bruteforce(std::span<const double> a, std::span<const double> b) {
  check_sequences(a, b, "dtw_bruteforce");
  if (a.size() > kBruteforceMaxLength || b.size() > kBruteforceMaxLength) {
    throw ContractError("dtw_bruteforce: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                        " exceed the enumeration limit of " + std::to_string(kBruteforceMaxLength));
  }
  const std::size_t n = a.size(), m = b.size();
  double best = kInf;
  // Depth-first walk over every monotone, continuous path.
  auto walk = [&](auto&& self, std::size_t i, std::size_t j, double acc) -> void {
    acc += std::abs(a[i] - b[j]);
    if (i == n - 1 && j == m - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n) self(self, i + 1, j, acc);
    if (j + 1 < m) self(self, i, j + 1, acc);
    if (i + 1 < n && j + 1 < m) self(self, i + 1, j + 1, acc);
  };
  walk(walk, 0, 0, 0.0);
  return best;
}

std::vector<double> coarsen_by_half(std::span<const double> x) {
  std::vector<double> out;
  out.reserve((x.size() + 1) / 2);
  std::size_t i = 0;
  for (; i + 1 < x.size(); i += 2) out.push_back((x[i] + x[i + 1]) / 2.0);
  if (i < x.size()) out.push_back(x[i]);
  return out;
}

DtwResult fastdtw_path(std::span<const double> a, std::span<const double> b, std::size_t radius) {
  check_sequences(a, b, "fastdtw");
  const std::size_t base = radius + 2;
  if (a.size() <= base || b.size() <= base) return dtw_exact_path(a, b);
  const std::vector<double> a_coarse = coarsen_by_half(a);
  const std::vector<double> b_coarse = coarsen_by_half(b);
  const DtwResult coarse = fastdtw_path(a_coarse, b_coarse, radius);
  return windowed_dtw(a, b, expand_window(coarse.path, a.size(), b.size(), radius));
}

double fastdtw(std::span<const double> a, std::span<const double> b, std::size_t radius) {
  return fastdtw_path(a, b, radius).cost;
}

double dtw_multivariate(const Matrix& pred, const Matrix& target, std::optional<std::size_t> radius) {
  if (pred.cols() != target.cols()) {
    throw ContractError("dtw_multivariate: " + std::to_string(pred.cols()) + " vs " + std::to_string(target.cols()) +
                        " variables");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < pred.cols(); ++c) {
    const std::vector<double> a = pred.col(c);
    const std::vector<double> b = target.col(c);
    total += radius ? fastdtw(a, b, *radius) : dtw_exact(a, b);
  }
  return total;
}

}  // namespace acrnn
