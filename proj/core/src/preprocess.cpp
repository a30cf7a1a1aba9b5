#include "acrnn/preprocess.hpp"

#include <cmath>
#include <string>

#include "acrnn/errors.hpp"

namespace acrnn {

std::vector<NormStats> fit_normalizer(const SeriesFrame& frame) {
  const Matrix& data = frame.data;
  if (data.empty()) throw ContractError("fit_normalizer: empty frame");
  if (data.rows() < 2) throw ContractError("fit_normalizer: need at least 2 rows, got " + std::to_string(data.rows()));

  const double n = static_cast<double>(data.rows());
  std::vector<NormStats> stats(data.cols());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) total += data(r, c);
    const double mean = total / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      const double d = data(r, c) - mean;
      ss += d * d;
    }
    const double std = std::sqrt(ss / n);
    stats[c].mean = mean;
    if (std < kConstantStdThreshold) {
      stats[c].std = 1.0;
      stats[c].constant = true;
    } else {
      stats[c].std = std;
    }
  }
  return stats;
}

namespace {

void check_arity(const Matrix& data, const std::vector<NormStats>& stats, const char* op) {
  if (stats.size() != data.cols()) {
    throw ContractError(std::string(op) + ": " + std::to_string(stats.size()) + " statistics for " +
                        std::to_string(data.cols()) + " variables");
  }
}

}  // namespace

Matrix apply_normalizer(const Matrix& data, const std::vector<NormStats>& stats) {
  check_arity(data, stats, "apply_normalizer");
  Matrix out = data;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = (out(r, c) - stats[c].mean) / stats[c].std;
  return out;
}

Matrix invert_normalizer(const Matrix& data, const std::vector<NormStats>& stats) {
  check_arity(data, stats, "invert_normalizer");
  Matrix out = data;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = out(r, c) * stats[c].std + stats[c].mean;
  return out;
}

SeriesFrame apply_normalizer(const SeriesFrame& frame, const std::vector<NormStats>& stats) {
  return SeriesFrame{frame.names, apply_normalizer(frame.data, stats), stats};
}

SeriesFrame invert_normalizer(const SeriesFrame& frame, const std::vector<NormStats>& stats) {
  return SeriesFrame{frame.names, invert_normalizer(frame.data, stats), std::nullopt};
}

std::vector<double> gaussian_kernel(int size, double std) {
  if (size < 1 || size % 2 == 0) {
    throw ContractError("gaussian_kernel: size must be odd and >= 1, got " + std::to_string(size));
  }
  if (!(std > 0.0)) throw ContractError("gaussian_kernel: std must be positive");
  const int half = (size - 1) / 2;
  std::vector<double> kernel(static_cast<std::size_t>(size));
  double total = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double w = std::exp(-static_cast<double>(k * k) / (2.0 * std * std));
    kernel[static_cast<std::size_t>(k + half)] = w;
    total += w;
  }
  for (double& w : kernel) w /= total;
  return kernel;
}

namespace {

// Maps any integer index into [0, n) by mirroring about the edges, edge sample included.
std::size_t reflect_index(long i, long n) {
  const long period = 2 * n;
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - 1 - m);
}

}  // namespace

SeriesFrame gaussian_smooth(const SeriesFrame& frame, int size, double std) {
  const std::vector<double> kernel = gaussian_kernel(size, std);
  const long half = (size - 1) / 2;
  const Matrix& in = frame.data;
  const long n = static_cast<long>(in.rows());
  SeriesFrame out{frame.names, Matrix(in.rows(), in.cols()), frame.norm_stats};
  for (std::size_t c = 0; c < in.cols(); ++c) {
    for (long t = 0; t < n; ++t) {
      double acc = 0.0;
      for (long k = -half; k <= half; ++k) {
        acc += kernel[static_cast<std::size_t>(k + half)] * in(reflect_index(t + k, n), c);
      }
      out.data(static_cast<std::size_t>(t), c) = acc;
    }
  }
  return out;
}

Matrix downsample_avg(const Matrix& block, std::size_t factor) {
  if (factor == 0 || block.rows() % factor != 0) {
    throw ContractError("downsample_avg: " + std::to_string(block.rows()) + " rows not divisible by factor " +
                        std::to_string(factor));
  }
  const std::size_t groups = block.rows() / factor;
  Matrix out(groups, block.cols());
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t c = 0; c < block.cols(); ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < factor; ++k) acc += block(g * factor + k, c);
      out(g, c) = acc / static_cast<double>(factor);
    }
  }
  return out;
}

std::vector<ForecastWindow> build_windows(const Matrix& series, std::size_t input_length, std::size_t horizon,
                                          std::size_t stride) {
  if (input_length == 0 || input_length % 4 != 0) {
    throw ContractError("build_windows: window length T=" + std::to_string(input_length) +
                        " must be a positive multiple of 4 (T = 0 mod 4) for the two downsampling stages");
  }
  if (horizon == 0) throw ContractError("build_windows: horizon L must be >= 1");
  if (stride == 0) throw ContractError("build_windows: stride must be >= 1");
  if (input_length + horizon > series.rows()) {
    throw EmptyResultError("build_windows: T + L = " + std::to_string(input_length + horizon) +
                           " exceeds series length " + std::to_string(series.rows()));
  }
  std::vector<ForecastWindow> windows;
  for (std::size_t offset = 0; offset + input_length + horizon <= series.rows(); offset += stride) {
    windows.push_back(ForecastWindow{series.slice_rows(offset, input_length),
                                     series.slice_rows(offset + input_length, horizon), offset});
  }
  return windows;
}

std::vector<Fold> blocked_kfold(std::size_t n_windows, std::size_t k) {
  if (k < 2) throw ContractError("blocked_kfold: k must be >= 2, got " + std::to_string(k));
  if (n_windows < k) {
    throw ContractError("blocked_kfold: " + std::to_string(n_windows) + " windows cannot fill " +
                        std::to_string(k) + " folds");
  }
  const std::size_t base = n_windows / k;
  const std::size_t remainder = n_windows % k;
  std::vector<Fold> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < remainder ? 1 : 0);
    for (std::size_t i = 0; i < n_windows; ++i) {
      if (i >= start && i < start + len) {
        folds[f].test.push_back(i);
      } else {
        folds[f].train.push_back(i);
      }
    }
    start += len;
  }
  return folds;
}

}  // namespace acrnn
