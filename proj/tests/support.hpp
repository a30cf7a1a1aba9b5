#pragma once

#include <cmath>
#include <cstring>
#include <span>
#include <functional>
#include <random>
#include <vector>

#include "acrnn/matrix.hpp"
#include "acrnn/tensor.hpp"

namespace acrnn::testing {

inline std::vector<double> uniform_values(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& x : out) x = dist(rng);
  return out;
}

inline Tensor random_tensor(std::mt19937_64& rng, Shape shape, bool requires_grad = true) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return Tensor(std::move(shape), uniform_values(rng, n), requires_grad);
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0) {
  return Matrix(rows, cols, uniform_values(rng, rows * cols, lo, hi));
}

/// Largest |analytic - numeric| / max(1, |analytic|) over every parameter.
/// `loss` rebuilds the scalar from the current parameter values.
inline double max_gradient_error(const std::function<Tensor()>& loss, std::vector<Tensor> params, double eps = 1e-5) {
  for (Tensor& p : params) p.zero_grad();
  {
    Tape tape;
    Tape::Scope scope(tape);
    tape.backward(loss());
  }
  double worst = 0.0;
  for (Tensor& p : params) {
    const std::vector<double> analytic(p.grad().begin(), p.grad().end());
    const Tensor numeric = finite_diff_grad([&](const Tensor&) { return loss().item(); }, p, eps);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double err = std::abs(analytic[i] - numeric.values()[i]) / std::max(1.0, std::abs(analytic[i]));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

inline bool bit_identical(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace acrnn::testing
