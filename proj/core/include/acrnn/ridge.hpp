#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "acrnn/matrix.hpp"
#include "acrnn/preprocess.hpp"

namespace acrnn {

/// y ≈ X W + intercept.
struct RidgeModel {
  Matrix weights;                 // p x m
  std::vector<double> intercept;  // m

  Matrix predict(const Matrix& x) const;
};

/// Minimizes |X w - y|^2 + lambda |w|^2 on mean-centered data, solving
/// (Xc' Xc + lambda I) w = Xc' yc with a Cholesky factorization; the intercept
/// restores the means. Throws NumericError when the system is singular
/// (only possible with lambda = 0).
RidgeModel ridge_fit(const Matrix& x, const Matrix& y, double lambda);

/// Ridge regression from a flattened input window (T v features) to the
/// flattened L x v target block.
class RidgeForecaster {
 public:
  static RidgeForecaster fit(std::span<const ForecastWindow> windows, double lambda);
  Matrix forecast(const Matrix& window) const;

  const RidgeModel& model() const noexcept { return model_; }

 private:
  RidgeModel model_;
  std::size_t horizon_ = 0;
  std::size_t variables_ = 0;
};

/// Repeats the last observed row `horizon` times.
Matrix persistence_forecast(const Matrix& window, std::size_t horizon);

}  // namespace acrnn
