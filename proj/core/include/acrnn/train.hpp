#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acrnn/model.hpp"
#include "acrnn/preprocess.hpp"

namespace acrnn {

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 100;
  std::size_t batch_size = 32;
  int patience = 10;  // epochs without validation improvement before stopping
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double validation_fraction = 0.1;  // chronological tail of the training windows
  std::uint64_t seed = 0;

  void validate() const;
};

/// First and second moment estimates, one buffer per parameter tensor.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;

  static AdamState for_params(std::span<const Tensor> params);
};

/// One bias-corrected Adam update using the gradients stored on `params`.
/// Throws NumericError, leaving params and state untouched, if any gradient
/// is non-finite.
void adam_step(std::span<Tensor> params, AdamState& state, const TrainConfig& hyper);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ForecasterParams params;  // parameters of the best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;  // 0 when no epoch ran
  double best_val_loss = 0.0;
};

/// Index split of the training windows: the last `fraction` (at least one
/// window when two or more exist) become the validation slice.
struct ValidationSplit {
  std::size_t train_count = 0;
  std::size_t val_count = 0;
};
ValidationSplit split_validation(std::size_t n_windows, double fraction);

/// Minibatch Adam on the mean squared error. Batch order is reshuffled each
/// epoch from a generator seeded with train_config.seed. Returns the
/// parameters of the epoch with the lowest validation loss. When only one
/// window is available it doubles as the validation set.
/// Throws TrainingError if the loss becomes non-finite.
TrainResult train_model(std::span<const ForecastWindow> windows, const ForecasterConfig& config,
                        const TrainConfig& train_config);
TrainResult train_model(std::span<const ForecastWindow> windows, const ForecasterConfig& config,
                        const TrainConfig& train_config, ForecasterParams initial);

/// Mean squared error of the model over the given windows.
double evaluate_mse(std::span<const ForecastWindow> windows, const ForecasterParams& params,
                    const ForecasterConfig& config);

// ---------------------------------------------------------------------------
// Cross-validation

/// Predicts the target block of each window from its `input` alone.
using BatchPredictor = std::function<std::vector<Matrix>(std::span<const ForecastWindow>)>;

/// A model under evaluation: fits on training windows of horizon L and
/// returns a predictor for windows of the same horizon.
struct Candidate {
  std::string name;
  std::function<BatchPredictor(std::span<const ForecastWindow> train, std::size_t horizon)> fit;
};

Candidate forecaster_candidate(const ForecasterConfig& config, const TrainConfig& train_config);
Candidate ridge_candidate(double lambda);
Candidate persistence_candidate();

struct MetricSummary {
  std::string name;
  std::vector<double> per_fold;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};
MetricSummary summarize(std::string name, std::vector<double> per_fold);

struct EvalReport {
  std::string model;
  std::vector<std::string> variables;
  std::size_t folds = 0;
  std::vector<MetricSummary> metrics;

  const MetricSummary& metric(const std::string& name) const;
};

struct CrossValOptions {
  std::size_t folds = 5;
  std::size_t input_length = 64;
  std::vector<std::size_t> horizons = {3, 5, 7};  // multi-step DTW evaluation
  std::size_t stride = 1;
  std::optional<std::size_t> dtw_radius = 1;  // empty: exact DTW
};

/// Blocked k-fold evaluation. Per fold: one-step MSE and MAE (plus per-variable
/// MSE when there are several variables), and for every horizon in
/// options.horizons the mean over test windows of the multivariate DTW between
/// predicted and true L-step blocks, each horizon with its own fitted model.
EvalReport evaluate_candidate(const SeriesFrame& frame, const Candidate& candidate, const CrossValOptions& options);

/// evaluate_candidate for the convolutional-recurrent forecaster.
EvalReport cross_validate(const SeriesFrame& frame, const ForecasterConfig& config, const TrainConfig& train_config,
                          const CrossValOptions& options);

// ---------------------------------------------------------------------------
// Sliding-window forecasting

/// Produces `total_steps` rows after row `start` of `series` by forecasting L
/// steps from the most recent T rows, appending the predictions to the
/// context, and repeating. Only rows before `start` are read from `series`.
Matrix sliding_forecast(const ForecasterParams& params, const ForecasterConfig& config, const Matrix& series,
                        std::size_t start, std::size_t total_steps);

/// Same procedure for any (T x v) -> (L x v) predictor.
Matrix sliding_forecast(const std::function<Matrix(const Matrix&)>& predict, std::size_t input_length,
                        std::size_t horizon, const Matrix& series, std::size_t start, std::size_t total_steps);

}  // namespace acrnn
