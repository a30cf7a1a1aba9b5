#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "acrnn/matrix.hpp"
#include "acrnn/model.hpp"
#include "acrnn/preprocess.hpp"
#include "acrnn/train.hpp"

namespace acrnn {

/// Parameter ranges for the trend + seasonality corpus. Each series is
///   s_t = slope * t + amplitude * sin(2 pi t / period + phase) + noise_t,
/// t = 0 .. length-1, with slope, amplitude, period drawn uniformly from their
/// ranges, phase uniformly from [0, 2 pi) and noise_t ~ N(0, noise_std^2).
struct SynthSpec {
  std::size_t n_series = 80;
  std::size_t length = 120;
  double slope_min = -0.05;
  double slope_max = 0.05;
  double period_min = 8.0;
  double period_max = 30.0;
  double amplitude_min = 0.5;
  double amplitude_max = 2.0;
  double noise_std = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthSeries {
  std::vector<double> values;
  std::vector<double> trend;
  std::vector<double> periodic;
  std::vector<double> noise;
  double slope = 0.0;
  double amplitude = 0.0;
  double period = 0.0;
  double phase = 0.0;
};

std::vector<SynthSeries> generate(const SynthSpec& spec);

/// Corpus as a frame: one column per series ("series_1", ...), one row per step.
SeriesFrame corpus_frame(const std::vector<SynthSeries>& corpus);

struct AblationOptions {
  double holdout_fraction = 0.2;    // trailing series kept out of training
  std::size_t forecast_steps = 20;  // sliding-window steps scored per held-out series
  std::size_t stride = 1;
  std::optional<std::size_t> dtw_radius = 1;
  /// Gaussian smoothing of every series before normalization.
  bool smooth = false;
  int smooth_size = 5;
  double smooth_std = 2.0;
};

struct ArmResult {
  ForecasterConfig config;
  double mse = 0.0;  // mean over held-out series, normalized units
  double dtw = 0.0;
  std::vector<double> series_mse;
  std::vector<double> series_dtw;
  std::vector<Matrix> forecasts;  // forecast_steps x 1 per held-out series
  std::vector<EpochRecord> history;
};

struct AblationResult {
  ArmResult first;
  ArmResult second;
  std::vector<std::size_t> heldout;  // corpus indices of the evaluated series
  std::vector<Matrix> truth;         // preprocessed held-out series, full length
  NormStats norm;                    // pooled statistics of the training series
  std::size_t forecast_start = 0;
};

/// Trains two models that differ only in their configs on the leading
/// series, then scores a sliding-window forecast of the last
/// options.forecast_steps of every held-out series.
AblationResult ablation_run(const SynthSpec& spec, const ForecasterConfig& first, const ForecasterConfig& second,
                            const TrainConfig& train_config, const AblationOptions& options);

/// The standard pairing: `first` with the shortcut enabled, `second` without.
AblationResult ablation_run(const SynthSpec& spec, const ForecasterConfig& model_config, const TrainConfig& train_config,
                            const AblationOptions& options);

}  // namespace acrnn
