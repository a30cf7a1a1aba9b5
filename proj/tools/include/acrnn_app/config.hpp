#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acrnn/csv.hpp"
#include "acrnn/model.hpp"
#include "acrnn/synth.hpp"
#include "acrnn/train.hpp"

namespace acrnn::app {

struct DataConfig {
  std::string path;
  CsvOptions csv;
  std::vector<std::string> columns;  // empty: keep every column
};

struct PreprocessConfig {
  bool normalize = true;
  bool smooth = true;
  int smooth_size = 5;
  double smooth_std = 2.0;
  std::size_t stride = 1;
};

struct EvalConfig {
  std::size_t folds = 5;
  std::vector<std::size_t> horizons = {3, 5, 7};
  std::optional<std::size_t> radius = 1;  // null in JSON: exact DTW
  std::vector<std::string> baselines;     // "ridge", "persistence"
  double ridge_lambda = 1.0;
};

struct ForecastConfig {
  std::optional<std::size_t> start;  // default: end of the data
  std::size_t steps = 20;
};

struct AblateConfig {
  AblationOptions options;
  std::size_t seeds = 5;
};

/// Everything a run needs. Loaded from a single JSON document in which every
/// section and key is optional:
///
///     { "data":       {"path", "delimiter", "header", "skip_columns", "columns"},
///       "preprocess": {"normalize", "smooth", "smooth_size", "smooth_std", "stride"},
///       "model":      {"window", "horizon", "filters", "kernel_size", "gru_hidden",
///                      "ar_window", "ar_shortcut", "seed"},
///       "train":      {"learning_rate", "epochs", "batch_size", "patience", "beta1",
///                      "beta2", "epsilon", "validation_fraction", "seed"},
///       "eval":       {"folds", "horizons", "radius", "baselines", "ridge_lambda"},
///       "forecast":   {"start", "steps"},
///       "synth":      {"n_series", "length", "slope", "period", "amplitude",
///                      "noise_std", "seed"},   ranges are [lo, hi] pairs
///       "ablate":     {"holdout_fraction", "forecast_steps", "stride", "radius",
///                     "smooth", "smooth_size", "smooth_std", "seeds"} }
///
/// A run manifest is also accepted: its "config" member is used.
struct RunConfig {
  DataConfig data;
  PreprocessConfig preprocess;
  ForecasterConfig model;
  TrainConfig train;
  EvalConfig eval;
  ForecastConfig forecast;
  SynthSpec synth;
  AblateConfig ablate;
};

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace acrnn::app
