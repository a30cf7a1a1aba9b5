#include "acrnn/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "acrnn/errors.hpp"
#include "acrnn/metrics.hpp"

namespace acrnn {

void SynthSpec::validate() const {
  auto fail = [](const std::string& msg) { throw ContractError("SynthSpec: " + msg); };
  if (n_series == 0) fail("n_series must be positive");
  if (length < 8) fail("length must be >= 8");
  if (!(slope_min <= slope_max)) fail("slope range is not ordered");
  if (!(period_min > 0.0 && period_min <= period_max)) fail("period range must be positive and ordered");
  if (!(amplitude_min >= 0.0 && amplitude_min <= amplitude_max)) fail("amplitude range must be non-negative and ordered");
  if (!(noise_std >= 0.0)) fail("noise std must be >= 0");
}

namespace {

double draw(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::vector<SynthSeries> generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SynthSeries> corpus(spec.n_series);
  for (SynthSeries& s : corpus) {
    s.slope = draw(rng, spec.slope_min, spec.slope_max);
    s.amplitude = draw(rng, spec.amplitude_min, spec.amplitude_max);
    s.period = draw(rng, spec.period_min, spec.period_max);
    s.phase = draw(rng, 0.0, 2.0 * std::numbers::pi);
    s.values.resize(spec.length);
    s.trend.resize(spec.length);
    s.periodic.resize(spec.length);
    s.noise.resize(spec.length);
    for (std::size_t t = 0; t < spec.length; ++t) {
      const double time = static_cast<double>(t);
      s.trend[t] = s.slope * time;
      s.periodic[t] = s.amplitude * std::sin(2.0 * std::numbers::pi * time / s.period + s.phase);
      s.noise[t] = spec.noise_std > 0.0 ? spec.noise_std * gauss(rng) : 0.0;
      s.values[t] = s.trend[t] + s.periodic[t] + s.noise[t];
    }
  }
  return corpus;
}

SeriesFrame corpus_frame(const std::vector<SynthSeries>& corpus) {
  if (corpus.empty()) throw ContractError("corpus_frame: empty corpus");
  SeriesFrame frame;
  frame.data = Matrix(corpus.front().values.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    frame.names.push_back("series_" + std::to_string(i + 1));
    frame.data.set_col(i, corpus[i].values);
  }
  return frame;
}

namespace {

ArmResult run_arm(const ForecasterConfig& config, const TrainConfig& train_config,
                  const std::vector<ForecastWindow>& windows, const std::vector<Matrix>& truth, std::size_t start,
                  const AblationOptions& options) {
  ArmResult arm;
  arm.config = config;
  TrainResult fitted = train_model(windows, config, train_config);
  arm.history = std::move(fitted.history);
  double mse_total = 0.0, dtw_total = 0.0;
  for (const Matrix& series : truth) {
    Matrix pred = sliding_forecast(fitted.params, config, series, start, options.forecast_steps);
    const Matrix actual = series.slice_rows(start, options.forecast_steps);
    const double m = mse_metric(pred, actual);
    const double d = dtw_multivariate(pred, actual, options.dtw_radius);
    arm.series_mse.push_back(m);
    arm.series_dtw.push_back(d);
    mse_total += m;
    dtw_total += d;
    arm.forecasts.push_back(std::move(pred));
  }
  arm.mse = mse_total / static_cast<double>(truth.size());
  arm.dtw = dtw_total / static_cast<double>(truth.size());
  return arm;
}

}  // namespace

AblationResult ablation_run(const SynthSpec& spec, const ForecasterConfig& first, const ForecasterConfig& second,
                            const TrainConfig& train_config, const AblationOptions& options) {
  spec.validate();
  if (first.variables != 1 || second.variables != 1) throw ContractError("ablation_run: synthetic series are univariate");
  if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
    throw ContractError("ablation_run: holdout fraction must lie in (0, 1)");
  }
  const std::size_t heldout =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(options.holdout_fraction * spec.n_series)));
  if (heldout >= spec.n_series) throw ContractError("ablation_run: no series left for training");
  const std::size_t n_train = spec.n_series - heldout;
  if (options.forecast_steps == 0 || options.forecast_steps + first.input_length > spec.length ||
      options.forecast_steps + second.input_length > spec.length) {
    throw ContractError("ablation_run: series too short for T + forecast_steps");
  }

  std::vector<Matrix> series;
  for (const SynthSeries& s : generate(spec)) {
    SeriesFrame f{{"value"}, Matrix::column(s.values)};
    if (options.smooth) f = gaussian_smooth(f, options.smooth_size, options.smooth_std);
    series.push_back(std::move(f.data));
  }

  // Pooled statistics over every training value.
  SeriesFrame pooled;
  pooled.data = Matrix(n_train * spec.length, 1);
  for (std::size_t i = 0; i < n_train; ++i)
    for (std::size_t t = 0; t < spec.length; ++t) pooled.data(i * spec.length + t, 0) = series[i](t, 0);
  const std::vector<NormStats> stats = fit_normalizer(pooled);

  auto normalized = [&](std::size_t i) { return apply_normalizer(series[i], stats); };

  AblationResult result;
  result.norm = stats.front();
  result.forecast_start = spec.length - options.forecast_steps;
  for (std::size_t i = n_train; i < spec.n_series; ++i) {
    result.heldout.push_back(i);
    result.truth.push_back(normalized(i));
  }

  auto windows_for = [&](const ForecasterConfig& c) {
    std::vector<ForecastWindow> windows;
    for (std::size_t i = 0; i < n_train; ++i) {
      for (ForecastWindow& w : build_windows(normalized(i), c.input_length, c.horizon, options.stride)) {
        windows.push_back(std::move(w));
      }
    }
    return windows;
  };

  result.first = run_arm(first, train_config, windows_for(first), result.truth, result.forecast_start, options);
  result.second = run_arm(second, train_config, windows_for(second), result.truth, result.forecast_start, options);
  return result;
}

AblationResult ablation_run(const SynthSpec& spec, const ForecasterConfig& model_config, const TrainConfig& train_config,
                            const AblationOptions& options) {
  ForecasterConfig with = model_config;
  with.use_ar_shortcut = true;
  ForecasterConfig without = model_config;
  without.use_ar_shortcut = false;
  return ablation_run(spec, with, without, train_config, options);
}

}  // namespace acrnn
