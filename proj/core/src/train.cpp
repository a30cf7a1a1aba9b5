#include "acrnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "acrnn/errors.hpp"
#include "acrnn/metrics.hpp"
#include "acrnn/ridge.hpp"

namespace acrnn {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ContractError("TrainConfig: " + msg); };
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  if (epochs < 0) fail("epochs must be >= 0");
  if (batch_size == 0) fail("batch size must be positive");
  if (patience < 1) fail("patience must be >= 1");
  if (!(beta1 > 0.0 && beta1 < 1.0)) fail("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) fail("beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) fail("validation fraction must lie in [0, 1)");
}

AdamState AdamState::for_params(std::span<const Tensor> params) {
  AdamState s;
  for (const Tensor& p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(std::span<Tensor> params, AdamState& state, const TrainConfig& hyper) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ContractError("adam_step: optimizer state does not match the parameter list");
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (state.m[p].size() != params[p].size() || state.v[p].size() != params[p].size()) {
      throw ContractError("adam_step: moment buffer " + std::to_string(p) + " is misshapen");
    }
    for (double g : params[p].grad()) {
      if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient in parameter " + std::to_string(p));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(hyper.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto g = params[p].grad();
    auto theta = params[p].mutable_values();
    auto& m = state.m[p];
    auto& v = state.v[p];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
      v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
  }
}

ValidationSplit split_validation(std::size_t n_windows, double fraction) {
  if (n_windows < 2) return {n_windows, 0};
  auto val = static_cast<std::size_t>(std::floor(static_cast<double>(n_windows) * fraction));
  val = std::clamp<std::size_t>(val, 1, n_windows - 1);
  return {n_windows - val, val};
}

namespace {

constexpr std::size_t kEvalBatch = 256;

std::vector<Matrix> inputs_of(std::span<const ForecastWindow> windows) {
  std::vector<Matrix> out;
  out.reserve(windows.size());
  for (const ForecastWindow& w : windows) out.push_back(w.input);
  return out;
}

std::vector<Matrix> predict_all(std::span<const ForecastWindow> windows, const ForecasterParams& params,
                                const ForecasterConfig& config) {
  std::vector<Matrix> preds;
  preds.reserve(windows.size());
  for (std::size_t first = 0; first < windows.size(); first += kEvalBatch) {
    const std::size_t count = std::min(kEvalBatch, windows.size() - first);
    const std::vector<Matrix> inputs = inputs_of(windows.subspan(first, count));
    for (Matrix& m : forecast_batch(inputs, params, config)) preds.push_back(std::move(m));
  }
  return preds;
}

}  // namespace

double evaluate_mse(std::span<const ForecastWindow> windows, const ForecasterParams& params,
                    const ForecasterConfig& config) {
  if (windows.empty()) throw ContractError("evaluate_mse: no windows");
  const std::vector<Matrix> preds = predict_all(windows, params, config);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    total += mse_metric(preds[i], windows[i].target) * static_cast<double>(preds[i].size());
    count += preds[i].size();
  }
  return total / static_cast<double>(count);
}

TrainResult train_model(std::span<const ForecastWindow> windows, const ForecasterConfig& config,
                        const TrainConfig& train_config) {
  return train_model(windows, config, train_config, init_forecaster(config));
}

TrainResult train_model(std::span<const ForecastWindow> windows, const ForecasterConfig& config,
                        const TrainConfig& train_config, ForecasterParams initial) {
  config.validate();
  train_config.validate();
  if (windows.empty()) throw ContractError("train_model: need at least one training window");

  const ValidationSplit split = split_validation(windows.size(), train_config.validation_fraction);
  const auto train_windows = windows.first(split.train_count);
  const auto val_windows = split.val_count > 0 ? windows.subspan(split.train_count) : train_windows;

  TrainResult result;
  result.params = std::move(initial);
  if (train_config.epochs == 0) return result;

  ForecasterParams& params = result.params;
  std::vector<Tensor> tensors = params.tensors();
  AdamState adam = AdamState::for_params(tensors);
  std::mt19937_64 rng(train_config.seed);
  std::vector<std::size_t> order(train_windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  ForecasterParams best = params.clone();
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<Matrix> batch_inputs, batch_targets;
  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted_loss = 0.0;
    for (std::size_t first = 0; first < order.size(); first += train_config.batch_size) {
      const std::size_t count = std::min(train_config.batch_size, order.size() - first);
      batch_inputs.clear();
      batch_targets.clear();
      for (std::size_t k = 0; k < count; ++k) {
        batch_inputs.push_back(train_windows[order[first + k]].input);
        batch_targets.push_back(train_windows[order[first + k]].target);
      }
      for (Tensor& t : tensors) t.zero_grad();
      Tape tape;
      double loss_value;
      {
        Tape::Scope scope(tape);
        const Tensor pred = forward(make_batch_inputs(batch_inputs, config), params, config);
        const Tensor loss = mse_loss(pred, stack_targets(batch_targets));
        loss_value = loss.item();
        if (!std::isfinite(loss_value)) {
          throw TrainingError("train_model: loss became non-finite at epoch " + std::to_string(epoch), epoch);
        }
        tape.backward(loss);
      }
      try {
        adam_step(tensors, adam, train_config);
      } catch (const NumericError& e) {
        throw TrainingError(std::string("train_model: ") + e.what() + " at epoch " + std::to_string(epoch), epoch);
      }
      weighted_loss += loss_value * static_cast<double>(count);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = weighted_loss / static_cast<double>(order.size());
    record.val_loss = evaluate_mse(val_windows, params, config);
    if (!std::isfinite(record.val_loss)) {
      throw TrainingError("train_model: validation loss became non-finite at epoch " + std::to_string(epoch), epoch);
    }
    result.history.push_back(record);

    if (record.val_loss < best_val) {
      best_val = record.val_loss;
      best = params.clone();
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= train_config.patience) {
      break;
    }
  }
  result.params = std::move(best);
  result.best_val_loss = best_val;
  return result;
}

// ---------------------------------------------------------------------------
// Candidates

Candidate forecaster_candidate(const ForecasterConfig& config, const TrainConfig& train_config) {
  return Candidate{"acrnn", [config, train_config](std::span<const ForecastWindow> train, std::size_t horizon) {
                     ForecasterConfig c = config;
                     c.horizon = horizon;
                     c.variables = train.front().input.cols();
                     c.input_length = train.front().input.rows();
                     TrainResult fitted = train_model(train, c, train_config);
                     return BatchPredictor([c, params = std::move(fitted.params)](std::span<const ForecastWindow> w) {
                       return predict_all(w, params, c);
                     });
                   }};
}

Candidate ridge_candidate(double lambda) {
  return Candidate{"ridge", [lambda](std::span<const ForecastWindow> train, std::size_t) {
                     RidgeForecaster model = RidgeForecaster::fit(train, lambda);
                     return BatchPredictor([model = std::move(model)](std::span<const ForecastWindow> w) {
                       std::vector<Matrix> out;
                       for (const ForecastWindow& x : w) out.push_back(model.forecast(x.input));
                       return out;
                     });
                   }};
}

Candidate persistence_candidate() {
  return Candidate{"persistence", [](std::span<const ForecastWindow>, std::size_t horizon) {
                     return BatchPredictor([horizon](std::span<const ForecastWindow> w) {
                       std::vector<Matrix> out;
                       for (const ForecastWindow& x : w) out.push_back(persistence_forecast(x.input, horizon));
                       return out;
                     });
                   }};
}

// ---------------------------------------------------------------------------
// Reports

MetricSummary summarize(std::string name, std::vector<double> per_fold) {
  MetricSummary s;
  s.name = std::move(name);
  s.per_fold = std::move(per_fold);
  const std::size_t n = s.per_fold.size();
  if (n == 0) return s;
  double total = 0.0;
  for (double x : s.per_fold) total += x;
  s.mean = total / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : s.per_fold) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

const MetricSummary& EvalReport::metric(const std::string& name) const {
  for (const MetricSummary& m : metrics) {
    if (m.name == name) return m;
  }
  throw ContractError("EvalReport: no metric named '" + name + "'");
}

namespace {

std::vector<ForecastWindow> select(const std::vector<ForecastWindow>& windows, const std::vector<std::size_t>& idx) {
  std::vector<ForecastWindow> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(windows[i]);
  return out;
}

}  // namespace

EvalReport evaluate_candidate(const SeriesFrame& frame, const Candidate& candidate, const CrossValOptions& options) {
  const std::size_t v = frame.variables();
  const auto one_step = build_windows(frame.data, options.input_length, 1, options.stride);
  const auto folds = blocked_kfold(one_step.size(), options.folds);

  std::vector<std::vector<ForecastWindow>> multi_windows;
  std::vector<std::vector<Fold>> multi_folds;
  for (std::size_t h : options.horizons) {
    multi_windows.push_back(build_windows(frame.data, options.input_length, h, options.stride));
    multi_folds.push_back(blocked_kfold(multi_windows.back().size(), options.folds));
  }

  std::vector<double> mse(options.folds), mae(options.folds);
  std::vector<std::vector<double>> per_var(v, std::vector<double>(options.folds));
  std::vector<std::vector<double>> dtw(options.horizons.size(), std::vector<double>(options.folds));

  for (std::size_t f = 0; f < options.folds; ++f) {
    {
      const auto train = select(one_step, folds[f].train);
      const auto test = select(one_step, folds[f].test);
      const BatchPredictor predict = candidate.fit(train, 1);
      const std::vector<Matrix> preds = predict(test);
      double se = 0.0, ae = 0.0;
      std::vector<double> var_se(v, 0.0);
      for (std::size_t i = 0; i < test.size(); ++i) {
        for (std::size_t j = 0; j < v; ++j) {
          const double d = preds[i](0, j) - test[i].target(0, j);
          se += d * d;
          ae += std::abs(d);
          var_se[j] += d * d;
        }
      }
      const double n = static_cast<double>(test.size());
      mse[f] = se / (n * static_cast<double>(v));
      mae[f] = ae / (n * static_cast<double>(v));
      for (std::size_t j = 0; j < v; ++j) per_var[j][f] = var_se[j] / n;
    }
    for (std::size_t hi = 0; hi < options.horizons.size(); ++hi) {
      const auto train = select(multi_windows[hi], multi_folds[hi][f].train);
      const auto test = select(multi_windows[hi], multi_folds[hi][f].test);
      const BatchPredictor predict = candidate.fit(train, options.horizons[hi]);
      const std::vector<Matrix> preds = predict(test);
      double total = 0.0;
      for (std::size_t i = 0; i < test.size(); ++i) total += dtw_multivariate(preds[i], test[i].target, options.dtw_radius);
      dtw[hi][f] = total / static_cast<double>(test.size());
    }
  }

  EvalReport report;
  report.model = candidate.name;
  report.variables = frame.names;
  report.folds = options.folds;
  report.metrics.push_back(summarize("mse", std::move(mse)));
  report.metrics.push_back(summarize("mae", std::move(mae)));
  for (std::size_t hi = 0; hi < options.horizons.size(); ++hi) {
    report.metrics.push_back(summarize("dtw@" + std::to_string(options.horizons[hi]), std::move(dtw[hi])));
  }
  if (v > 1) {
    for (std::size_t j = 0; j < v; ++j) {
      const std::string label = j < frame.names.size() ? frame.names[j] : "var" + std::to_string(j + 1);
      report.metrics.push_back(summarize("mse:" + label, std::move(per_var[j])));
    }
  }
  return report;
}

EvalReport cross_validate(const SeriesFrame& frame, const ForecasterConfig& config, const TrainConfig& train_config,
                          const CrossValOptions& options) {
  ForecasterConfig c = config;
  c.input_length = options.input_length;
  c.variables = frame.variables();
  c.validate();
  return evaluate_candidate(frame, forecaster_candidate(c, train_config), options);
}

// ---------------------------------------------------------------------------
// Sliding window

Matrix sliding_forecast(const std::function<Matrix(const Matrix&)>& predict, std::size_t input_length,
                        std::size_t horizon, const Matrix& series, std::size_t start, std::size_t total_steps) {
  if (start < input_length) {
    throw ContractError("sliding_forecast: start " + std::to_string(start) + " leaves fewer than T=" +
                        std::to_string(input_length) + " observed rows");
  }
  if (start > series.rows()) throw ContractError("sliding_forecast: start lies beyond the series");
  if (total_steps == 0) throw ContractError("sliding_forecast: total_steps must be >= 1");
  if (horizon == 0) throw ContractError("sliding_forecast: horizon must be >= 1");

  // Only the last T observed rows are ever needed.
  Matrix context = series.slice_rows(start - input_length, input_length);
  Matrix produced(0, series.cols());
  while (produced.rows() < total_steps) {
    const Matrix window = context.slice_rows(context.rows() - input_length, input_length);
    const Matrix block = predict(window);
    if (block.rows() != horizon || block.cols() != series.cols()) {
      throw DimensionError("sliding_forecast: predictor returned a block of the wrong shape");
    }
    const std::size_t take = std::min(horizon, total_steps - produced.rows());
    for (std::size_t r = 0; r < take; ++r) {
      context.append_row(block.row(r));
      produced.append_row(block.row(r));
    }
  }
  return produced;
}

Matrix sliding_forecast(const ForecasterParams& params, const ForecasterConfig& config, const Matrix& series,
                        std::size_t start, std::size_t total_steps) {
  return sliding_forecast([&](const Matrix& w) { return forecast(w, params, config); }, config.input_length,
                          config.horizon, series, start, total_steps);
}

}  // namespace acrnn
