#include "acrnn/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "acrnn/errors.hpp"
#include "acrnn/preprocess.hpp"

namespace acrnn {

namespace {

constexpr std::array<const char*, 3> kStreamNames = {"full", "half", "quarter"};

Tensor glorot(Shape shape, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  std::vector<double> values(n);
  for (double& v : values) v = dist(rng);
  return Tensor(std::move(shape), std::move(values), true);
}

Tensor zero_bias(std::size_t n) { return Tensor::zeros({n}, true); }

Tensor copy_param(const Tensor& t) {
  Tensor c = t.clone();
  c.set_requires_grad(true);
  return c;
}

}  // namespace

void ForecasterConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ContractError("ForecasterConfig: " + msg); };
  if (variables == 0) fail("variables must be positive");
  if (input_length == 0 || input_length % 4 != 0) {
    fail("input length T=" + std::to_string(input_length) + " must be a positive multiple of 4");
  }
  if (horizon == 0) fail("horizon must be positive");
  if (filters == 0) fail("filters must be positive");
  if (kernel_size == 0) fail("kernel size must be positive");
  if (gru_hidden == 0) fail("GRU hidden size must be positive");
  if (ar_window == 0) fail("AR window must be positive");
  if (ar_window > input_length) {
    fail("AR window " + std::to_string(ar_window) + " exceeds input length " + std::to_string(input_length));
  }
}

std::vector<NamedTensor> ForecasterParams::named() const {
  std::vector<NamedTensor> out;
  for (std::size_t r = 0; r < streams.size(); ++r) {
    const std::string p = kStreamNames[r];
    const StreamParams& s = streams[r];
    out.push_back({p + ".conv1.weight", s.conv1.weight});
    out.push_back({p + ".conv1.bias", s.conv1.bias});
    out.push_back({p + ".conv2.weight", s.conv2.weight});
    out.push_back({p + ".conv2.bias", s.conv2.bias});
    out.push_back({p + ".gru.w_z", s.gru.w_z});
    out.push_back({p + ".gru.u_z", s.gru.u_z});
    out.push_back({p + ".gru.b_z", s.gru.b_z});
    out.push_back({p + ".gru.w_r", s.gru.w_r});
    out.push_back({p + ".gru.u_r", s.gru.u_r});
    out.push_back({p + ".gru.b_r", s.gru.b_r});
    out.push_back({p + ".gru.w_h", s.gru.w_h});
    out.push_back({p + ".gru.u_h", s.gru.u_h});
    out.push_back({p + ".gru.b_h", s.gru.b_h});
  }
  for (std::size_t t = 0; t < heads.size(); ++t) {
    out.push_back({"head" + std::to_string(t + 1) + ".weight", heads[t].weight});
    out.push_back({"head" + std::to_string(t + 1) + ".bias", heads[t].bias});
  }
  out.push_back({"shortcut.weight", shortcut.weight});
  out.push_back({"shortcut.bias", shortcut.bias});
  return out;
}

std::vector<Tensor> ForecasterParams::tensors() const {
  std::vector<Tensor> out;
  for (auto& nt : named()) out.push_back(nt.tensor);
  return out;
}

ForecasterParams ForecasterParams::clone() const {
  ForecasterParams c;
  for (std::size_t r = 0; r < streams.size(); ++r) {
    const StreamParams& s = streams[r];
    StreamParams& d = c.streams[r];
    d.conv1 = {copy_param(s.conv1.weight), copy_param(s.conv1.bias)};
    d.conv2 = {copy_param(s.conv2.weight), copy_param(s.conv2.bias)};
    d.gru = {copy_param(s.gru.w_z), copy_param(s.gru.u_z), copy_param(s.gru.b_z),
             copy_param(s.gru.w_r), copy_param(s.gru.u_r), copy_param(s.gru.b_r),
             copy_param(s.gru.w_h), copy_param(s.gru.u_h), copy_param(s.gru.b_h)};
  }
  for (const OutputHead& h : heads) c.heads.push_back({copy_param(h.weight), copy_param(h.bias)});
  c.shortcut = {copy_param(shortcut.weight), copy_param(shortcut.bias)};
  return c;
}

ForecasterParams init_forecaster(const ForecasterConfig& config) {
  config.validate();
  const std::size_t v = config.variables, nf = config.filters, k = config.kernel_size, h = config.gru_hidden;
  std::mt19937_64 rng(config.seed);
  ForecasterParams p;
  for (StreamParams& s : p.streams) {
    s.conv1 = {glorot({nf, v, k}, v * k, nf * k, rng), zero_bias(nf)};
    s.conv2 = {glorot({nf, nf, k}, nf * k, nf * k, rng), zero_bias(nf)};
    s.gru.w_z = glorot({nf, h}, nf, h, rng);
    s.gru.u_z = glorot({h, h}, h, h, rng);
    s.gru.b_z = zero_bias(h);
    s.gru.w_r = glorot({nf, h}, nf, h, rng);
    s.gru.u_r = glorot({h, h}, h, h, rng);
    s.gru.b_r = zero_bias(h);
    s.gru.w_h = glorot({nf, h}, nf, h, rng);
    s.gru.u_h = glorot({h, h}, h, h, rng);
    s.gru.b_h = zero_bias(h);
  }
  for (std::size_t t = 0; t < config.horizon; ++t) {
    p.heads.push_back({glorot({3 * h, v}, 3 * h, v, rng), zero_bias(v)});
  }
  p.shortcut = {glorot({config.ar_window, config.horizon}, config.ar_window, config.horizon, rng),
                zero_bias(config.horizon)};
  return p;
}

std::size_t parameter_count(const ForecasterConfig& c) {
  const std::size_t v = c.variables, nf = c.filters, k = c.kernel_size, h = c.gru_hidden;
  const std::size_t per_stream = nf * v * k + nf + nf * nf * k + nf + 3 * (nf * h + h * h + h);
  return 3 * per_stream + c.horizon * (3 * h * v + v) + c.ar_window * c.horizon + c.horizon;
}

std::size_t parameter_count(const ForecasterParams& params) {
  std::size_t n = 0;
  for (const Tensor& t : params.tensors()) n += t.size();
  return n;
}

MultiscaleInputs multiscale_inputs(const Matrix& input) {
  if (input.rows() == 0 || input.rows() % 4 != 0) {
    throw ContractError("multiscale_inputs: input length " + std::to_string(input.rows()) +
                        " must be a positive multiple of 4");
  }
  return {input, downsample_avg(input, 2), downsample_avg(input, 4)};
}

Tensor conv_features(const Tensor& x, const StreamParams& stream) {
  Tensor q = relu(causal_conv1d(x, stream.conv1.weight, stream.conv1.bias));
  return relu(causal_conv1d(q, stream.conv2.weight, stream.conv2.bias));
}

Tensor gru_step(const Tensor& h, const Tensor& x, const GruParams& gru) {
  if (h.rank() != 2 || x.rank() != 2 || h.dim(0) != x.dim(0)) {
    throw DimensionError("gru_step: state " + shape_string(h.shape()) + " and input " + shape_string(x.shape()) +
                         " must be row batches of equal size");
  }
  if (gru.u_z.rank() != 2 || h.dim(1) != gru.u_z.dim(0)) {
    throw DimensionError("gru_step: state " + shape_string(h.shape()) + " does not match U " +
                         shape_string(gru.u_z.shape()));
  }
  Tensor z = sigmoid(add_bias(add(matmul(x, gru.w_z), matmul(h, gru.u_z)), gru.b_z));
  Tensor r = sigmoid(add_bias(add(matmul(x, gru.w_r), matmul(h, gru.u_r)), gru.b_r));
  Tensor candidate = tanh(add_bias(add(matmul(x, gru.w_h), matmul(mul(r, h), gru.u_h)), gru.b_h));
  // (1 - z) h + z c  ==  h + z (c - h)
  return add(h, mul(z, sub(candidate, h)));
}

Tensor gru_encode(const Tensor& features, const GruParams& gru) {
  Tensor seq = features;
  if (features.rank() == 2) seq = reshape(features, {1, features.dim(0), features.dim(1)});
  if (seq.rank() != 3) throw DimensionError("gru_encode: features must be (C x T) or (B x C x T)");
  const std::size_t steps = seq.dim(2);
  if (steps == 0) throw ContractError("gru_encode: empty sequence");
  Tensor h = Tensor::zeros({seq.dim(0), gru.u_z.dim(0)});
  for (std::size_t t = 0; t < steps; ++t) h = gru_step(h, time_step(seq, t), gru);
  return h;
}

Tensor head_predict(const Tensor& h_full, const Tensor& h_half, const Tensor& h_quarter, std::size_t step,
                    std::span<const OutputHead> heads) {
  if (step < 1 || step > heads.size()) {
    throw ContractError("head_predict: step " + std::to_string(step) + " outside 1.." + std::to_string(heads.size()));
  }
  const std::array<Tensor, 3> parts = {h_full, h_half, h_quarter};
  const OutputHead& head = heads[step - 1];
  return add_bias(matmul(concat_cols(parts), head.weight), head.bias);
}

Matrix ar_predict(const Matrix& window, const ArShortcut& shortcut) {
  const std::size_t lags = shortcut.weight.dim(0);
  const std::size_t horizon = shortcut.weight.dim(1);
  if (lags > window.rows()) {
    throw ContractError("ar_predict: AR window " + std::to_string(lags) + " exceeds input length " +
                        std::to_string(window.rows()));
  }
  const auto w = shortcut.weight.values();
  const auto b = shortcut.bias.values();
  const std::size_t first = window.rows() - lags;
  Matrix out(horizon, window.cols());
  for (std::size_t j = 0; j < window.cols(); ++j) {
    for (std::size_t t = 0; t < horizon; ++t) {
      double acc = 0.0;
      for (std::size_t a = 0; a < lags; ++a) acc += window(first + a, j) * w[a * horizon + t];
      out(t, j) = acc + b[t];
    }
  }
  return out;
}

BatchInputs make_batch_inputs(std::span<const Matrix> windows, const ForecasterConfig& config) {
  const std::size_t batch = windows.size();
  const std::size_t v = config.variables, steps = config.input_length, lags = config.ar_window;
  if (batch == 0) throw ContractError("make_batch_inputs: empty batch");
  BatchInputs in;
  in.batch = batch;
  std::array<std::vector<double>, 3> stream_values;
  std::vector<double> lag_values(batch * v * lags);
  for (std::size_t r = 0; r < 3; ++r) stream_values[r].resize(batch * v * (steps / kDownsampleFactors[r]));

  for (std::size_t b = 0; b < batch; ++b) {
    const Matrix& w = windows[b];
    if (w.rows() != steps || w.cols() != v) {
      throw DimensionError("forecast: window is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                           ", model expects " + std::to_string(steps) + "x" + std::to_string(v));
    }
    const MultiscaleInputs ms = multiscale_inputs(w);
    const std::array<const Matrix*, 3> levels = {&ms.full, &ms.half, &ms.quarter};
    for (std::size_t r = 0; r < 3; ++r) {
      const Matrix& m = *levels[r];
      const std::size_t len = m.rows();
      for (std::size_t j = 0; j < v; ++j)
        for (std::size_t t = 0; t < len; ++t) stream_values[r][(b * v + j) * len + t] = m(t, j);
    }
    for (std::size_t j = 0; j < v; ++j)
      for (std::size_t a = 0; a < lags; ++a) lag_values[(b * v + j) * lags + a] = w(steps - lags + a, j);
  }
  for (std::size_t r = 0; r < 3; ++r) {
    in.streams[r] = Tensor({batch, v, steps / kDownsampleFactors[r]}, std::move(stream_values[r]));
  }
  in.ar_lags = Tensor({batch * v, lags}, std::move(lag_values));
  return in;
}

Tensor nonlinear_forward(const BatchInputs& inputs, const ForecasterParams& params, const ForecasterConfig& config) {
  std::array<Tensor, 3> states;
  for (std::size_t r = 0; r < 3; ++r) {
    states[r] = gru_encode(conv_features(inputs.streams[r], params.streams[r]), params.streams[r].gru);
  }
  Tensor joined = concat_cols(states);
  std::vector<Tensor> steps;
  steps.reserve(config.horizon);
  for (std::size_t t = 0; t < config.horizon; ++t) {
    steps.push_back(add_bias(matmul(joined, params.heads[t].weight), params.heads[t].bias));
  }
  return concat_cols(steps);
}

Tensor ar_forward(const BatchInputs& inputs, const ArShortcut& shortcut, const ForecasterConfig& config) {
  const std::size_t batch = inputs.batch, v = config.variables, horizon = config.horizon;
  Tensor per_variable = add_bias(matmul(inputs.ar_lags, shortcut.weight), shortcut.bias);  // (B v) x L
  std::vector<std::size_t> idx(batch * horizon * v);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < horizon; ++t)
      for (std::size_t j = 0; j < v; ++j) idx[b * horizon * v + t * v + j] = (b * v + j) * horizon + t;
  return gather(per_variable, idx, {batch, horizon * v});
}

Tensor forward(const BatchInputs& inputs, const ForecasterParams& params, const ForecasterConfig& config) {
  Tensor out = nonlinear_forward(inputs, params, config);
  if (config.use_ar_shortcut) out = add(out, ar_forward(inputs, params.shortcut, config));
  return out;
}

Tensor stack_targets(std::span<const Matrix> targets) {
  if (targets.empty()) throw ContractError("stack_targets: empty batch");
  const std::size_t width = targets[0].size();
  std::vector<double> values;
  values.reserve(targets.size() * width);
  for (const Matrix& t : targets) {
    if (t.size() != width) throw DimensionError("stack_targets: targets differ in shape");
    values.insert(values.end(), t.data().begin(), t.data().end());
  }
  return Tensor({targets.size(), width}, std::move(values));
}

std::vector<Matrix> forecast_batch(std::span<const Matrix> windows, const ForecasterParams& params,
                                   const ForecasterConfig& config) {
  if (params.heads.size() != config.horizon) {
    throw ContractError("forecast: parameters have " + std::to_string(params.heads.size()) +
                        " heads, config horizon is " + std::to_string(config.horizon));
  }
  const Tensor out = forward(make_batch_inputs(windows, config), params, config);
  const std::size_t width = config.horizon * config.variables;
  std::vector<Matrix> result;
  result.reserve(windows.size());
  const auto values = out.values();
  for (std::size_t b = 0; b < windows.size(); ++b) {
    result.emplace_back(config.horizon, config.variables,
                        std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(b * width),
                                            values.begin() + static_cast<std::ptrdiff_t>((b + 1) * width)));
  }
  return result;
}

Matrix forecast(const Matrix& window, const ForecasterParams& params, const ForecasterConfig& config) {
  return forecast_batch(std::span<const Matrix>(&window, 1), params, config).front();
}

}  // namespace acrnn
