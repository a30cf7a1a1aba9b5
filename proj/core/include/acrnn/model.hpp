#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acrnn/matrix.hpp"
#include "acrnn/tensor.hpp"

namespace acrnn {

/// Hyperparameters of the convolutional-recurrent forecaster.
struct ForecasterConfig {
  std::size_t variables = 1;      // v
  std::size_t input_length = 64;  // T, multiple of 4
  std::size_t horizon = 1;        // L
  std::size_t filters = 32;       // conv filters per layer
  std::size_t kernel_size = 7;
  std::size_t gru_hidden = 64;
  std::size_t ar_window = 5;  // lags fed to the linear shortcut
  bool use_ar_shortcut = true;
  std::uint64_t seed = 0;

  /// Throws ContractError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ForecasterConfig&, const ForecasterConfig&) = default;
};

/// Input resolutions, in the order their hidden states are concatenated.
enum class Resolution : std::size_t { full = 0, half = 1, quarter = 2 };
inline constexpr std::array<std::size_t, 3> kDownsampleFactors = {1, 2, 4};

struct ConvLayer {
  Tensor weight;  // C_out x C_in x K
  Tensor bias;    // C_out
};

/// GRU weights laid out for row-vector inputs: gate = sigma(x W + h U + b),
/// W is (input x H), U is (H x H).
struct GruParams {
  Tensor w_z, u_z, b_z;
  Tensor w_r, u_r, b_r;
  Tensor w_h, u_h, b_h;
};

/// Two causal conv layers and a GRU for one resolution.
struct StreamParams {
  ConvLayer conv1;  // N_f x v x K
  ConvLayer conv2;  // N_f x N_f x K
  GruParams gru;
};

/// Affine map from the concatenated final hidden states to one output step.
struct OutputHead {
  Tensor weight;  // 3H x v
  Tensor bias;    // v
};

/// Linear autoregressive shortcut shared by every variable.
struct ArShortcut {
  Tensor weight;  // ar_window x L
  Tensor bias;    // L
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct ForecasterParams {
  std::array<StreamParams, 3> streams;
  std::vector<OutputHead> heads;  // one per output step
  ArShortcut shortcut;

  /// Every learnable tensor in a fixed order, with stable dotted names
  /// ("full.conv1.weight", "head3.bias", "shortcut.weight", ...).
  std::vector<NamedTensor> named() const;
  std::vector<Tensor> tensors() const;
  /// Independent deep copy with gradient tracking enabled.
  ForecasterParams clone() const;
};

/// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))) and zero
/// biases, drawn from a generator seeded with config.seed.
ForecasterParams init_forecaster(const ForecasterConfig& config);

/// Closed-form count of learnable scalars:
///   3 * [N_f v K + N_f + N_f^2 K + N_f + 3 (N_f H + H^2 + H)] + L (3 H v + v) + A L + L
std::size_t parameter_count(const ForecasterConfig& config);
/// Count obtained by summing the sizes of the tensors actually allocated.
std::size_t parameter_count(const ForecasterParams& params);

/// Full, half and quarter resolution copies of a (T x v) input block.
struct MultiscaleInputs {
  Matrix full;     // T x v
  Matrix half;     // T/2 x v
  Matrix quarter;  // T/4 x v
};
MultiscaleInputs multiscale_inputs(const Matrix& input);

/// relu(conv2(relu(conv1(x)))). x is (v x T_r) or (B x v x T_r).
Tensor conv_features(const Tensor& x, const StreamParams& stream);

/// One GRU update on a batch of rows: h (B x H), x (B x input).
///   z = sigma(x W_z + h U_z + b_z), r = sigma(x W_r + h U_r + b_r)
///   c = tanh(x W_h + (r * h) U_h + b_h), h' = (1 - z) * h + z * c
Tensor gru_step(const Tensor& h, const Tensor& x, const GruParams& gru);

/// Runs the GRU from a zero state over the time axis of `features`
/// ((C x T_r) or (B x C x T_r)) and returns the final state (B x H).
Tensor gru_encode(const Tensor& features, const GruParams& gru);

/// Output of head `step` (1-based) on the [full, half, quarter] concatenation.
Tensor head_predict(const Tensor& h_full, const Tensor& h_half, const Tensor& h_quarter, std::size_t step,
                    std::span<const OutputHead> heads);

/// Shortcut forecast for one window (T x v) -> (L x v): the last ar_window
/// values of each variable times the shared weight, plus the shared bias.
Matrix ar_predict(const Matrix& window, const ArShortcut& shortcut);

/// Differentiable inputs for a batch of windows.
struct BatchInputs {
  std::size_t batch = 0;
  std::array<Tensor, 3> streams;  // B x v x T_r per resolution
  Tensor ar_lags;                 // (B v) x ar_window, row b * v + j
};
BatchInputs make_batch_inputs(std::span<const Matrix> windows, const ForecasterConfig& config);

/// Nonlinear path for a batch: B x (L v), column t * v + j.
Tensor nonlinear_forward(const BatchInputs& inputs, const ForecasterParams& params, const ForecasterConfig& config);
/// Shortcut path for a batch: B x (L v), same layout.
Tensor ar_forward(const BatchInputs& inputs, const ArShortcut& shortcut, const ForecasterConfig& config);
/// Sum of both paths (or the nonlinear path alone when the shortcut is disabled).
Tensor forward(const BatchInputs& inputs, const ForecasterParams& params, const ForecasterConfig& config);

/// Flattens L x v targets into the B x (L v) layout produced by forward().
Tensor stack_targets(std::span<const Matrix> targets);

/// Forecast for one window: (T x v) -> (L x v).
Matrix forecast(const Matrix& window, const ForecasterParams& params, const ForecasterConfig& config);
std::vector<Matrix> forecast_batch(std::span<const Matrix> windows, const ForecasterParams& params,
                                   const ForecasterConfig& config);

}  // namespace acrnn
