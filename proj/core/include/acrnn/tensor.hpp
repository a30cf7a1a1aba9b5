#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace acrnn {

using Shape = std::vector<std::size_t>;

namespace detail {
struct TensorImpl {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // empty until a gradient is accumulated
  bool requires_grad = false;

  std::vector<double>& ensure_grad() {
    if (grad.empty()) grad.assign(values.size(), 0.0);
    return grad;
  }
};
}  // namespace detail

/// Dense row-major tensor of doubles with an optional gradient slot.
///
/// A Tensor is a shared handle: copies alias the same storage, so a
/// parameter captured by the tape and the one held by the optimizer are the
/// same object. Use clone() for an independent copy.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t i) const { return impl_->shape.at(i); }
  std::size_t size() const { return impl_->values.size(); }

  std::span<const double> values() const { return impl_->values; }
  /// Direct write access; only legal on tensors that are not part of a live tape.
  std::span<double> mutable_values() { return impl_->values; }
  double item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool flag) { impl_->requires_grad = flag; }

  bool has_grad() const { return !impl_->grad.empty(); }
  /// Gradient buffer; a tensor that never received a gradient reads as zeros.
  std::span<const double> grad() const;
  std::span<double> mutable_grad() { return impl_->ensure_grad(); }
  void zero_grad();

  /// Deep copy of the values; the copy carries no gradient and is off-tape.
  Tensor clone() const;
  /// Same values, no gradient tracking.
  Tensor detach() const { return clone(); }

  bool same_storage(const Tensor& other) const noexcept { return impl_ == other.impl_; }
  const std::shared_ptr<detail::TensorImpl>& impl() const noexcept { return impl_; }

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Records differentiable operations during a forward pass and replays them
/// in reverse to accumulate gradients.
///
/// Operations record onto the tape installed for the current thread by a
/// Tape::Scope, and only when at least one input requires gradients. Nodes are
/// appended in creation order, so every node's inputs precede it.
class Tape {
 public:
  using BackwardFn = std::function<void(std::span<const double> out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Installs a tape as the recording target of this thread for its lifetime.
  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  static Tape* current() noexcept;

  /// Appends a node. `output` becomes gradient-requiring.
  void record(const Tensor& output, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and sweeps the tape once in reverse.
  /// Throws ContractError if loss is not a scalar recorded on this tape.
  void backward(const Tensor& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  void clear() noexcept;

 private:
  struct Node {
    std::shared_ptr<detail::TensorImpl> output;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

enum class Activation { relu, sigmoid, tanh };

// Differentiable operations. Every op validates shapes and throws
// DimensionError naming the offending shapes.

/// (m x k) * (k x n).
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise product.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
/// x (m x n) plus bias (n) added to every row.
Tensor add_bias(const Tensor& x, const Tensor& bias);

/// relu'(0) is taken as 0.
Tensor pointwise(Activation op, const Tensor& x);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

/// Causal 1-D convolution. x is (C_in x T) or batched (B x C_in x T); w is
/// (C_out x C_in x K); b is (C_out). The input is left-padded with K-1 zeros
/// so the output has length T and output[t] only sees inputs at times <= t:
///   out[c, t] = b[c] + sum_{i,k} w[c, i, k] * x[i, t + k - (K - 1)].
Tensor causal_conv1d(const Tensor& x, const Tensor& w, const Tensor& b);

/// out.values[i] = x.values[indices[i]]; the backward pass scatter-adds.
/// Covers reshapes, permutations and slices.
Tensor gather(const Tensor& x, std::span<const std::size_t> indices, Shape out_shape);
Tensor reshape(const Tensor& x, Shape shape);
/// Column slice [:, :, t] of a (B x C x T) tensor, as (B x C).
Tensor time_step(const Tensor& x, std::size_t t);
/// Concatenates rank-2 tensors with equal row counts along columns.
Tensor concat_cols(std::span<const Tensor> parts);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// Mean over all entries of the squared difference.
Tensor mse_loss(const Tensor& pred, const Tensor& target);

/// Central-difference gradient of f with respect to theta. theta is perturbed
/// in place coordinate by coordinate and restored afterwards, so f may read
/// theta through any alias. Throws NumericError on a non-finite f value.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, Tensor& theta,
                        double eps);

}  // namespace acrnn
