#include "acrnn/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "acrnn/errors.hpp"

namespace acrnn {

namespace {

thread_local Tape* g_current_tape = nullptr;

using ImplPtr = std::shared_ptr<detail::TensorImpl>;

std::size_t shape_product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tape* recording_tape(std::initializer_list<const Tensor*> inputs) {
  Tape* tape = Tape::current();
  if (tape == nullptr) return nullptr;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return tape;
  }
  return nullptr;
}

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw DimensionError(std::string(op) + ": undefined tensor");
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require_defined(a, op);
  require_defined(b, op);
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

// Accumulates into the gradient of `target` when it participates in differentiation.
template <typename F>
void accumulate(const ImplPtr& target, F&& body) {
  if (!target->requires_grad) return;
  body(target->ensure_grad());
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  if (shape_product(shape) != values.size()) {
    throw DimensionError("Tensor: shape " + shape_string(shape) + " needs " +
                         std::to_string(shape_product(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  impl_->shape = std::move(shape);
  impl_->values = std::move(values);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor({1}, {value}, requires_grad);
}

double Tensor::item() const {
  if (size() != 1) throw ContractError("Tensor::item: tensor of shape " + shape_string(shape()) + " is not a scalar");
  return impl_->values[0];
}

std::span<const double> Tensor::grad() const {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->values.size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() {
  if (!impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::clone() const { return Tensor(impl_->shape, impl_->values, false); }

// ---------------------------------------------------------------------------
// Tape

Tape::Scope::Scope(Tape& tape) : previous_(g_current_tape) { g_current_tape = &tape; }
Tape::Scope::~Scope() { g_current_tape = previous_; }

Tape* Tape::current() noexcept { return g_current_tape; }

void Tape::record(const Tensor& output, BackwardFn backward) {
  output.impl()->requires_grad = true;
  nodes_.push_back(Node{output.impl(), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " +
                        (loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
  }
  if (consumed_) throw ContractError("backward: tape has already been swept; record a new pass");
  std::size_t end = nodes_.size();
  while (end > 0 && nodes_[end - 1].output != loss.impl()) --end;
  if (end == 0) throw ContractError("backward: loss is not connected to this tape");

  auto& seed = loss.impl()->ensure_grad();
  seed[0] = 1.0;
  for (std::size_t i = end; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.output->grad.empty()) continue;  // not on any path to the loss
    node.backward(node.output->grad);
  }
  consumed_ = true;
}

void Tape::clear() noexcept {
  nodes_.clear();
  consumed_ = false;
}

// ---------------------------------------------------------------------------
// Linear algebra

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined(a, "matmul");
  require_defined(b, "matmul");
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a.shape()) + " by " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  Tensor result({m, n}, std::move(out));
  if (Tape* tape = recording_tape({&a, &b})) {
    tape->record(result, [ai = a.impl(), bi = b.impl(), m, k, n](std::span<const double> g) {
      accumulate(ai, [&](std::vector<double>& ga) {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bi->values[p * n + j];
            ga[i * k + p] += acc;
          }
      });
      accumulate(bi, [&](std::vector<double>& gb) {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai->values[i * k + p];
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
          }
      });
    });
  }
  return result;
}

namespace {

template <typename Fwd>
Tensor elementwise_binary(const Tensor& a, const Tensor& b, const char* op, Fwd fwd,
                          double da_sign, double db_sign, bool product) {
  require_same_shape(a, b, op);
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i], bv[i]);
  Tensor result(a.shape(), std::move(out));
  if (Tape* tape = recording_tape({&a, &b})) {
    tape->record(result, [ai = a.impl(), bi = b.impl(), da_sign, db_sign,
                          product](std::span<const double> g) {
      accumulate(ai, [&](std::vector<double>& ga) {
        for (std::size_t i = 0; i < g.size(); ++i)
          ga[i] += product ? g[i] * bi->values[i] : da_sign * g[i];
      });
      accumulate(bi, [&](std::vector<double>& gb) {
        for (std::size_t i = 0; i < g.size(); ++i)
          gb[i] += product ? g[i] * ai->values[i] : db_sign * g[i];
      });
    });
  }
  return result;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise_binary(a, b, "add", [](double x, double y) { return x + y; }, 1.0, 1.0, false);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise_binary(a, b, "sub", [](double x, double y) { return x - y; }, 1.0, -1.0, false);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise_binary(a, b, "mul", [](double x, double y) { return x * y; }, 0.0, 0.0, true);
}

Tensor scale(const Tensor& a, double factor) {
  require_defined(a, "scale");
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& x : out) x *= factor;
  Tensor result(a.shape(), std::move(out));
  if (Tape* tape = recording_tape({&a})) {
    tape->record(result, [ai = a.impl(), factor](std::span<const double> g) {
      accumulate(ai, [&](std::vector<double>& ga) {
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
      });
    });
  }
  return result;
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_defined(x, "add_bias");
  require_defined(bias, "add_bias");
  if (x.rank() != 2 || bias.size() != x.dim(1)) {
    throw DimensionError("add_bias: cannot add bias " + shape_string(bias.shape()) + " to rows of " +
                         shape_string(x.shape()));
  }
  const std::size_t m = x.dim(0), n = x.dim(1);
  std::vector<double> out(x.values().begin(), x.values().end());
  const auto bv = bias.values();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += bv[j];
  Tensor result(x.shape(), std::move(out));
  if (Tape* tape = recording_tape({&x, &bias})) {
    tape->record(result, [xi = x.impl(), bi = bias.impl(), m, n](std::span<const double> g) {
      accumulate(xi, [&](std::vector<double>& gx) {
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
      });
      accumulate(bi, [&](std::vector<double>& gb) {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
      });
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Activations

Tensor pointwise(Activation op, const Tensor& x) {
  require_defined(x, "pointwise");
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  switch (op) {
    case Activation::relu:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) {
        // Split by sign so exp never overflows.
        const double v = xv[i];
        if (v >= 0.0) {
          out[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
          const double e = std::exp(v);
          out[i] = e / (1.0 + e);
        }
      }
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xv[i]);
      break;
  }
  Tensor result(x.shape(), std::move(out));
  if (Tape* tape = recording_tape({&x})) {
    tape->record(result, [op, xi = x.impl(), yi = std::weak_ptr(result.impl())](std::span<const double> g) {
      const auto y = yi.lock();
      accumulate(xi, [&](std::vector<double>& gx) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double yv = y->values[i];
          switch (op) {
            case Activation::relu:
              gx[i] += xi->values[i] > 0.0 ? g[i] : 0.0;
              break;
            case Activation::sigmoid:
              gx[i] += g[i] * yv * (1.0 - yv);
              break;
            case Activation::tanh:
              gx[i] += g[i] * (1.0 - yv * yv);
              break;
          }
        }
      });
    });
  }
  return result;
}

Tensor relu(const Tensor& x) { return pointwise(Activation::relu, x); }
Tensor sigmoid(const Tensor& x) { return pointwise(Activation::sigmoid, x); }
Tensor tanh(const Tensor& x) { return pointwise(Activation::tanh, x); }

// ---------------------------------------------------------------------------
// Convolution

Tensor causal_conv1d(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_defined(x, "causal_conv1d");
  require_defined(w, "causal_conv1d");
  require_defined(b, "causal_conv1d");
  if ((x.rank() != 2 && x.rank() != 3) || w.rank() != 3 || b.rank() != 1) {
    throw DimensionError("causal_conv1d: expected x (C_in x T) or (B x C_in x T), w (C_out x C_in x K), "
                         "b (C_out); got x " + shape_string(x.shape()) + ", w " +
                         shape_string(w.shape()) + ", b " + shape_string(b.shape()));
  }
  const bool batched = x.rank() == 3;
  const std::size_t batch = batched ? x.dim(0) : 1;
  const std::size_t c_in = x.dim(batched ? 1 : 0);
  const std::size_t steps = x.dim(batched ? 2 : 1);
  const std::size_t c_out = w.dim(0);
  const std::size_t kernel = w.dim(2);
  if (x.size() == 0 || c_in == 0 || steps == 0 || c_out == 0 || kernel == 0) {
    throw DimensionError("causal_conv1d: empty input or zero channels, x " + shape_string(x.shape()) +
                         ", w " + shape_string(w.shape()));
  }
  if (w.dim(1) != c_in || b.dim(0) != c_out) {
    throw DimensionError("causal_conv1d: x " + shape_string(x.shape()) + " incompatible with w " +
                         shape_string(w.shape()) + " and b " + shape_string(b.shape()));
  }

  const auto xv = x.values();
  const auto wv = w.values();
  const auto bv = b.values();
  std::vector<double> out(batch * c_out * steps);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t c = 0; c < c_out; ++c) {
      double* orow = out.data() + (n * c_out + c) * steps;
      std::fill(orow, orow + steps, bv[c]);
      for (std::size_t i = 0; i < c_in; ++i) {
        const double* xrow = xv.data() + (n * c_in + i) * steps;
        for (std::size_t k = 0; k < kernel; ++k) {
          const double wk = wv[(c * c_in + i) * kernel + k];
          const std::size_t shift = kernel - 1 - k;  // tap k looks `shift` steps back
          for (std::size_t t = shift; t < steps; ++t) orow[t] += wk * xrow[t - shift];
        }
      }
    }
  }

  Shape out_shape = batched ? Shape{batch, c_out, steps} : Shape{c_out, steps};
  Tensor result(std::move(out_shape), std::move(out));
  if (Tape* tape = recording_tape({&x, &w, &b})) {
    tape->record(result, [xi = x.impl(), wi = w.impl(), bi = b.impl(), batch, c_in, c_out, steps,
                          kernel](std::span<const double> g) {
      accumulate(bi, [&](std::vector<double>& gb) {
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t c = 0; c < c_out; ++c) {
            const double* grow = g.data() + (n * c_out + c) * steps;
            double acc = 0.0;
            for (std::size_t t = 0; t < steps; ++t) acc += grow[t];
            gb[c] += acc;
          }
      });
      accumulate(wi, [&](std::vector<double>& gw) {
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t c = 0; c < c_out; ++c) {
            const double* grow = g.data() + (n * c_out + c) * steps;
            for (std::size_t i = 0; i < c_in; ++i) {
              const double* xrow = xi->values.data() + (n * c_in + i) * steps;
              for (std::size_t k = 0; k < kernel; ++k) {
                const std::size_t shift = kernel - 1 - k;
                double acc = 0.0;
                for (std::size_t t = shift; t < steps; ++t) acc += grow[t] * xrow[t - shift];
                gw[(c * c_in + i) * kernel + k] += acc;
              }
            }
          }
      });
      accumulate(xi, [&](std::vector<double>& gx) {
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t c = 0; c < c_out; ++c) {
            const double* grow = g.data() + (n * c_out + c) * steps;
            for (std::size_t i = 0; i < c_in; ++i) {
              double* gxrow = gx.data() + (n * c_in + i) * steps;
              for (std::size_t k = 0; k < kernel; ++k) {
                const double wk = wi->values[(c * c_in + i) * kernel + k];
                const std::size_t shift = kernel - 1 - k;
                for (std::size_t t = shift; t < steps; ++t) gxrow[t - shift] += wk * grow[t];
              }
            }
          }
      });
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Indexing

Tensor gather(const Tensor& x, std::span<const std::size_t> indices, Shape out_shape) {
  require_defined(x, "gather");
  if (shape_product(out_shape) != indices.size()) {
    throw DimensionError("gather: " + std::to_string(indices.size()) + " indices cannot fill shape " +
                         shape_string(out_shape));
  }
  const auto xv = x.values();
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= xv.size()) {
      throw DimensionError("gather: index " + std::to_string(indices[i]) + " out of range for " +
                           shape_string(x.shape()));
    }
    out[i] = xv[indices[i]];
  }
  Tensor result(std::move(out_shape), std::move(out));
  if (Tape* tape = recording_tape({&x})) {
    tape->record(result, [xi = x.impl(), idx = std::vector<std::size_t>(indices.begin(), indices.end())](
                             std::span<const double> g) {
      accumulate(xi, [&](std::vector<double>& gx) {
        for (std::size_t i = 0; i < idx.size(); ++i) gx[idx[i]] += g[i];
      });
    });
  }
  return result;
}

Tensor reshape(const Tensor& x, Shape shape) {
  require_defined(x, "reshape");
  if (shape_product(shape) != x.size()) {
    throw DimensionError("reshape: cannot view " + shape_string(x.shape()) + " as " + shape_string(shape));
  }
  Tensor result(std::move(shape), std::vector<double>(x.values().begin(), x.values().end()));
  if (Tape* tape = recording_tape({&x})) {
    tape->record(result, [xi = x.impl()](std::span<const double> g) {
      accumulate(xi, [&](std::vector<double>& gx) {
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
      });
    });
  }
  return result;
}

Tensor time_step(const Tensor& x, std::size_t t) {
  require_defined(x, "time_step");
  if (x.rank() != 3 || t >= x.dim(2)) {
    throw DimensionError("time_step: step " + std::to_string(t) + " invalid for " + shape_string(x.shape()));
  }
  const std::size_t batch = x.dim(0), channels = x.dim(1), steps = x.dim(2);
  std::vector<std::size_t> idx(batch * channels);
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t c = 0; c < channels; ++c) idx[n * channels + c] = (n * channels + c) * steps + t;
  return gather(x, idx, {batch, channels});
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: nothing to concatenate");
  const std::size_t rows = parts[0].dim(0);
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    require_defined(p, "concat_cols");
    if (p.rank() != 2 || p.dim(0) != rows) {
      throw DimensionError("concat_cols: " + shape_string(p.shape()) + " does not have " +
                           std::to_string(rows) + " rows");
    }
    total += p.dim(1);
  }
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  std::vector<std::size_t> offsets;
  for (const Tensor& p : parts) {
    offsets.push_back(offset);
    const std::size_t w = p.dim(1);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < w; ++c) out[r * total + offset + c] = p.values()[r * w + c];
    offset += w;
  }
  Tensor result({rows, total}, std::move(out));
  Tape* tape = Tape::current();
  bool any = false;
  for (const Tensor& p : parts) any = any || p.requires_grad();
  if (tape != nullptr && any) {
    std::vector<ImplPtr> impls;
    for (const Tensor& p : parts) impls.push_back(p.impl());
    tape->record(result, [impls = std::move(impls), offsets = std::move(offsets), rows,
                          total](std::span<const double> g) {
      for (std::size_t k = 0; k < impls.size(); ++k) {
        const std::size_t w = impls[k]->shape[1];
        accumulate(impls[k], [&](std::vector<double>& gp) {
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < w; ++c) gp[r * w + c] += g[r * total + offsets[k] + c];
        });
      }
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reductions

Tensor sum(const Tensor& x) {
  require_defined(x, "sum");
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  Tensor result = Tensor::scalar(acc);
  if (Tape* tape = recording_tape({&x})) {
    tape->record(result, [xi = x.impl()](std::span<const double> g) {
      accumulate(xi, [&](std::vector<double>& gx) {
        for (double& v : gx) v += g[0];
      });
    });
  }
  return result;
}

Tensor mean(const Tensor& x) {
  require_defined(x, "mean");
  if (x.size() == 0) throw DimensionError("mean: empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.defined() || !target.defined() || pred.shape() != target.shape()) {
    throw ContractError("mse_loss: prediction " +
                        (pred.defined() ? shape_string(pred.shape()) : std::string("<undefined>")) +
                        " and target " +
                        (target.defined() ? shape_string(target.shape()) : std::string("<undefined>")) +
                        " differ in shape");
  }
  if (pred.size() == 0) throw ContractError("mse_loss: empty prediction");
  const auto pv = pred.values();
  const auto tv = target.values();
  const double inv_n = 1.0 / static_cast<double>(pv.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - tv[i];
    acc += d * d;
  }
  Tensor result = Tensor::scalar(acc * inv_n);
  if (Tape* tape = recording_tape({&pred, &target})) {
    tape->record(result, [pi = pred.impl(), ti = target.impl(), inv_n](std::span<const double> g) {
      const double coef = 2.0 * inv_n * g[0];
      accumulate(pi, [&](std::vector<double>& gp) {
        for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += coef * (pi->values[i] - ti->values[i]);
      });
      accumulate(ti, [&](std::vector<double>& gt) {
        for (std::size_t i = 0; i < gt.size(); ++i) gt[i] -= coef * (pi->values[i] - ti->values[i]);
      });
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Finite differences

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, Tensor& theta, double eps) {
  if (!(eps > 0.0)) throw ContractError("finite_diff_grad: eps must be positive");
  require_defined(theta, "finite_diff_grad");
  auto values = theta.mutable_values();
  std::vector<double> grad(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double original = values[i];
    values[i] = original + eps;
    const double up = f(theta);
    values[i] = original - eps;
    const double down = f(theta);
    values[i] = original;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_diff_grad: non-finite function value at coordinate " + std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * eps);
  }
  return Tensor(theta.shape(), std::move(grad));
}

}  // namespace acrnn
