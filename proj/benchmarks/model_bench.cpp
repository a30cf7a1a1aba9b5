#include <benchmark/benchmark.h>

#include <random>

#include "acrnn/model.hpp"
#include "acrnn/tensor.hpp"

namespace {

acrnn::ForecasterConfig bench_config(std::size_t window) {
  acrnn::ForecasterConfig c;
  c.variables = 2;
  c.input_length = window;
  c.horizon = 1;
  c.filters = 16;
  c.kernel_size = 5;
  c.gru_hidden = 32;
  c.seed = 7;
  return c;
}

std::vector<acrnn::Matrix> random_windows(std::size_t count, std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> dist;
  std::vector<acrnn::Matrix> out;
  for (std::size_t i = 0; i < count; ++i) {
    acrnn::Matrix m(rows, cols);
    for (double& x : m.data()) x = dist(rng);
    out.push_back(std::move(m));
  }
  return out;
}

void BM_Forward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const acrnn::ForecasterConfig c = bench_config(32);
  const acrnn::ForecasterParams params = acrnn::init_forecaster(c);
  const auto inputs = acrnn::make_batch_inputs(random_windows(batch, 32, 2), c);
  for (auto _ : state) benchmark::DoNotOptimize(acrnn::forward(inputs, params, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(32);

void BM_ForwardBackward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const acrnn::ForecasterConfig c = bench_config(32);
  acrnn::ForecasterParams params = acrnn::init_forecaster(c);
  const auto inputs = acrnn::make_batch_inputs(random_windows(batch, 32, 2), c);
  const acrnn::Tensor targets = acrnn::stack_targets(random_windows(batch, 1, 2));
  for (auto _ : state) {
    acrnn::Tape tape;
    acrnn::Tape::Scope scope(tape);
    const acrnn::Tensor loss = acrnn::mse_loss(acrnn::forward(inputs, params, c), targets);
    tape.backward(loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(1)->Arg(32);

}  // namespace
