#include <gtest/gtest.h>

#include "acrnn/errors.hpp"
#include "acrnn/metrics.hpp"
#include "acrnn/synth.hpp"
#include "support.hpp"

using namespace acrnn;
using acrnn::testing::bit_identical;

namespace {

ForecasterConfig tiny_model() {
  ForecasterConfig c;
  c.input_length = 12;
  c.filters = 3;
  c.kernel_size = 3;
  c.gru_hidden = 4;
  c.seed = 1;
  return c;
}

TrainConfig tiny_train(int epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 32;
  t.learning_rate = 1e-2;
  return t;
}

SynthSpec small_spec() {
  SynthSpec s;
  s.n_series = 6;
  s.length = 40;
  s.seed = 2;
  return s;
}

}  // namespace

TEST(Generate, DefaultsAndDeterminism) {
  const SynthSpec spec;
  const auto a = generate(spec);
  ASSERT_EQ(a.size(), 80u);
  for (const SynthSeries& s : a) EXPECT_EQ(s.values.size(), 120u);
  const auto b = generate(spec);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(bit_identical(a[i].values, b[i].values));
  SynthSpec other = spec;
  other.seed = 1;
  EXPECT_FALSE(bit_identical(generate(other)[0].values, a[0].values));
}

TEST(Generate, ComponentsSumExactlyAndFollowTheForm) {
  const auto corpus = generate(SynthSpec{});
  for (const SynthSeries& s : corpus) {
    EXPECT_GE(s.slope, -0.05);
    EXPECT_LE(s.slope, 0.05);
    EXPECT_GE(s.period, 8.0);
    EXPECT_LE(s.period, 30.0);
    EXPECT_GE(s.amplitude, 0.5);
    EXPECT_LE(s.amplitude, 2.0);
    for (std::size_t t = 0; t < s.values.size(); ++t) {
      EXPECT_EQ(s.values[t], s.trend[t] + s.periodic[t] + s.noise[t]);
      EXPECT_NEAR(s.trend[t], s.slope * t, 1e-15);
      EXPECT_NEAR(s.periodic[t], s.amplitude * std::sin(2 * M_PI * t / s.period + s.phase), 1e-12);
    }
  }
}

TEST(Generate, LooseMagnitudeBound) {
  const SynthSpec spec;
  for (const SynthSeries& s : generate(spec)) {
    const double bound = std::abs(s.slope) * spec.length + spec.amplitude_max + 6 * spec.noise_std;
    for (double x : s.values) EXPECT_LE(std::abs(x), bound);
  }
}

TEST(Generate, NoiseFreeSpecHasNoNoise) {
  SynthSpec spec = small_spec();
  spec.noise_std = 0.0;
  for (const SynthSeries& s : generate(spec))
    for (double e : s.noise) EXPECT_EQ(e, 0.0);
}

TEST(Generate, RejectsDegenerateSpecs) {
  SynthSpec s;
  s.length = 7;
  EXPECT_THROW(generate(s), ContractError);
  s = SynthSpec{};
  s.period_min = 40;
  EXPECT_THROW(generate(s), ContractError);
  s = SynthSpec{};
  s.noise_std = -1;
  EXPECT_THROW(generate(s), ContractError);
  s = SynthSpec{};
  s.slope_min = 1;
  s.slope_max = 0;
  EXPECT_THROW(generate(s), ContractError);
}

TEST(CorpusFrame, OneColumnPerSeries) {
  const auto corpus = generate(small_spec());
  const SeriesFrame f = corpus_frame(corpus);
  EXPECT_EQ(f.variables(), 6u);
  EXPECT_EQ(f.length(), 40u);
  EXPECT_EQ(f.names.front(), "series_1");
  EXPECT_EQ(f.data(5, 2), corpus[2].values[5]);
}

TEST(Ablation, IdenticalArmsGiveIdenticalReports) {
  ForecasterConfig c = tiny_model();
  c.use_ar_shortcut = true;
  AblationOptions o;
  o.forecast_steps = 10;
  const AblationResult r = ablation_run(small_spec(), c, c, tiny_train(3), o);
  EXPECT_EQ(r.first.mse, r.second.mse);
  EXPECT_EQ(r.first.dtw, r.second.dtw);
  ASSERT_EQ(r.first.forecasts.size(), r.heldout.size());
  for (std::size_t i = 0; i < r.heldout.size(); ++i)
    EXPECT_TRUE(bit_identical(r.first.forecasts[i].data(), r.second.forecasts[i].data()));
}

TEST(Ablation, ScoresMatchTheirForecasts) {
  AblationOptions o;
  o.forecast_steps = 10;
  o.dtw_radius = std::nullopt;
  const AblationResult r = ablation_run(small_spec(), tiny_model(), tiny_train(2), o);
  EXPECT_TRUE(r.first.config.use_ar_shortcut);
  EXPECT_FALSE(r.second.config.use_ar_shortcut);
  EXPECT_EQ(r.forecast_start, 30u);
  EXPECT_EQ(r.heldout, (std::vector<std::size_t>{5}));
  for (const ArmResult* arm : {&r.first, &r.second}) {
    const Matrix truth = r.truth[0].slice_rows(30, 10);
    EXPECT_NEAR(arm->mse, mse_metric(arm->forecasts[0], truth), 1e-15);
    EXPECT_NEAR(arm->dtw, dtw_exact(arm->forecasts[0].col(0), truth.col(0)), 1e-12);
  }
}

TEST(Ablation, ShortcutSolvesNoiseFreeTrends) {
  SynthSpec spec = small_spec();
  spec.n_series = 10;
  spec.amplitude_min = spec.amplitude_max = 0.0;
  spec.noise_std = 0.0;
  AblationOptions o;
  o.forecast_steps = 10;
  ForecasterConfig c = tiny_model();
  TrainConfig t = tiny_train(300);
  t.batch_size = 16;
  t.learning_rate = 3e-3;
  t.patience = 300;
  const AblationResult r = ablation_run(spec, c, t, o);
  EXPECT_LT(r.first.mse, 1e-2);
  EXPECT_LT(r.first.mse, r.second.mse);

  // Least-squares oracle: on a straight line, two-point extrapolation is exact.
  for (const Matrix& truth : r.truth) {
    const double slope = truth(1, 0) - truth(0, 0);
    for (std::size_t i = 2; i < truth.rows(); ++i) EXPECT_NEAR(truth(i, 0), truth(i - 1, 0) + slope, 1e-12);
  }
}

TEST(Ablation, Validation) {
  ForecasterConfig two = tiny_model();
  two.variables = 2;
  EXPECT_THROW(ablation_run(small_spec(), two, tiny_train(1), AblationOptions{}), ContractError);
  AblationOptions o;
  o.forecast_steps = 35;
  EXPECT_THROW(ablation_run(small_spec(), tiny_model(), tiny_train(1), o), ContractError);
}
