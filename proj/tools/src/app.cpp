#include "acrnn_app/app.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>

#include "acrnn/checkpoint.hpp"
#include "acrnn/csv.hpp"
#include "acrnn/errors.hpp"
#include "acrnn/metrics.hpp"
#include "acrnn/preprocess.hpp"
#include "acrnn/synth.hpp"
#include "acrnn/train.hpp"
#include "acrnn_app/config.hpp"
#include "acrnn_app/report.hpp"

namespace acrnn::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256: init failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

namespace {

struct Flags {
  std::string config;
  std::string data;
  std::string checkpoint;
  std::string out_dir = "acrnn-out";
  std::string delimiter;
  std::uint64_t seed = 0;
  std::size_t window = 0;
  std::size_t horizon = 0;
  std::size_t folds = 0;
  std::size_t radius = 0;
  std::size_t start = 0;
  std::size_t steps = 0;
  std::size_t seeds = 0;
  std::size_t skip_columns = 0;
  int epochs = 0;
  bool no_ar_shortcut = false;
  bool no_header = false;
  bool exact_dtw = false;
};

// Tracks outputs, inputs and timings of one invocation.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args)
      : command_(std::move(command)), args_(std::move(args)), started_(std::chrono::steady_clock::now()) {}

  void input(const fs::path& path) { inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}}); }
  void artifact(const fs::path& path) { artifacts_.push_back(path.string()); }

  template <typename F>
  auto timed(const std::string& phase, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      timings_[phase] += elapsed(t0);
    } else {
      auto result = body();
      timings_[phase] += elapsed(t0);
      return result;
    }
  }

  void write(const fs::path& out_dir, const RunConfig& config) {
    timings_["total"] = elapsed(started_);
    json doc;
    doc["tool"] = "acrnn";
    doc["manifest_version"] = 1;
    doc["command"] = command_;
    doc["arguments"] = args_;
    doc["config"] = config_to_json(config);
    doc["seeds"] = {{"model", config.model.seed}, {"train", config.train.seed}, {"synth", config.synth.seed}};
    doc["inputs"] = inputs_;
    const fs::path path = out_dir / "manifest.json";
    artifacts_.push_back(path.string());
    doc["artifacts"] = artifacts_;
    doc["timings_seconds"] = timings_;
    std::ofstream out(path);
    out << doc.dump(2) << '\n';
  }

 private:
  static double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  std::string command_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point started_;
  std::vector<json> inputs_;
  std::vector<std::string> artifacts_;
  std::map<std::string, double> timings_;
};

std::ofstream open_output(const fs::path& path, Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  manifest.artifact(path);
  return out;
}

SeriesFrame load_frame(const RunConfig& cfg, Manifest& manifest) {
  if (cfg.data.path.empty()) throw ContractError("no input data: pass --data or set data.path in the config");
  SeriesFrame frame = ingest_csv(cfg.data.path, cfg.data.csv);
  manifest.input(cfg.data.path);
  if (cfg.data.columns.empty()) return frame;

  SeriesFrame selected;
  selected.data = Matrix(frame.length(), cfg.data.columns.size());
  for (std::size_t k = 0; k < cfg.data.columns.size(); ++k) {
    const auto it = std::find(frame.names.begin(), frame.names.end(), cfg.data.columns[k]);
    if (it == frame.names.end()) throw ContractError("column '" + cfg.data.columns[k] + "' not found in " + cfg.data.path);
    selected.data.set_col(k, frame.data.col(static_cast<std::size_t>(it - frame.names.begin())));
    selected.names.push_back(cfg.data.columns[k]);
  }
  return selected;
}

/// Normalization (fitted on the whole series unless stats are supplied), then smoothing.
SeriesFrame preprocess(const SeriesFrame& raw, const PreprocessConfig& p, std::vector<NormStats>* stats) {
  SeriesFrame frame = raw;
  if (p.normalize) {
    if (stats->empty()) *stats = fit_normalizer(frame);
    frame = apply_normalizer(frame, *stats);
  }
  if (p.smooth) frame = gaussian_smooth(frame, p.smooth_size, p.smooth_std);
  return frame;
}

// Preprocessing recorded in a checkpoint so evaluate/forecast repeat it exactly.
void store_preprocess(Checkpoint& ck, const PreprocessConfig& p) {
  ck.metadata["preprocess.normalize"] = p.normalize ? "1" : "0";
  ck.metadata["preprocess.smooth"] = p.smooth ? "1" : "0";
  ck.metadata["preprocess.smooth_size"] = std::to_string(p.smooth_size);
  ck.metadata["preprocess.smooth_std"] = format_real(p.smooth_std);
  ck.metadata["preprocess.stride"] = std::to_string(p.stride);
}

PreprocessConfig stored_preprocess(const Checkpoint& ck) {
  auto get = [&](const std::string& key) {
    const auto it = ck.metadata.find(key);
    if (it == ck.metadata.end()) throw FormatError("checkpoint: missing metadata '" + key + "'");
    return it->second;
  };
  PreprocessConfig p;
  p.normalize = get("preprocess.normalize") == "1";
  p.smooth = get("preprocess.smooth") == "1";
  p.smooth_size = std::stoi(get("preprocess.smooth_size"));
  p.smooth_std = std::stod(get("preprocess.smooth_std"));
  p.stride = std::stoul(get("preprocess.stride"));
  return p;
}

// ---------------------------------------------------------------------------

int cmd_ingest_check(const RunConfig& cfg, const fs::path& out_dir, Manifest& manifest, std::ostream& out) {
  const SeriesFrame frame = load_frame(cfg, manifest);
  const std::vector<NormStats> stats = fit_normalizer(frame);
  auto table = open_output(out_dir / "ingest.tsv", manifest);
  table << "variable\tmean\tstd\tmin\tmax\tconstant\n";
  for (std::size_t c = 0; c < frame.variables(); ++c) {
    const std::vector<double> col = frame.data.col(c);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    table << frame.names[c] << '\t' << number_cell(stats[c].mean) << '\t' << number_cell(stats[c].constant ? 0.0 : stats[c].std)
          << '\t' << number_cell(*lo) << '\t' << number_cell(*hi) << '\t' << (stats[c].constant ? "yes" : "no") << '\n';
  }
  out << cfg.data.path << ": " << frame.length() << " rows, " << frame.variables() << " variables\n";
  for (std::size_t c = 0; c < frame.variables(); ++c) {
    if (stats[c].constant) out << "warning: variable '" << frame.names[c] << "' is constant\n";
  }
  return 0;
}

int cmd_train(const RunConfig& cfg, const fs::path& out_dir, Manifest& manifest, std::ostream& out) {
  const SeriesFrame raw = load_frame(cfg, manifest);
  std::vector<NormStats> stats;
  const SeriesFrame frame = manifest.timed("preprocess", [&] { return preprocess(raw, cfg.preprocess, &stats); });

  ForecasterConfig model = cfg.model;
  model.variables = frame.variables();
  const auto windows = build_windows(frame.data, model.input_length, model.horizon, cfg.preprocess.stride);
  const TrainResult result = manifest.timed("train", [&] { return train_model(windows, model, cfg.train); });

  Checkpoint ck;
  ck.config = model;
  ck.params = result.params;
  ck.variable_names = frame.names;
  ck.norm_stats = stats;
  store_preprocess(ck, cfg.preprocess);
  ck.metadata["train.validation_fraction"] = format_real(cfg.train.validation_fraction);
  ck.metadata["train.best_epoch"] = std::to_string(result.best_epoch);
  ck.metadata["train.best_val_mse"] = format_real(result.best_val_loss);
  const fs::path ck_path = out_dir / "model.ckpt";
  save_checkpoint(ck_path, ck);
  manifest.artifact(ck_path);

  auto history = open_output(out_dir / "history.tsv", manifest);
  write_history(history, result.history);

  out << "trained on " << windows.size() << " windows, " << result.history.size() << " epochs; best epoch "
      << result.best_epoch << " validation mse " << format_real(result.best_val_loss) << '\n';
  out << "checkpoint: " << ck_path.string() << '\n';
  return 0;
}

int cmd_evaluate(RunConfig cfg, const fs::path& checkpoint, const fs::path& out_dir, Manifest& manifest,
                 std::ostream& out) {
  if (checkpoint.empty()) throw ContractError("evaluate needs --checkpoint");
  const Checkpoint ck = load_checkpoint(checkpoint);
  manifest.input(checkpoint);
  cfg.preprocess = stored_preprocess(ck);
  cfg.model = ck.config;
  const SeriesFrame raw = load_frame(cfg, manifest);
  if (raw.variables() != ck.config.variables) {
    throw ContractError("data has " + std::to_string(raw.variables()) + " variables, checkpoint expects " +
                        std::to_string(ck.config.variables));
  }
  std::vector<NormStats> stats = ck.norm_stats;
  const SeriesFrame frame = preprocess(raw, cfg.preprocess, &stats);
  const auto windows = build_windows(frame.data, ck.config.input_length, ck.config.horizon, cfg.preprocess.stride);

  const auto vf = ck.metadata.find("train.validation_fraction");
  const double fraction = vf != ck.metadata.end() ? std::stod(vf->second) : cfg.train.validation_fraction;
  const ValidationSplit split = split_validation(windows.size(), fraction);
  const std::span<const ForecastWindow> all(windows);
  const auto val = split.val_count > 0 ? all.subspan(split.train_count) : all;

  auto mae_of = [&](std::span<const ForecastWindow> ws) {
    double total = 0.0;
    for (const ForecastWindow& w : ws) total += mae_metric(forecast(w.input, ck.params, ck.config), w.target);
    return total / static_cast<double>(ws.size());
  };
  const double val_mse = evaluate_mse(val, ck.params, ck.config);
  const double all_mse = evaluate_mse(all, ck.params, ck.config);

  auto table = open_output(out_dir / "evaluation.tsv", manifest);
  table << "split\twindows\tmse\tmae\n";
  table << "validation\t" << val.size() << '\t' << format_real(val_mse) << '\t' << format_real(mae_of(val)) << '\n';
  table << "all\t" << all.size() << '\t' << format_real(all_mse) << '\t' << format_real(mae_of(all)) << '\n';

  out << "validation mse " << format_real(val_mse);
  const auto recorded = ck.metadata.find("train.best_val_mse");
  if (recorded != ck.metadata.end()) out << " (recorded at training: " << recorded->second << ")";
  out << "\nall-window mse " << format_real(all_mse) << '\n';
  return 0;
}

int cmd_crossval(const RunConfig& cfg, const fs::path& out_dir, Manifest& manifest, std::ostream& out) {
  const SeriesFrame raw = load_frame(cfg, manifest);
  std::vector<NormStats> stats;
  const SeriesFrame frame = preprocess(raw, cfg.preprocess, &stats);

  CrossValOptions options;
  options.folds = cfg.eval.folds;
  options.input_length = cfg.model.input_length;
  options.horizons = cfg.eval.horizons;
  options.stride = cfg.preprocess.stride;
  options.dtw_radius = cfg.eval.radius;

  std::vector<EvalReport> reports;
  reports.push_back(manifest.timed("crossval.acrnn", [&] { return cross_validate(frame, cfg.model, cfg.train, options); }));
  for (const std::string& name : cfg.eval.baselines) {
    const Candidate candidate = name == "ridge" ? ridge_candidate(cfg.eval.ridge_lambda) : persistence_candidate();
    reports.push_back(manifest.timed("crossval." + name, [&] { return evaluate_candidate(frame, candidate, options); }));
  }
  auto table = open_output(out_dir / "metrics.tsv", manifest);
  write_metrics_table(table, reports);
  write_metrics_table(out, reports);
  return 0;
}

int cmd_forecast(RunConfig cfg, const fs::path& checkpoint, const fs::path& out_dir, Manifest& manifest,
                 std::ostream& out) {
  if (checkpoint.empty()) throw ContractError("forecast needs --checkpoint");
  const Checkpoint ck = load_checkpoint(checkpoint);
  manifest.input(checkpoint);
  cfg.preprocess = stored_preprocess(ck);
  cfg.model = ck.config;
  const SeriesFrame raw = load_frame(cfg, manifest);
  std::vector<NormStats> stats = ck.norm_stats;
  const SeriesFrame frame = preprocess(raw, cfg.preprocess, &stats);

  const std::size_t start = cfg.forecast.start.value_or(frame.length());
  Matrix pred = sliding_forecast(ck.params, ck.config, frame.data, start, cfg.forecast.steps);
  if (cfg.preprocess.normalize) pred = invert_normalizer(pred, stats);

  std::vector<TraceRecord> records;
  for (std::size_t r = 0; r < pred.rows(); ++r)
    for (std::size_t c = 0; c < pred.cols(); ++c)
      records.push_back({static_cast<long>(start + r), frame.names[c], pred(r, c)});
  auto trace = open_output(out_dir / "forecast.tsv", manifest);
  write_trace(trace, records);
  out << "forecast " << pred.rows() << " steps from row " << start << " -> " << (out_dir / "forecast.tsv").string()
      << '\n';
  return 0;
}

int cmd_synth_gen(const RunConfig& cfg, const fs::path& out_dir, Manifest& manifest, std::ostream& out) {
  const std::vector<SynthSeries> corpus = generate(cfg.synth);
  const fs::path csv = out_dir / "corpus.csv";
  write_csv(csv, corpus_frame(corpus));
  manifest.artifact(csv);

  auto params = open_output(out_dir / "components.tsv", manifest);
  params << "series\tslope\tamplitude\tperiod\tphase\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    params << "series_" << (i + 1) << '\t' << format_real(corpus[i].slope) << '\t' << format_real(corpus[i].amplitude)
           << '\t' << format_real(corpus[i].period) << '\t' << format_real(corpus[i].phase) << '\n';
  }
  std::vector<TraceRecord> records;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string name = "series_" + std::to_string(i + 1);
    for (std::size_t t = 0; t < corpus[i].values.size(); ++t) {
      records.push_back({static_cast<long>(t), name + "/trend", corpus[i].trend[t]});
      records.push_back({static_cast<long>(t), name + "/periodic", corpus[i].periodic[t]});
      records.push_back({static_cast<long>(t), name + "/noise", corpus[i].noise[t]});
    }
  }
  auto trace = open_output(out_dir / "components_trace.tsv", manifest);
  write_trace(trace, records);
  out << "wrote " << corpus.size() << " series of length " << cfg.synth.length << " to " << csv.string() << '\n';
  return 0;
}

int cmd_synth_ablate(const RunConfig& cfg, const fs::path& out_dir, Manifest& manifest, std::ostream& out) {
  auto table = open_output(out_dir / "ablation.tsv", manifest);
  table << "seed\tarm\tmse\tdtw\n";
  std::vector<double> mse_with, mse_without, dtw_with, dtw_without;
  std::vector<TraceRecord> records;
  std::size_t wins = 0;
  for (std::size_t s = 0; s < cfg.ablate.seeds; ++s) {
    SynthSpec spec = cfg.synth;
    spec.seed = cfg.synth.seed + s;
    ForecasterConfig model = cfg.model;
    model.variables = 1;
    model.seed = cfg.model.seed + s;
    TrainConfig train = cfg.train;
    train.seed = cfg.train.seed + s;
    const AblationResult r =
        manifest.timed("ablate", [&] { return ablation_run(spec, model, train, cfg.ablate.options); });

    table << spec.seed << "\twith_shortcut\t" << number_cell(r.first.mse) << '\t' << number_cell(r.first.dtw) << '\n';
    table << spec.seed << "\twithout_shortcut\t" << number_cell(r.second.mse) << '\t' << number_cell(r.second.dtw) << '\n';
    mse_with.push_back(r.first.mse);
    mse_without.push_back(r.second.mse);
    dtw_with.push_back(r.first.dtw);
    dtw_without.push_back(r.second.dtw);
    if (r.first.mse < r.second.mse) ++wins;

    // Trace of the first held-out series, original units.
    const std::string prefix = "seed" + std::to_string(spec.seed) + "/";
    auto denorm = [&](double x) { return x * r.norm.std + r.norm.mean; };
    const Matrix& truth = r.truth.front();
    for (std::size_t t = 0; t < truth.rows(); ++t) records.push_back({static_cast<long>(t), prefix + "truth", denorm(truth(t, 0))});
    for (std::size_t t = 0; t < r.first.forecasts.front().rows(); ++t) {
      const long step = static_cast<long>(r.forecast_start + t);
      records.push_back({step, prefix + "with_shortcut", denorm(r.first.forecasts.front()(t, 0))});
      records.push_back({step, prefix + "without_shortcut", denorm(r.second.forecasts.front()(t, 0))});
    }
  }
  const MetricSummary mw = summarize("mse", mse_with), mo = summarize("mse", mse_without);
  const MetricSummary dw = summarize("dtw", dtw_with), dn = summarize("dtw", dtw_without);
  auto summary = open_output(out_dir / "ablation_summary.tsv", manifest);
  summary << "arm\tmse\tdtw\tseeds_better_mse\n";
  summary << "with_shortcut\t" << mean_std_cell(mw.mean, mw.std) << '\t' << mean_std_cell(dw.mean, dw.std) << '\t' << wins
          << '\n';
  summary << "without_shortcut\t" << mean_std_cell(mo.mean, mo.std) << '\t' << mean_std_cell(dn.mean, dn.std) << '\t'
          << (cfg.ablate.seeds - wins) << '\n';
  auto trace = open_output(out_dir / "trace.tsv", manifest);
  write_trace(trace, records);

  out << "shortcut arm lower multi-step mse in " << wins << " of " << cfg.ablate.seeds << " seeds\n";
  out << "with shortcut:    mse " << mean_std_cell(mw.mean, mw.std) << "  dtw " << mean_std_cell(dw.mean, dw.std) << '\n';
  out << "without shortcut: mse " << mean_std_cell(mo.mean, mo.std) << "  dtw " << mean_std_cell(dn.mean, dn.std) << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"acrnn: convolutional-recurrent time-series forecaster with a linear autoregressive shortcut", "acrnn"};
  app.require_subcommand(1);
  Flags f;

  struct Options {
    CLI::Option* seed = nullptr;
    CLI::Option* window = nullptr;
    CLI::Option* horizon = nullptr;
    CLI::Option* folds = nullptr;
    CLI::Option* radius = nullptr;
    CLI::Option* start = nullptr;
    CLI::Option* steps = nullptr;
    CLI::Option* seeds = nullptr;
    CLI::Option* epochs = nullptr;
    CLI::Option* delimiter = nullptr;
    CLI::Option* skip = nullptr;
  };
  std::map<CLI::App*, Options> options;

  auto add_common = [&](CLI::App* sub, bool takes_data) {
    Options o;
    sub->add_option("--config", f.config, "JSON run configuration (or a manifest.json from an earlier run)");
    sub->add_option("--out-dir", f.out_dir, "Directory for result files")->capture_default_str();
    o.seed = sub->add_option("--seed", f.seed, "Seed for model init, batch order and synthetic data");
    o.window = sub->add_option("--window", f.window, "Input window length T (multiple of 4)");
    o.horizon = sub->add_option("--horizon", f.horizon, "Forecast horizon L");
    o.epochs = sub->add_option("--epochs", f.epochs, "Training epochs");
    sub->add_flag("--no-ar-shortcut", f.no_ar_shortcut, "Disable the linear autoregressive shortcut");
    if (takes_data) {
      sub->add_option("--data", f.data, "Delimiter-separated numeric input file");
      o.delimiter = sub->add_option("--delimiter", f.delimiter, "Field delimiter (',', ';', 'tab', 'space')");
      sub->add_flag("--no-header", f.no_header, "Input has no header row");
      o.skip = sub->add_option("--skip-columns", f.skip_columns, "Leading non-numeric columns to drop (e.g. timestamps)");
    }
    options[sub] = o;
    return sub;
  };

  add_common(app.add_subcommand("ingest-check", "Parse a data file and report per-variable statistics"), true);
  add_common(app.add_subcommand("train", "Train a model on a data file and save a checkpoint"), true);
  auto* evaluate = add_common(app.add_subcommand("evaluate", "Score a checkpoint on a data file"), true);
  auto* crossval = add_common(app.add_subcommand("crossval", "Blocked k-fold cross-validation"), true);
  auto* fcast = add_common(app.add_subcommand("forecast", "Sliding-window forecast from a checkpoint"), true);
  add_common(app.add_subcommand("synth-gen", "Write a synthetic trend + seasonality corpus"), false);
  auto* synth_ablate =
      add_common(app.add_subcommand("synth-ablate", "Train with and without the shortcut on synthetic data"), false);

  for (CLI::App* sub : {evaluate, fcast}) sub->add_option("--checkpoint", f.checkpoint, "Checkpoint written by train");
  for (CLI::App* sub : {crossval, synth_ablate}) {
    options[sub].radius = sub->add_option("--radius", f.radius, "FastDTW radius");
    sub->add_flag("--exact-dtw", f.exact_dtw, "Use exact DTW instead of FastDTW");
  }
  options[crossval].folds = crossval->add_option("--folds", f.folds, "Number of cross-validation folds");
  options[fcast].start = fcast->add_option("--start", f.start, "Row at which forecasting starts (default: end of data)");
  options[fcast].steps = fcast->add_option("--steps", f.steps, "Number of steps to forecast");
  options[synth_ablate].seeds = synth_ablate->add_option("--seeds", f.seeds, "Number of paired seeds");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Options& o = options[sub];
  RunConfig cfg;
  try {
    if (!f.config.empty()) cfg = load_config(f.config);
    if (!f.data.empty()) cfg.data.path = f.data;
    if (o.delimiter && o.delimiter->count()) {
      cfg.data.csv.delimiter = f.delimiter == "tab" || f.delimiter == "\\t" ? '\t'
                               : f.delimiter == "space"                    ? ' '
                                                                           : f.delimiter.at(0);
    }
    if (f.no_header) cfg.data.csv.header = false;
    if (o.skip && o.skip->count()) cfg.data.csv.skip_columns = f.skip_columns;
    if (o.seed->count()) cfg.model.seed = cfg.train.seed = cfg.synth.seed = f.seed;
    if (o.window->count()) cfg.model.input_length = f.window;
    if (o.horizon->count()) cfg.model.horizon = f.horizon;
    if (o.epochs->count()) cfg.train.epochs = f.epochs;
    if (f.no_ar_shortcut) cfg.model.use_ar_shortcut = false;
    if (o.folds && o.folds->count()) cfg.eval.folds = f.folds;
    if (o.radius && o.radius->count()) cfg.eval.radius = cfg.ablate.options.dtw_radius = f.radius;
    if (f.exact_dtw) cfg.eval.radius = cfg.ablate.options.dtw_radius = std::nullopt;
    if (o.start && o.start->count()) cfg.forecast.start = f.start;
    if (o.steps && o.steps->count()) cfg.forecast.steps = f.steps;
    if (o.seeds && o.seeds->count()) cfg.ablate.seeds = f.seeds;
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  const fs::path out_dir = f.out_dir;
  Manifest manifest(sub->get_name(), args);
  try {
    cfg.model.validate();
    cfg.train.validate();
    fs::create_directories(out_dir);
    int status = 0;
    const std::string& name = sub->get_name();
    if (name == "ingest-check") status = cmd_ingest_check(cfg, out_dir, manifest, out);
    else if (name == "train") status = cmd_train(cfg, out_dir, manifest, out);
    else if (name == "evaluate") status = cmd_evaluate(cfg, f.checkpoint, out_dir, manifest, out);
    else if (name == "crossval") status = cmd_crossval(cfg, out_dir, manifest, out);
    else if (name == "forecast") status = cmd_forecast(cfg, f.checkpoint, out_dir, manifest, out);
    else if (name == "synth-gen") status = cmd_synth_gen(cfg, out_dir, manifest, out);
    else if (name == "synth-ablate") status = cmd_synth_ablate(cfg, out_dir, manifest, out);
    manifest.write(out_dir, cfg);
    return status;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace acrnn::app
