#include "acrnn_app/config.hpp"

#include <fstream>

#include "acrnn/errors.hpp"

namespace acrnn::app {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& obj, const char* key, T& target) {
  if (obj.contains(key) && !obj.at(key).is_null()) target = obj.at(key).get<T>();
}

void read_range(const json& obj, const char* key, double& lo, double& hi) {
  if (!obj.contains(key)) return;
  const json& r = obj.at(key);
  if (!r.is_array() || r.size() != 2) throw ContractError(std::string("config: '") + key + "' must be [lo, hi]");
  lo = r[0].get<double>();
  hi = r[1].get<double>();
}

std::optional<std::size_t> read_radius(const json& obj, std::optional<std::size_t> fallback) {
  if (!obj.contains("radius")) return fallback;
  const json& r = obj.at("radius");
  if (r.is_null()) return std::nullopt;
  return r.get<std::size_t>();
}

json radius_json(const std::optional<std::size_t>& r) { return r ? json(*r) : json(nullptr); }

std::string delimiter_name(char d) { return d == '\t' ? "\\t" : std::string(1, d); }

char parse_delimiter(const std::string& s) {
  if (s == "\\t" || s == "tab") return '\t';
  if (s == "space" || s == " ") return ' ';
  if (s.size() != 1) throw ContractError("config: delimiter must be a single character, got '" + s + "'");
  return s[0];
}

}  // namespace

RunConfig config_from_json(const json& input) {
  const json& doc = input.contains("config") && input.at("config").is_object() ? input.at("config") : input;
  if (!doc.is_object()) throw ContractError("config: top level must be a JSON object");
  RunConfig c;

  if (doc.contains("data")) {
    const json& d = doc.at("data");
    read(d, "path", c.data.path);
    if (d.contains("delimiter")) c.data.csv.delimiter = parse_delimiter(d.at("delimiter").get<std::string>());
    read(d, "header", c.data.csv.header);
    read(d, "skip_columns", c.data.csv.skip_columns);
    read(d, "columns", c.data.columns);
  }
  if (doc.contains("preprocess")) {
    const json& p = doc.at("preprocess");
    read(p, "normalize", c.preprocess.normalize);
    read(p, "smooth", c.preprocess.smooth);
    read(p, "smooth_size", c.preprocess.smooth_size);
    read(p, "smooth_std", c.preprocess.smooth_std);
    read(p, "stride", c.preprocess.stride);
  }
  if (doc.contains("model")) {
    const json& m = doc.at("model");
    read(m, "window", c.model.input_length);
    read(m, "horizon", c.model.horizon);
    read(m, "filters", c.model.filters);
    read(m, "kernel_size", c.model.kernel_size);
    read(m, "gru_hidden", c.model.gru_hidden);
    read(m, "ar_window", c.model.ar_window);
    read(m, "ar_shortcut", c.model.use_ar_shortcut);
    read(m, "seed", c.model.seed);
  }
  if (doc.contains("train")) {
    const json& t = doc.at("train");
    read(t, "learning_rate", c.train.learning_rate);
    read(t, "epochs", c.train.epochs);
    read(t, "batch_size", c.train.batch_size);
    read(t, "patience", c.train.patience);
    read(t, "beta1", c.train.beta1);
    read(t, "beta2", c.train.beta2);
    read(t, "epsilon", c.train.epsilon);
    read(t, "validation_fraction", c.train.validation_fraction);
    read(t, "seed", c.train.seed);
  }
  if (doc.contains("eval")) {
    const json& e = doc.at("eval");
    read(e, "folds", c.eval.folds);
    read(e, "horizons", c.eval.horizons);
    c.eval.radius = read_radius(e, c.eval.radius);
    read(e, "baselines", c.eval.baselines);
    read(e, "ridge_lambda", c.eval.ridge_lambda);
  }
  if (doc.contains("forecast")) {
    const json& f = doc.at("forecast");
    if (f.contains("start") && !f.at("start").is_null()) c.forecast.start = f.at("start").get<std::size_t>();
    read(f, "steps", c.forecast.steps);
  }
  if (doc.contains("synth")) {
    const json& s = doc.at("synth");
    read(s, "n_series", c.synth.n_series);
    read(s, "length", c.synth.length);
    read_range(s, "slope", c.synth.slope_min, c.synth.slope_max);
    read_range(s, "period", c.synth.period_min, c.synth.period_max);
    read_range(s, "amplitude", c.synth.amplitude_min, c.synth.amplitude_max);
    read(s, "noise_std", c.synth.noise_std);
    read(s, "seed", c.synth.seed);
  }
  if (doc.contains("ablate")) {
    const json& a = doc.at("ablate");
    read(a, "holdout_fraction", c.ablate.options.holdout_fraction);
    read(a, "forecast_steps", c.ablate.options.forecast_steps);
    read(a, "stride", c.ablate.options.stride);
    c.ablate.options.dtw_radius = read_radius(a, c.ablate.options.dtw_radius);
    read(a, "smooth", c.ablate.options.smooth);
    read(a, "smooth_size", c.ablate.options.smooth_size);
    read(a, "smooth_std", c.ablate.options.smooth_std);
    read(a, "seeds", c.ablate.seeds);
  }
  for (std::size_t b = 0; b < c.eval.baselines.size(); ++b) {
    const std::string& name = c.eval.baselines[b];
    if (name != "ridge" && name != "persistence") throw ContractError("config: unknown baseline '" + name + "'");
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json doc;
  doc["data"] = {{"path", c.data.path},
                 {"delimiter", delimiter_name(c.data.csv.delimiter)},
                 {"header", c.data.csv.header},
                 {"skip_columns", c.data.csv.skip_columns},
                 {"columns", c.data.columns}};
  doc["preprocess"] = {{"normalize", c.preprocess.normalize},
                       {"smooth", c.preprocess.smooth},
                       {"smooth_size", c.preprocess.smooth_size},
                       {"smooth_std", c.preprocess.smooth_std},
                       {"stride", c.preprocess.stride}};
  doc["model"] = {{"window", c.model.input_length},   {"horizon", c.model.horizon},
                  {"filters", c.model.filters},        {"kernel_size", c.model.kernel_size},
                  {"gru_hidden", c.model.gru_hidden},  {"ar_window", c.model.ar_window},
                  {"ar_shortcut", c.model.use_ar_shortcut}, {"seed", c.model.seed}};
  doc["train"] = {{"learning_rate", c.train.learning_rate},
                  {"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size},
                  {"patience", c.train.patience},
                  {"beta1", c.train.beta1},
                  {"beta2", c.train.beta2},
                  {"epsilon", c.train.epsilon},
                  {"validation_fraction", c.train.validation_fraction},
                  {"seed", c.train.seed}};
  doc["eval"] = {{"folds", c.eval.folds},
                 {"horizons", c.eval.horizons},
                 {"radius", radius_json(c.eval.radius)},
                 {"baselines", c.eval.baselines},
                 {"ridge_lambda", c.eval.ridge_lambda}};
  doc["forecast"] = {{"start", c.forecast.start ? json(*c.forecast.start) : json(nullptr)},
                     {"steps", c.forecast.steps}};
  doc["synth"] = {{"n_series", c.synth.n_series},
                  {"length", c.synth.length},
                  {"slope", {c.synth.slope_min, c.synth.slope_max}},
                  {"period", {c.synth.period_min, c.synth.period_max}},
                  {"amplitude", {c.synth.amplitude_min, c.synth.amplitude_max}},
                  {"noise_std", c.synth.noise_std},
                  {"seed", c.synth.seed}};
  doc["ablate"] = {{"holdout_fraction", c.ablate.options.holdout_fraction},
                   {"forecast_steps", c.ablate.options.forecast_steps},
                   {"stride", c.ablate.options.stride},
                   {"radius", radius_json(c.ablate.options.dtw_radius)},
                   {"smooth", c.ablate.options.smooth},
                   {"smooth_size", c.ablate.options.smooth_size},
                   {"smooth_std", c.ablate.options.smooth_std},
                   {"seeds", c.ablate.seeds}};
  return doc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw FormatError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace acrnn::app
