#include "acrnn/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "acrnn/errors.hpp"

namespace acrnn {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kMagic = "acrnn-checkpoint";

double parse_real(std::string_view token) {
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw FormatError("checkpoint: invalid number '" + std::string(token) + "'");
  }
  return value;
}

std::size_t parse_size(const std::string& token) {
  std::size_t value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw FormatError("checkpoint: invalid integer '" + token + "'");
  }
  return value;
}

std::string rest_of_line(std::istringstream& line) {
  std::string rest;
  std::getline(line >> std::ws, rest);
  return rest;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const ForecasterConfig& c = ck.config;
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "config variables=" << c.variables << " input_length=" << c.input_length << " horizon=" << c.horizon
      << " filters=" << c.filters << " kernel_size=" << c.kernel_size << " gru_hidden=" << c.gru_hidden
      << " ar_window=" << c.ar_window << " use_ar_shortcut=" << (c.use_ar_shortcut ? 1 : 0) << " seed=" << c.seed
      << '\n';
  for (const auto& [key, value] : ck.metadata) out << "meta " << key << ' ' << value << '\n';
  for (const std::string& name : ck.variable_names) out << "variable " << name << '\n';
  for (const NormStats& s : ck.norm_stats) {
    out << "norm " << format_real(s.mean) << ' ' << format_real(s.std) << ' ' << (s.constant ? 1 : 0) << '\n';
  }
  for (const NamedTensor& nt : ck.params.named()) {
    out << "tensor " << nt.name << ' ' << nt.tensor.rank();
    for (std::size_t d : nt.tensor.shape()) out << ' ' << d;
    out << '\n';
    const auto values = nt.tensor.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) out << ' ';
      out << format_real(values[i]);
    }
    out << '\n';
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("checkpoint: empty input");
  {
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    header >> magic >> version;
    if (magic != kMagic) throw FormatError("checkpoint: not an acrnn checkpoint");
    if (version != kCheckpointVersion) {
      throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    }
  }

  Checkpoint ck;
  bool have_config = false;
  std::map<std::string, Tensor> tensors;
  bool ended = false;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    if (kind == "config") {
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw FormatError("checkpoint: malformed config entry '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::size_t value = parse_size(kv.substr(eq + 1));
        ForecasterConfig& c = ck.config;
        if (key == "variables") c.variables = value;
        else if (key == "input_length") c.input_length = value;
        else if (key == "horizon") c.horizon = value;
        else if (key == "filters") c.filters = value;
        else if (key == "kernel_size") c.kernel_size = value;
        else if (key == "gru_hidden") c.gru_hidden = value;
        else if (key == "ar_window") c.ar_window = value;
        else if (key == "use_ar_shortcut") c.use_ar_shortcut = value != 0;
        else if (key == "seed") c.seed = value;
        else throw FormatError("checkpoint: unknown config key '" + key + "'");
      }
      have_config = true;
    } else if (kind == "meta") {
      std::string key;
      fields >> key;
      ck.metadata[key] = rest_of_line(fields);
    } else if (kind == "variable") {
      ck.variable_names.push_back(rest_of_line(fields));
    } else if (kind == "norm") {
      std::string mean, std, constant;
      fields >> mean >> std >> constant;
      ck.norm_stats.push_back({parse_real(mean), parse_real(std), constant == "1"});
    } else if (kind == "tensor") {
      std::string name, token;
      fields >> name >> token;
      const std::size_t rank = parse_size(token);
      Shape shape(rank);
      std::size_t count = 1;
      for (std::size_t& d : shape) {
        fields >> token;
        d = parse_size(token);
        count *= d;
      }
      std::string data;
      if (!std::getline(in, data)) throw FormatError("checkpoint: missing values for tensor " + name);
      std::vector<double> values;
      values.reserve(count);
      std::istringstream tokens(data);
      while (tokens >> token) values.push_back(parse_real(token));
      if (values.size() != count) {
        throw FormatError("checkpoint: tensor " + name + " expects " + std::to_string(count) + " values, found " +
                          std::to_string(values.size()));
      }
      tensors.emplace(name, Tensor(std::move(shape), std::move(values), true));
    } else if (kind == "end") {
      ended = true;
      break;
    } else if (!kind.empty()) {
      throw FormatError("checkpoint: unknown record '" + kind + "'");
    }
  }
  if (!have_config) throw FormatError("checkpoint: missing config record");
  if (!ended) throw FormatError("checkpoint: truncated file (no end record)");
  ck.config.validate();

  // Rebuild the parameter structure from a fresh init, then overwrite every tensor.
  ck.params = init_forecaster(ck.config);
  for (NamedTensor& nt : ck.params.named()) {
    auto it = tensors.find(nt.name);
    if (it == tensors.end()) throw FormatError("checkpoint: missing tensor " + nt.name);
    if (it->second.shape() != nt.tensor.shape()) {
      throw FormatError("checkpoint: tensor " + nt.name + " has shape " + shape_string(it->second.shape()) +
                        ", config implies " + shape_string(nt.tensor.shape()));
    }
    std::copy(it->second.values().begin(), it->second.values().end(), nt.tensor.mutable_values().begin());
    tensors.erase(it);
  }
  if (!tensors.empty()) throw FormatError("checkpoint: unexpected tensor " + tensors.begin()->first);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, checkpoint);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace acrnn
