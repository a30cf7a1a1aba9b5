#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "acrnn/model.hpp"
#include "acrnn/preprocess.hpp"

namespace acrnn {

/// Everything needed to reproduce forecasts from a trained model.
///
/// On-disk format (text, UTF-8, '\n' line endings):
///
///     acrnn-checkpoint 1
///     config <key>=<value> ...            (ForecasterConfig fields)
///     meta <key> <value to end of line>   (zero or more)
///     variable <name to end of line>      (one per variable, optional)
///     norm <mean> <std> <constant 0|1>    (one per variable, optional)
///     tensor <name> <rank> <dims...>
///     <values separated by single spaces>
///     ...
///     end
///
/// Reals are written in shortest round-trip form, so save(load(save(x)))
/// reproduces the bytes of save(x).
struct Checkpoint {
  ForecasterConfig config;
  ForecasterParams params;
  std::vector<std::string> variable_names;
  std::vector<NormStats> norm_stats;
  std::map<std::string, std::string> metadata;
};

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);

}  // namespace acrnn
