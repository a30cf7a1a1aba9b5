#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace acrnn::app {

/// Entry point of the `acrnn` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime failure and 2 on a usage error.
///
/// Subcommands: ingest-check, train, evaluate, crossval, forecast, synth-gen,
/// synth-ablate. Every subcommand writes manifest.json into --out-dir.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace acrnn::app
