#pragma once

#include "smsd/core_model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smsd {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

struct CliConfig {
  std::string command;
  TrainConfig train;

  Index patch_size = 8;
  std::optional<Index> samples_per_image;

  std::filesystem::path run_dir = "run";
  std::filesystem::path corpus;       // training corpus (output of extract-patches)
  std::filesystem::path test_corpus;  // reconstruct / evaluate input
  std::vector<std::filesystem::path> images;
  std::filesystem::path phi;
  std::filesystem::path psi;
  std::filesystem::path diagnostics;  // diagnose input
  std::string label;                  // system name in reports
  Index window = 50;                  // diagnose smoothing window

  int verbosity = 1;
  int workers = 0;  // 0: library default
};

/// Verbs understood by run_cli.
const std::vector<std::string>& cli_commands();

/// args[0] is the verb, the rest are flags. Values come from, in increasing
/// priority: defaults, the JSON config file (`configFile` or --config), flags.
/// Throws UsageError naming the offending key.
CliConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::filesystem::path>& config_file = std::nullopt);

/// Full resolved configuration, camelCase keys, as written to the run directory.
std::string config_to_json(const CliConfig& config);

/// Runs one command; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace smsd
