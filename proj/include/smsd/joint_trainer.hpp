#pragma once

#include "smsd/core_model.hpp"
#include "smsd/dict_learning.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace smsd {

/// gamma ||X - Psi Theta||_F^2 + ||Phi X - Phi Psi Theta||_F^2
double objective_smsd(const Matrix& data, const Matrix& psi, const Matrix& phi,
                      const SparseCodeBatch& codes, double gamma);

/// ||A - B||_F
double dictionary_diff(const Matrix& a, const Matrix& b);

/// L columns drawn without replacement from `data` (skipping zero columns),
/// normalized.
Dictionary sample_initial_dictionary(const Matrix& data, Index atom_count,
                                     std::mt19937_64& rng);

struct JointRunDiagnostics {
  std::vector<double> outer_objectives;  // sigma on the probe set, per probe column
  std::vector<double> outer_probe_psnr;  // decode PSNR on the probe set (dB)
  Diagnostics inner;                     // concatenated, global iteration numbers
  std::vector<Matrix> phi_snapshots;
  std::vector<Matrix> psi_snapshots;
};

struct JointOptions {
  /// Held-out columns for the outer diagnostics; when empty a probe_fraction
  /// slice of `data` is held out instead.
  std::optional<Matrix> probe;
  /// phi_i.smsd, psi_i.smsd, diagnostics.csv, train_config.json written here
  /// after every outer iteration.
  std::optional<std::filesystem::path> checkpoint_dir;
  bool keep_snapshots = false;
  /// Called after every outer iteration with (i, phi_i, psi_i).
  std::function<void(Index, const SensingDesign&, const Dictionary&)> on_outer;
};

struct JointResult {
  SensingDesign design;
  Dictionary dictionary;
  JointRunDiagnostics diagnostics;
};

/// Alternates the closed-form sensing design with the online dictionary
/// learner for config.iter_sendic outer iterations.
JointResult train_joint(const Matrix& data, const TrainConfig& config,
                        const std::optional<Dictionary>& psi0 = std::nullopt,
                        const JointOptions& options = {});

/// Writes the resolved training configuration as JSON.
void write_config_json(const TrainConfig& config, const std::filesystem::path& path);

}  // namespace smsd
