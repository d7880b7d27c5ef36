#pragma once

#include "smsd/core_model.hpp"
#include "smsd/sensing_design.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

namespace smsd {

/// Selection counts per atom since the last replacement sweep.
struct AtomUsage {
  std::vector<std::int64_t> counts;
  std::int64_t last_reset_iteration = 0;
  std::int64_t signals_coded = 0;

  AtomUsage() = default;
  explicit AtomUsage(Index atom_count)
      : counts(static_cast<std::size_t>(atom_count), 0) {}

  void record(const SparseCodeBatch& codes);
  void reset(std::int64_t iteration);
  std::vector<Index> unused() const;
};

/// A_t = w A_{t-1} + Theta Theta^T / eta,  B_t = w B_{t-1} + X Theta^T / eta,
/// with w = (1 - 1/t)^rho (w = 1 when rho = 0).
SurrogateStats update_stats(const SurrogateStats& stats, const SparseCodeBatch& codes,
                            const Matrix& batch, std::int64_t t, double rho, Index eta);

/// 1/2 Tr(Psi^T Omega Psi A) - Tr(Psi^T Omega B), Omega = I + Phi^T Phi / gamma.
double surrogate_value(const Matrix& psi, const SurrogateStats& stats, const Matrix& phi,
                       double gamma);

/// Gradient of surrogate_value with respect to column j:
///   Psi a_j - b_j + (Phi^T Phi Psi a_j - Phi^T Phi b_j) / gamma
Vector surrogate_gradient_column(const Matrix& psi, const SurrogateStats& stats,
                                 const Matrix& phi, double gamma, Index j);

struct DictUpdateResult {
  Dictionary dictionary;
  std::vector<Index> stale_atoms;  // left unchanged; candidates for replacement
};

/// One block-coordinate sweep (repeated `passes` times) over the columns.
/// fixed-point:   u_j = psi_j + (b_j - Psi a_j) / A(j,j)
/// literal-paper: u_j = Xi1 [(b_j - Psi a_j)/A(j,j) + psi_j]
///                    + Xi2 [b_j/(A(j,j) gamma) + psi_j/gamma - Psi a_j/A(j,j)]
/// then psi_j = u_j / ||u_j||. `xi` is computed from `design` if omitted.
DictUpdateResult dictionary_update(const Dictionary& psi, const SurrogateStats& stats,
                                   const SensingDesign& design, double gamma, Index passes,
                                   UpdateMode mode, const XiMatrices* xi = nullptr);

namespace detail {

enum class ColumnProjection { unit_sphere, unit_ball };

/// A(j,j) at or below this leaves column j untouched.
double usage_threshold(const SurrogateStats& stats);

/// Pre-normalization candidate for column j given the current Psi, or
/// nullopt when the atom is stale.
std::optional<Vector> column_candidate(const Matrix& psi, const SurrogateStats& stats,
                                       Index j, UpdateMode mode, double gamma,
                                       const XiMatrices* xi);

/// In-place sweep used by dictionary_update; returns stale atoms.
std::vector<Index> update_columns(Matrix& psi, const SurrogateStats& stats, Index passes,
                                  UpdateMode mode, double gamma, const XiMatrices* xi,
                                  ColumnProjection projection);

}  // namespace detail

struct ReplacementResult {
  Dictionary dictionary;
  std::vector<Index> replaced;
};

/// Replaces every atom with zero usage (and every stale atom) by a uniformly
/// drawn, normalized column of `pool`, then resets the usage counters.
ReplacementResult replace_unused_atoms(const Dictionary& psi, AtomUsage& usage,
                                       const Matrix& pool, std::mt19937_64& rng,
                                       const std::vector<Index>& stale = {},
                                       std::int64_t iteration = 0);

struct Diagnostics {
  std::vector<std::int64_t> iteration;
  std::vector<double> batch_objective;
  std::vector<double> dict_diff;
  std::vector<Index> atoms_replaced;

  std::size_t size() const noexcept { return iteration.size(); }
  void push(std::int64_t it, double objective, double diff, Index replaced);
  void append(const Diagnostics& other, std::int64_t iteration_offset);
  void write_csv(const std::filesystem::path& path) const;
  static Diagnostics read_csv(const std::filesystem::path& path);
};

/// Trailing mean over `window` values; entry i averages values[i-window+1..i].
/// The first window-1 entries are omitted.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

/// Trailing maximum over `window` values, same alignment as moving_average.
std::vector<double> trailing_envelope(const std::vector<double>& values, std::size_t window);

/// 1/2 (gamma ||X - Psi Theta||^2 + ||Phi X - Phi Psi Theta||^2) / width
double batch_objective(const Matrix& batch, const Matrix& psi, const Matrix& phi,
                       const SparseCodeBatch& codes, double gamma);

struct OnlineResult {
  Dictionary dictionary;
  Diagnostics diagnostics;
  SurrogateStats stats;
};

/// Mini-batch learner: code each batch against [sqrt(gamma) Psi; Phi Psi],
/// fold the codes into (A, B), sweep the columns warm-started from the
/// previous dictionary, and periodically replace unused atoms.
OnlineResult train_dictionary_online(const Matrix& data, const SensingDesign& design,
                                     const Dictionary& psi0, const TrainConfig& config,
                                     std::mt19937_64& rng);
OnlineResult train_dictionary_online(const Matrix& data, const SensingDesign& design,
                                     const Dictionary& psi0, const TrainConfig& config);

/// Classical learner: the sensing matrix is disabled and gamma = 1.
OnlineResult train_dictionary_classic(const Matrix& data, const Dictionary& psi0,
                                      const TrainConfig& config, std::mt19937_64& rng);

}  // namespace smsd
