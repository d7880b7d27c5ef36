#pragma once

#include "smsd/core_model.hpp"

#include <cstdint>
#include <vector>

namespace smsd {

/// Training dictionary [sqrt(gamma) Psi; Phi Psi], (N+M) x L.
struct StackedDictionary {
  Matrix matrix;
  double gamma = 0.0;
  std::uint64_t psi_hash = 0;
  std::uint64_t phi_hash = 0;
};

/// FNV-1a over the shape and raw bytes.
std::uint64_t matrix_hash(const Matrix& m);

StackedDictionary build_stacked(const Dictionary& psi, const Matrix& phi, double gamma);

/// Residuals at or below this fraction of the signal norm count as exact.
inline constexpr double kRelativeResidualFloor = 1e-12;

struct OmpOptions {
  Index sparsity = 1;
  double residual_tolerance = 0.0;
};

/// Greedy selection by |<d_j, r>| / ||d_j|| (lowest index wins ties), then a
/// least-squares refit on the unnormalized support via an updated QR.
/// Atoms whose addition would make the support rank-deficient are skipped
/// with a warning. Columns are coded in parallel when OpenMP is enabled;
/// the result does not depend on the schedule.
SparseCodeBatch omp(const Matrix& dict, const Matrix& signals, const OmpOptions& options);

/// Single-signal variant. If `residual_norms` is given it receives the
/// residual norm before the first selection and after every refit.
SparseCode omp_single(const Matrix& dict, const Vector& atom_inv_norms,
                      const Eigen::Ref<const Vector>& signal, const OmpOptions& options,
                      std::vector<double>* residual_norms = nullptr);

/// 1 / ||d_j||, or 0 for atoms with ||d_j|| <= kRankEpsilon * max_k ||d_k||
/// (never selected; such columns are zero up to roundoff).
Vector inverse_column_norms(const Matrix& dict);

/// Codes [sqrt(gamma) X; Phi X] against build_stacked(psi, phi, gamma).
SparseCodeBatch encode_train(const Matrix& batch, const Dictionary& psi,
                             const Matrix& phi, double gamma, Index sparsity);

struct DecodeResult {
  SparseCodeBatch codes;
  Matrix reconstructed;  // Psi * codes
};

/// Recovers signals from y = Phi x by OMP over the equivalent dictionary Phi Psi.
DecodeResult decode_measurements(const Matrix& measurements, const Dictionary& psi,
                                 const Matrix& phi, Index sparsity,
                                 double residual_tolerance = 0.0);

/// Psi * Theta for a sparse batch without densifying Theta.
Matrix synthesize(const Matrix& psi, const SparseCodeBatch& codes);

}  // namespace smsd
