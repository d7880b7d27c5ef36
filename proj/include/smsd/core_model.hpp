#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace smsd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative cutoff below which a singular value counts as zero.
inline constexpr double kRankEpsilon = 1e-10;

/// Tolerance on |norm - 1| for dictionary atoms.
inline constexpr double kUnitNormTolerance = 1e-9;

bool all_finite(const Matrix& m);

/// N x L matrix with unit-norm columns. Atoms are indexed from zero.
class Dictionary {
 public:
  Dictionary() = default;

  /// Validates the unit-norm invariant; throws InvalidInput otherwise.
  explicit Dictionary(Matrix atoms);

  /// Rescales every column to unit norm. Zero columns are rejected.
  static Dictionary normalized(Matrix raw);

  const Matrix& atoms() const noexcept { return atoms_; }
  Index signal_dim() const noexcept { return atoms_.rows(); }
  Index atom_count() const noexcept { return atoms_.cols(); }
  auto atom(Index j) const { return atoms_.col(j); }

 private:
  Matrix atoms_;
};

/// Throws InvalidInput if any column deviates from unit norm by more than
/// kUnitNormTolerance or any entry is non-finite.
void check_unit_columns(const Matrix& atoms);

struct ThinSvd {
  Matrix u;       // N x rank
  Vector lambda;  // rank, non-increasing, strictly positive
  Matrix v;       // L x rank
  Index rank = 0;
};

/// Thin SVD truncated to the numerical rank (values > kRankEpsilon * lambda_1).
ThinSvd svd_thin(const Matrix& m);

/// M x N sensing matrix together with the SVD factors of the dictionary it
/// was designed for. `svd_lambda` holds the values actually inverted, i.e.
/// after the conditioning floor.
struct SensingDesign {
  Matrix phi;
  Matrix svd_u;
  Vector svd_lambda;
  Index rank = 0;
  bool floored = false;

  Index measurements() const noexcept { return phi.rows(); }
  Index signal_dim() const noexcept { return phi.cols(); }

  /// Zero-row design: the projected-error term vanishes (classical learning).
  static SensingDesign disabled(Index signal_dim);
};

struct SparseCode {
  std::vector<Index> support;  // ascending
  std::vector<double> values;
};

struct SparseCodeBatch {
  Index atom_count = 0;
  Index sparsity = 0;
  std::vector<SparseCode> columns;

  Index column_count() const noexcept {
    return static_cast<Index>(columns.size());
  }
  Matrix to_dense() const;
};

/// Running second moments of the sparse codes (A) and data-code products (B).
struct SurrogateStats {
  Matrix a;  // L x L
  Matrix b;  // N x L
  std::int64_t t = 0;

  static SurrogateStats zero(Index signal_dim, Index atom_count);
};

enum class UpdateMode { fixed_point, literal_paper };

std::string to_string(UpdateMode mode);
UpdateMode parse_update_mode(const std::string& text);

struct TrainConfig {
  double gamma = 1.0 / 32.0;
  Index eta = 128;
  Index sparsity = 4;
  double rho = 2.0;
  Index iter_dic = 1000;
  Index iter_sendic = 10;
  Index measurements = 20;
  Index atoms = 256;
  std::uint64_t seed = 0;
  Index dict_update_passes = 1;
  UpdateMode update_mode = UpdateMode::fixed_point;
  bool mean_removal = false;
  Index replace_every = 100;
  double probe_fraction = 0.05;

  /// Throws InvalidConfig on out-of-range fields; warns when K > M.
  void validate() const;
};

}  // namespace smsd
