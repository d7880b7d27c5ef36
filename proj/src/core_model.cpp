#include "smsd/core_model.hpp"

#include "smsd/error.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <utility>

namespace smsd {

namespace {

std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(warning_mutex());
  if (warning_handler()) warning_handler()(message);
}

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex());
  return std::exchange(warning_handler(), std::move(handler));
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void check_unit_columns(const Matrix& atoms) {
  if (!atoms.allFinite()) throw InvalidInput("dictionary has non-finite entries");
  for (Index j = 0; j < atoms.cols(); ++j) {
    const double n = atoms.col(j).norm();
    if (std::abs(n - 1.0) > kUnitNormTolerance) {
      throw InvalidInput("dictionary atom " + std::to_string(j) +
                         " has norm " + std::to_string(n));
    }
  }
}

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  check_unit_columns(atoms_);
}

Dictionary Dictionary::normalized(Matrix raw) {
  if (!raw.allFinite()) throw InvalidInput("dictionary has non-finite entries");
  for (Index j = 0; j < raw.cols(); ++j) {
    const double n = raw.col(j).norm();
    if (n < 1e-12) {
      throw InvalidInput("cannot normalize zero atom " + std::to_string(j));
    }
    raw.col(j) /= n;
  }
  return Dictionary(std::move(raw));
}

ThinSvd svd_thin(const Matrix& m) {
  if (!m.allFinite()) throw InvalidInput("svd_thin: non-finite input");
  ThinSvd out;
  if (m.size() == 0) return out;

  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double cutoff = kRankEpsilon * s(0);
    while (rank < s.size() && s(rank) > cutoff) ++rank;
  }
  out.rank = rank;
  out.lambda = s.head(rank);
  out.u = svd.matrixU().leftCols(rank);
  out.v = svd.matrixV().leftCols(rank);
  return out;
}

SensingDesign SensingDesign::disabled(Index signal_dim) {
  SensingDesign d;
  d.phi = Matrix::Zero(0, signal_dim);
  d.svd_u = Matrix::Zero(signal_dim, 0);
  return d;
}

Matrix SparseCodeBatch::to_dense() const {
  Matrix out = Matrix::Zero(atom_count, column_count());
  for (Index k = 0; k < column_count(); ++k) {
    const auto& c = columns[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < c.support.size(); ++i) {
      out(c.support[i], k) = c.values[i];
    }
  }
  return out;
}

SurrogateStats SurrogateStats::zero(Index signal_dim, Index atom_count) {
  return {Matrix::Zero(atom_count, atom_count),
          Matrix::Zero(signal_dim, atom_count), 0};
}

std::string to_string(UpdateMode mode) {
  return mode == UpdateMode::fixed_point ? "fixed-point" : "literal-paper";
}

UpdateMode parse_update_mode(const std::string& text) {
  if (text == "fixed-point") return UpdateMode::fixed_point;
  if (text == "literal-paper") return UpdateMode::literal_paper;
  throw InvalidConfig("unknown update mode '" + text + "'");
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidConfig(what);
  };
  require(gamma > 0.0 && std::isfinite(gamma), "gamma must be positive");
  require(gamma <= 1.0, "gamma must not exceed 1");
  require(eta >= 1, "eta must be at least 1");
  require(sparsity >= 1, "K must be at least 1");
  require(rho >= 0.0 && std::isfinite(rho), "rho must be non-negative");
  require(iter_dic >= 1, "iterDic must be at least 1");
  require(iter_sendic >= 1, "iterSendic must be at least 1");
  require(measurements >= 1, "M must be at least 1");
  require(atoms >= 1, "L must be at least 1");
  require(dict_update_passes >= 1, "dictUpdatePasses must be at least 1");
  require(replace_every >= 0, "replaceEvery must be non-negative");
  require(probe_fraction >= 0.0 && probe_fraction < 1.0,
          "probeFraction must lie in [0, 1)");
  if (sparsity > measurements) {
    warn("K = " + std::to_string(sparsity) + " exceeds M = " +
         std::to_string(measurements));
  }
}

}  // namespace smsd
