#include "smsd/sparse_coding.hpp"

#include "smsd/error.hpp"
#include "smsd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace smsd {

std::uint64_t matrix_hash(const Matrix& m) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t shape[2] = {m.rows(), m.cols()};
  mix(shape, sizeof(shape));
  mix(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  return h;
}

StackedDictionary build_stacked(const Dictionary& psi, const Matrix& phi, double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("build_stacked: gamma must be positive");
  if (phi.cols() != psi.signal_dim()) {
    throw InvalidInput("build_stacked: Phi has " + std::to_string(phi.cols()) +
                       " columns, expected " + std::to_string(psi.signal_dim()));
  }
  const Index n = psi.signal_dim();
  const Index m = phi.rows();
  StackedDictionary s;
  s.gamma = gamma;
  s.matrix.resize(n + m, psi.atom_count());
  s.matrix.topRows(n) = std::sqrt(gamma) * psi.atoms();
  s.matrix.bottomRows(m).noalias() = phi * psi.atoms();
  s.psi_hash = matrix_hash(psi.atoms());
  s.phi_hash = matrix_hash(phi);
  return s;
}

Vector inverse_column_norms(const Matrix& dict) {
  const Vector norms = dict.colwise().norm().transpose();
  const double cutoff = norms.size() > 0 ? kRankEpsilon * norms.maxCoeff() : 0.0;
  Vector inv(dict.cols());
  for (Index j = 0; j < dict.cols(); ++j) {
    inv(j) = norms(j) > cutoff ? 1.0 / norms(j) : 0.0;
  }
  return inv;
}

SparseCode omp_single(const Matrix& dict, const Vector& atom_inv_norms,
                      const Eigen::Ref<const Vector>& signal, const OmpOptions& options,
                      std::vector<double>* residual_norms) {
  const Index m = dict.rows();
  const Index l = dict.cols();
  const Index k_max = std::min(options.sparsity, l);
  const auto rows = static_cast<std::size_t>(m);

  Vector r = signal;
  const double stop = std::max(options.residual_tolerance,
                               kRelativeResidualFloor * signal.norm());
  Matrix q(m, k_max);
  Matrix upper = Matrix::Zero(k_max, k_max);
  Vector z(k_max);
  Vector corr(l);
  Vector w(m);
  std::vector<char> excluded(static_cast<std::size_t>(l), 0);
  std::vector<Index> support;
  support.reserve(static_cast<std::size_t>(k_max));

  double rnorm = r.norm();
  if (residual_norms) residual_norms->push_back(rnorm);

  Index count = 0;
  while (count < k_max && rnorm > stop) {
    kernels::gemv_t(dict.data(), rows, static_cast<std::size_t>(l), r.data(), corr.data());
    Index best = -1;
    double best_score = 0.0;
    for (Index j = 0; j < l; ++j) {
      if (excluded[static_cast<std::size_t>(j)]) continue;
      const double score = std::abs(corr(j)) * atom_inv_norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;

    // Two rounds of Gram-Schmidt against the current basis.
    w = dict.col(best);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < count; ++i) {
        const double c = kernels::dot(q.col(i).data(), w.data(), rows);
        kernels::axpy(-c, q.col(i).data(), w.data(), rows);
        upper(i, count) += c;
      }
    }
    const double wn = w.norm();
    excluded[static_cast<std::size_t>(best)] = 1;
    if (wn <= 1e-10 * dict.col(best).norm()) {
      upper.col(count).setZero();
      warn("omp: atom " + std::to_string(best) +
           " is linearly dependent on the current support; skipped");
      continue;
    }
    q.col(count) = w / wn;
    upper(count, count) = wn;
    const double zc = kernels::dot(q.col(count).data(), r.data(), rows);
    z(count) = zc;
    kernels::axpy(-zc, q.col(count).data(), r.data(), rows);
    support.push_back(best);
    ++count;
    rnorm = r.norm();
    if (residual_norms) residual_norms->push_back(rnorm);
  }

  SparseCode code;
  if (count == 0) return code;
  const Vector coef = upper.topLeftCorner(count, count)
                          .triangularView<Eigen::Upper>()
                          .solve(z.head(count));
  std::vector<std::size_t> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  code.support.reserve(order.size());
  code.values.reserve(order.size());
  for (std::size_t i : order) {
    code.support.push_back(support[i]);
    code.values.push_back(coef(static_cast<Index>(i)));
  }
  return code;
}

SparseCodeBatch omp(const Matrix& dict, const Matrix& signals, const OmpOptions& options) {
  if (dict.rows() < 1 || signals.cols() < 1) {
    throw InvalidInput("omp: need at least one row and one signal");
  }
  if (signals.rows() != dict.rows()) {
    throw InvalidInput("omp: signal length " + std::to_string(signals.rows()) +
                       " does not match dictionary rows " + std::to_string(dict.rows()));
  }
  if (options.sparsity < 1) throw InvalidInput("omp: K must be >= 1");
  const Vector inv = inverse_column_norms(dict);
  if (inv.size() == 0 || inv.maxCoeff() == 0.0) {
    throw InvalidInput("omp: dictionary columns are all zero");
  }

  SparseCodeBatch batch;
  batch.atom_count = dict.cols();
  batch.sparsity = options.sparsity;
  batch.columns.resize(static_cast<std::size_t>(signals.cols()));
  const Index count = signals.cols();
#pragma omp parallel for schedule(dynamic, 8)
  for (Index k = 0; k < count; ++k) {
    batch.columns[static_cast<std::size_t>(k)] = omp_single(dict, inv, signals.col(k), options);
  }
  return batch;
}

SparseCodeBatch encode_train(const Matrix& batch, const Dictionary& psi,
                             const Matrix& phi, double gamma, Index sparsity) {
  if (batch.rows() != psi.signal_dim()) {
    throw InvalidInput("encode_train: batch rows do not match the dictionary");
  }
  const StackedDictionary stacked = build_stacked(psi, phi, gamma);
  const Index n = batch.rows();
  Matrix signals(n + phi.rows(), batch.cols());
  signals.topRows(n) = std::sqrt(gamma) * batch;
  signals.bottomRows(phi.rows()).noalias() = phi * batch;
  return omp(stacked.matrix, signals, {sparsity, 0.0});
}

Matrix synthesize(const Matrix& psi, const SparseCodeBatch& codes) {
  Matrix out = Matrix::Zero(psi.rows(), codes.column_count());
  for (Index k = 0; k < codes.column_count(); ++k) {
    const SparseCode& c = codes.columns[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < c.support.size(); ++i) {
      out.col(k) += c.values[i] * psi.col(c.support[i]);
    }
  }
  return out;
}

DecodeResult decode_measurements(const Matrix& measurements, const Dictionary& psi,
                                 const Matrix& phi, Index sparsity,
                                 double residual_tolerance) {
  if (phi.cols() != psi.signal_dim() || measurements.rows() != phi.rows()) {
    throw InvalidInput("decode_measurements: shape mismatch");
  }
  const Matrix equivalent = phi * psi.atoms();
  DecodeResult r;
  r.codes = omp(equivalent, measurements, {sparsity, residual_tolerance});
  r.reconstructed = synthesize(psi.atoms(), r.codes);
  return r;
}

}  // namespace smsd
