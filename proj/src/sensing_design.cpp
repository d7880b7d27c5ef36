#include "smsd/sensing_design.hpp"

#include "smsd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smsd {

SensingDesign design_sensing(const Matrix& psi, Index measurements) {
  if (measurements < 1) throw InvalidInput("design_sensing: M must be >= 1");
  if (!psi.allFinite()) throw InvalidInput("design_sensing: non-finite dictionary");
  if (psi.size() == 0) throw InvalidInput("design_sensing: empty dictionary");

  ThinSvd svd = svd_thin(psi);
  if (svd.rank == 0) {
    throw DegenerateDictionary("dictionary has no singular value above the rank cutoff");
  }

  const Index n = psi.rows();
  const Index k = std::min(measurements, svd.rank);

  SensingDesign d;
  d.rank = svd.rank;
  d.svd_u = std::move(svd.u);
  d.svd_lambda = std::move(svd.lambda);

  const double floor = kConditioningFloor * d.svd_lambda(0);
  if (d.svd_lambda(k - 1) < floor) {
    warn("sensing design: lambda_" + std::to_string(k) + "/lambda_1 = " +
         std::to_string(d.svd_lambda(k - 1) / d.svd_lambda(0)) +
         " is below the conditioning floor");
    d.floored = true;
    for (Index i = 0; i < d.svd_lambda.size(); ++i) {
      d.svd_lambda(i) = std::max(d.svd_lambda(i), floor);
    }
  }

  d.phi = Matrix::Zero(measurements, n);
  d.phi.topRows(k) =
      d.svd_lambda.head(k).cwiseInverse().asDiagonal() * d.svd_u.leftCols(k).transpose();
  return d;
}

GramResidualReport gram_residual(const Matrix& phi, const Matrix& psi) {
  if (phi.cols() != psi.rows()) {
    throw InvalidInput("gram_residual: Phi has " + std::to_string(phi.cols()) +
                       " columns but Psi has " + std::to_string(psi.rows()) + " rows");
  }
  const Index l = psi.cols();
  const Matrix eq = phi * psi;
  Matrix g = -(eq.transpose() * eq);
  g.diagonal().array() += 1.0;

  GramResidualReport r;
  r.value = g.squaredNorm();
  const Index rank = svd_thin(psi).rank;
  r.theoretical_min = static_cast<double>(l - std::min(phi.rows(), rank));
  r.gap = r.value - r.theoretical_min;
  return r;
}

SensingDesign rotate_solution(const SensingDesign& design, const Matrix& rotation) {
  const Index m = design.measurements();
  if (rotation.rows() != m || rotation.cols() != m) {
    throw InvalidInput("rotate_solution: rotation must be M x M");
  }
  if (design.rank < m) {
    throw InvalidInput("rotate_solution: requires rank(Psi) >= M");
  }
  const Matrix gram = rotation.transpose() * rotation;
  if ((gram - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-9) {
    throw InvalidInput("rotate_solution: rotation is not orthonormal");
  }
  SensingDesign out = design;
  out.phi = rotation * design.phi;
  return out;
}

XiMatrices xi_matrices(const SensingDesign& design, double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("xi_matrices: gamma must be positive");
  const Index n = design.signal_dim();
  // Partition by min(M, rank); the trailing block of the completed basis
  // contributes I - U_k U_k^T to Xi1 and nothing to Xi2.
  const Index k = std::min(design.measurements(), design.rank);
  const auto uk = design.svd_u.leftCols(k);
  const Vector lam2 = design.svd_lambda.head(k).array().square();

  const Vector d1 = (lam2.array().inverse() / gamma + 1.0).inverse();
  const Vector d2 = (lam2.array() + 1.0 / gamma).inverse();

  XiMatrices xi;
  xi.xi1 = Matrix::Identity(n, n);
  xi.xi1.noalias() -= uk * (1.0 - d1.array()).matrix().asDiagonal() * uk.transpose();
  xi.xi2.noalias() = uk * d2.asDiagonal() * uk.transpose();
  return xi;
}

double robust_objective(const Matrix& phi, const Matrix& psi, double lambda) {
  return gram_residual(phi, psi).value + lambda * phi.squaredNorm();
}

namespace {

double objective_with_gram(const Matrix& phi, const Matrix& psi, double lambda) {
  const Matrix eq = phi * psi;
  Matrix g = -(eq.transpose() * eq);
  g.diagonal().array() += 1.0;
  return g.squaredNorm() + lambda * phi.squaredNorm();
}

}  // namespace

GradientDescentResult design_sensing_gd(const Matrix& psi, double lambda,
                                        Index steps, double step_size,
                                        const Matrix& init) {
  if (lambda < 0.0) throw InvalidInput("design_sensing_gd: lambda must be >= 0");
  if (!(step_size > 0.0)) throw InvalidInput("design_sensing_gd: step size must be > 0");
  if (init.cols() != psi.rows()) throw InvalidInput("design_sensing_gd: shape mismatch");

  const Matrix psi_psit = psi * psi.transpose();
  GradientDescentResult r;
  r.phi = init;
  r.trace.reserve(static_cast<std::size_t>(steps) + 1);
  r.trace.push_back(objective_with_gram(r.phi, psi, lambda));

  int rising = 0;
  for (Index s = 0; s < steps; ++s) {
    const Matrix p = r.phi * psi_psit;  // Phi Psi Psi^T
    const Matrix grad = 2.0 * lambda * r.phi - 4.0 * p +
                        4.0 * (p * r.phi.transpose()) * p;
    r.phi -= step_size * grad;
    const double f = objective_with_gram(r.phi, psi, lambda);
    rising = (f > r.trace.back()) ? rising + 1 : 0;
    r.trace.push_back(f);
    if (!std::isfinite(f) || rising >= 10) {
      throw StepSizeError(r.trace, "gradient descent diverged; reduce the step size");
    }
  }
  return r;
}

Matrix random_gaussian_sensing(Index measurements, Index signal_dim,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(measurements)));
  Matrix phi(measurements, signal_dim);
  for (Index j = 0; j < signal_dim; ++j) {
    for (Index i = 0; i < measurements; ++i) phi(i, j) = normal(rng);
  }
  return phi;
}

}  // namespace smsd
