#pragma once

#include "smsd/core_model.hpp"

#include <random>
#include <vector>

namespace smsd {

/// If lambda_M / lambda_1 drops below this, the inverted values are floored.
inline constexpr double kConditioningFloor = 1e-8;

struct GramResidualReport {
  double value = 0.0;            // ||I_L - Psi^T Phi^T Phi Psi||_F^2
  double theoretical_min = 0.0;  // L - min(M, rank(Psi))
  double gap = 0.0;
};

/// Minimum-energy minimizer of the Gram residual:
///   rank >= M:  Phi = Lambda_M^{-1} U(:, 1:M)^T
///   rank <  M:  Phi = [I_rank; 0] Lambda^{-1} U^T
/// Throws DegenerateDictionary when psi has numerical rank zero.
SensingDesign design_sensing(const Matrix& psi, Index measurements);
inline SensingDesign design_sensing(const Dictionary& psi, Index measurements) {
  return design_sensing(psi.atoms(), measurements);
}

GramResidualReport gram_residual(const Matrix& phi, const Matrix& psi);

/// Replaces the canonical member of the optimal set with [U_M 0] Lambda^{-1} U^T.
/// Requires rank >= M and an orthonormal M x M rotation.
SensingDesign rotate_solution(const SensingDesign& design, const Matrix& rotation);

/// Xi1 = (I + Phi^T Phi / gamma)^{-1} and Xi2 = Xi1 Phi^T Phi, both evaluated
/// from the cached SVD without forming an inverse.
struct XiMatrices {
  Matrix xi1;
  Matrix xi2;
};
XiMatrices xi_matrices(const SensingDesign& design, double gamma);

/// f(Phi) = ||I - Psi^T Phi^T Phi Psi||_F^2 + lambda ||Phi||_F^2
double robust_objective(const Matrix& phi, const Matrix& psi, double lambda);

struct GradientDescentResult {
  Matrix phi;
  std::vector<double> trace;  // f before the first step, then after each step
};

/// Fixed-step gradient descent on robust_objective. Throws StepSizeError
/// (carrying the trace) if f increases ten steps in a row.
GradientDescentResult design_sensing_gd(const Matrix& psi, double lambda,
                                        Index steps, double step_size,
                                        const Matrix& init);

/// i.i.d. N(0, 1/M) entries; the usual unoptimized baseline.
Matrix random_gaussian_sensing(Index measurements, Index signal_dim,
                               std::mt19937_64& rng);

}  // namespace smsd
