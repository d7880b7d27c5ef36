#pragma once

#include "smsd/core_model.hpp"
#include "smsd/patch_pipeline.hpp"

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace smsd {

/// Returned by psnr() when the error is exactly zero.
inline constexpr double kPerfectPsnr = std::numeric_limits<double>::infinity();

/// (1 / (N P)) sum_k ||xhat_k - x_k||^2
double mse(const Matrix& x, const Matrix& xhat);

/// 10 log10((2^bits - 1)^2 / mse); kPerfectPsnr when mse == 0.
double psnr_from_mse(double mse_value, int bits = 8);
double psnr(const Matrix& x, const Matrix& xhat, int bits = 8);

struct SsimParams {
  Index window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Mean SSIM over all fully-covered window positions with a normalized
/// Gaussian window.
double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {});

struct ImageScore {
  Index image_id = 0;
  std::string name;
  Index patches = 0;
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = std::numeric_limits<double>::quiet_NaN();  // NaN when not assemblable
};

struct EvaluationReport {
  std::string system_label;
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = std::numeric_limits<double>::quiet_NaN();  // mean over scored images
  /// Patches whose reconstruction error is at roundoff level.
  double exact_fraction = 0.0;
  std::vector<ImageScore> per_image;
};

/// Relative error at or below which a patch counts as exactly recovered.
inline constexpr double kExactRecoveryTolerance = 1e-9;

/// Measures every test patch with phi, decodes with OMP over phi * psi and
/// scores the reconstructions.
EvaluationReport evaluate_cs_system(const Matrix& phi, const Dictionary& psi,
                                    const PatchDataset& test, Index sparsity,
                                    std::string label = {});

/// One row per (system, image) plus an "Averaged" row per system.
void write_report_csv(const std::vector<EvaluationReport>& reports,
                      const std::filesystem::path& path);

/// Per-image PSNR | SSIM columns for each system, ending with an Averaged row.
std::string format_report_table(const std::vector<EvaluationReport>& reports);

}  // namespace smsd
