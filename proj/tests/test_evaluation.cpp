#include "smsd/error.hpp"
#include "smsd/evaluation.hpp"
#include "smsd/sensing_design.hpp"

#include "oracles.hpp"
#include "planted.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace smsd {
namespace {

namespace fs = std::filesystem;

// Two formula-defined images shared with the scikit-image reference values.
GrayImage formula_image(Index h, Index w) {
  GrayImage a(h, w);
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) a(r, c) = static_cast<double>((r * 37 + c * 91 + r * c * 13) % 256);
  }
  return a;
}

GrayImage perturbed(const GrayImage& a) {
  GrayImage b(a.rows(), a.cols());
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      b(r, c) = std::clamp(a(r, c) + static_cast<double>((r * c * 7 + c * 3) % 29) - 14.0, 0.0, 255.0);
    }
  }
  return b;
}

GrayImage smooth_image(Index h, Index w) {
  GrayImage a(h, w);
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) {
      a(r, c) = 128.0 + 100.0 * std::sin(static_cast<double>(r) / 5.0) *
                            std::cos(static_cast<double>(c) / 7.0);
    }
  }
  return a;
}

// Direct two-dimensional windowed SSIM, without separable filtering.
double direct_ssim(const GrayImage& a, const GrayImage& b) {
  const int win = 11, half = 5;
  const double sigma = 1.5;
  Matrix g(win, win);
  for (int i = 0; i < win; ++i) {
    for (int j = 0; j < win; ++j) {
      g(i, j) = std::exp(-((i - half) * (i - half) + (j - half) * (j - half)) / (2 * sigma * sigma));
    }
  }
  g /= g.sum();
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  double total = 0.0;
  int count = 0;
  for (Index r = 0; r + win <= a.rows(); ++r) {
    for (Index c = 0; c + win <= a.cols(); ++c) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < win; ++i) {
        for (int j = 0; j < win; ++j) {
          const double x = a(r + i, c + j), y = b(r + i, c + j), w = g(i, j);
          ma += w * x;
          mb += w * y;
          saa += w * x * x;
          sbb += w * y * y;
          sab += w * x * y;
        }
      }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

// ------------------------------------------------------------- mse / psnr

TEST(Mse, Basics) {
  std::mt19937_64 rng(1);
  const Matrix x = oracle::gaussian(8, 5, rng, 50.0);
  EXPECT_EQ(mse(x, x), 0.0);
  EXPECT_EQ(mse(x, (x.array() + 255.0).matrix()), 65025.0);
  const Matrix y = oracle::gaussian(8, 5, rng, 50.0);
  EXPECT_NEAR(mse(x, y), oracle::scalar_squared_distance(x, y) / 40.0, 1e-12 * mse(x, y));
  EXPECT_THROW(mse(x, Matrix(8, 4)), InvalidInput);
}

TEST(Psnr, AnalyticValues) {
  EXPECT_EQ(psnr_from_mse(65025.0), 0.0);
  EXPECT_NEAR(psnr_from_mse(1.0), 48.1308, 1e-3);
  EXPECT_NEAR(psnr_from_mse(1.0), 10.0 * std::log10(65025.0), 1e-12);
  EXPECT_EQ(psnr_from_mse(0.0), kPerfectPsnr);
  EXPECT_TRUE(std::isinf(kPerfectPsnr));
  EXPECT_NEAR(psnr_from_mse(1.0, 16), 10.0 * std::log10(65535.0 * 65535.0), 1e-9);
  const Matrix x = Matrix::Constant(4, 4, 100.0);
  EXPECT_EQ(psnr(x, x), kPerfectPsnr);
}

TEST(Psnr, MonotoneDecreasingInMse) {
  double prev = psnr_from_mse(1e-6);
  for (double m = 1e-5; m < 1e5; m *= 1.7) {
    const double v = psnr_from_mse(m);
    EXPECT_LT(v, prev);
    prev = v;
  }
  std::mt19937_64 rng(2);
  const Matrix x = oracle::gaussian(6, 6, rng, 40.0);
  Matrix y = x;
  y(3, 2) += 1e-3;
  EXPECT_LT(psnr(x, y), kPerfectPsnr);
}

// ------------------------------------------------------------------ ssim

TEST(Ssim, IdenticalImagesScoreOne) {
  const GrayImage a = formula_image(32, 40);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
}

TEST(Ssim, MatchesScikitImageReference) {
  // skimage.metrics.structural_similarity(gaussian_weights=True, sigma=1.5,
  // use_sample_covariance=False, data_range=255)
  const GrayImage a = formula_image(32, 40);
  EXPECT_NEAR(ssim(a, perturbed(a)), 0.9934241098412981, 1e-12);
  EXPECT_NEAR(ssim(a, (255.0 - a.array()).matrix()), -0.9662820958380968, 1e-12);
  const GrayImage s = smooth_image(32, 40);
  EXPECT_NEAR(ssim(s, (0.9 * s.array() + 10.0).matrix()), 0.9940300560370081, 1e-12);
}

TEST(Ssim, MatchesDirectWindowedSum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> px(0.0, 255.0);
  GrayImage a(20, 27), b(20, 27);
  for (Index i = 0; i < a.size(); ++i) {
    a.data()[i] = px(rng);
    b.data()[i] = std::clamp(a.data()[i] + px(rng) / 8.0 - 16.0, 0.0, 255.0);
  }
  EXPECT_NEAR(ssim(a, b), direct_ssim(a, b), 1e-12);
}

TEST(Ssim, NegativeImageScoresBelowOne) {
  const GrayImage a = smooth_image(24, 24);
  EXPECT_LT(ssim(a, (255.0 - a.array()).matrix()), 1.0);
}

TEST(Ssim, ConstantShiftEqualsTheLuminanceTerm) {
  const double c1 = std::pow(0.01 * 255.0, 2);
  for (double mu : {0.0, 50.0, 200.0}) {
    const GrayImage a = GrayImage::Constant(16, 16, mu);
    const GrayImage b = GrayImage::Constant(16, 16, mu + 10.0);
    const double lum = (2.0 * mu * (mu + 10.0) + c1) / (mu * mu + (mu + 10.0) * (mu + 10.0) + c1);
    EXPECT_NEAR(ssim(a, b), lum, 1e-10) << "mu=" << mu;
  }
}

TEST(Ssim, IsSymmetric) {
  const GrayImage a = formula_image(30, 33);
  const GrayImage b = perturbed(a);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
}

TEST(Ssim, RejectsSmallOrMismatchedImages) {
  EXPECT_THROW(ssim(GrayImage::Zero(10, 30), GrayImage::Zero(10, 30)), InvalidInput);
  EXPECT_THROW(ssim(GrayImage::Zero(20, 20), GrayImage::Zero(20, 21)), InvalidInput);
}

// ------------------------------------------------------ system evaluation

// Test corpus of `images` 16 x 16 images cut into 4 x 4 patches, each patch
// a 2-sparse combination of `dict` scaled to pixel-sized values.
PatchDataset planted_corpus(const Matrix& dict, Index images, std::mt19937_64& rng) {
  PatchDataset ds;
  ds.patch_size = 4;
  const Index per_image = 16;
  const auto data = planted::sparse_signals(dict, images * per_image, 2, rng);
  ds.columns = 20.0 * data.signals;
  for (Index i = 0; i < images; ++i) {
    ds.images.push_back({i, "img" + std::to_string(i), 16, 16});
    for (Index t = 0; t < per_image; ++t) ds.provenance.push_back({i, (t % 4) * 4, (t / 4) * 4});
  }
  return ds;
}

TEST(EvaluateCsSystem, SparseTestPatchesAreRecoveredExactly) {
  // 2-sparse patches over a generic 16 x 24 dictionary, measured by a
  // designed Phi with 12 rows: almost every patch is recovered to roundoff.
  std::mt19937_64 rng(4);
  const Matrix dict = oracle::random_dictionary(16, 24, rng);
  const auto corpus = planted_corpus(dict, 6, rng);
  const auto design = design_sensing(dict, 12);
  const auto r = evaluate_cs_system(design.phi, Dictionary(dict), corpus, 2, "designed");
  RecordProperty("exact_fraction", std::to_string(r.exact_fraction));
  EXPECT_GE(r.exact_fraction, 0.95);
  EXPECT_EQ(r.system_label, "designed");
  ASSERT_EQ(r.per_image.size(), 6u);
  // Roundoff keeps the mse above zero, so exact images score far above any
  // lossy reconstruction rather than hitting the infinite sentinel.
  Index near_perfect_images = 0;
  for (const auto& s : r.per_image) {
    EXPECT_EQ(s.patches, 16);
    if (s.psnr > 200.0) ++near_perfect_images;
  }
  EXPECT_GE(near_perfect_images, 1);
}

TEST(EvaluateCsSystem, RandomSensingScoresBelowDesignedSensing) {
  // Generic planted dictionary (Gaussian 16 x 24, K = 2); each of ten random
  // Phi draws is paired with the designed Phi for the same Psi.
  std::mt19937_64 rng(5);
  const Matrix truth = oracle::random_dictionary(16, 24, rng);
  const auto corpus = planted_corpus(truth, 20, rng);
  for (Index m : {6, 8}) {
    const auto designed = design_sensing(truth, m);
    const auto a = evaluate_cs_system(designed.phi, Dictionary(truth), corpus, 2);
    for (int draw = 0; draw < 10; ++draw) {
      const Matrix random = random_gaussian_sensing(m, 16, rng);
      const auto b = evaluate_cs_system(random, Dictionary(truth), corpus, 2);
      EXPECT_LT(b.psnr, a.psnr) << "M=" << m << " designed " << a.psnr << " random " << b.psnr;
    }
  }
}

TEST(EvaluateCsSystem, IsDeterministicAndScoresSsimOnAssembledImages) {
  std::mt19937_64 rng(6);
  const Matrix truth = planted::low_coherence_dictionary();
  PatchDataset corpus = planted_corpus(truth, 2, rng);
  // Lift into the pixel range so that clamping does not hide differences.
  corpus.columns.array() += 128.0;
  const Matrix phi = random_gaussian_sensing(6, 16, rng);
  const auto a = evaluate_cs_system(phi, Dictionary(truth), corpus, 2);
  const auto b = evaluate_cs_system(phi, Dictionary(truth), corpus, 2);
  EXPECT_EQ(a.psnr, b.psnr);
  for (const auto& s : a.per_image) {
    // 16 x 16 images fit the 11 x 11 window, so SSIM is defined.
    EXPECT_FALSE(std::isnan(s.ssim));
    EXPECT_LE(s.ssim, 1.0);
  }
}

TEST(EvaluateCsSystem, ImagesTooSmallForSsimAreStillScored) {
  std::mt19937_64 rng(7);
  PatchDataset ds;
  ds.patch_size = 4;
  ds.columns = oracle::gaussian(16, 1, rng, 10.0).array() + 100.0;
  ds.images.push_back({0, "tiny", 4, 4});
  ds.provenance.push_back({0, 0, 0});
  const Matrix phi = oracle::gaussian(6, 16, rng);
  const auto r = evaluate_cs_system(phi, Dictionary(planted::low_coherence_dictionary()), ds, 2);
  ASSERT_EQ(r.per_image.size(), 1u);
  EXPECT_TRUE(std::isnan(r.per_image[0].ssim));
  EXPECT_TRUE(std::isnan(r.ssim));
}

TEST(EvaluateCsSystem, RejectsInconsistentDimensions) {
  std::mt19937_64 rng(8);
  const Matrix truth = planted::low_coherence_dictionary();
  const auto corpus = planted_corpus(truth, 1, rng);
  EXPECT_THROW(evaluate_cs_system(Matrix::Zero(4, 9), Dictionary(truth), corpus, 2), InvalidInput);
  EXPECT_THROW(evaluate_cs_system(Matrix::Zero(4, 16), Dictionary(truth), PatchDataset{}, 2),
               InvalidInput);
}

// --------------------------------------------------------------- reports

std::vector<EvaluationReport> sample_reports() {
  EvaluationReport a;
  a.system_label = "joint";
  a.mse = 4.0;
  a.psnr = psnr_from_mse(4.0);
  a.ssim = 0.9;
  a.per_image = {{0, "lena", 10, 3.0, psnr_from_mse(3.0), 0.95}, {1, "boat", 10, 5.0, psnr_from_mse(5.0), 0.85}};
  EvaluationReport b = a;
  b.system_label = "random";
  b.per_image[0].psnr = 20.0;
  return {a, b};
}

TEST(Reports, CsvHasOneRowPerImageAndAnAveragedRow) {
  const auto path = fs::temp_directory_path() / "smsd_report.csv";
  write_report_csv(sample_reports(), path);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "system,image,patches,mse,psnr,ssim");
  EXPECT_EQ(lines[1].rfind("joint,lena,10,3,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("joint,Averaged,20,4,", 0), 0u);
  EXPECT_EQ(lines[6].rfind("random,Averaged,20,4,", 0), 0u);
  fs::remove(path);
}

TEST(Reports, TableListsSystemsImagesAndAverages) {
  const std::string t = format_report_table(sample_reports());
  for (const char* needle : {"joint", "random", "lena", "boat", "Averaged", "20.0"}) {
    EXPECT_NE(t.find(needle), std::string::npos) << needle << "\n" << t;
  }
  EXPECT_LT(t.find("lena"), t.find("Averaged"));
}

}  // namespace
}  // namespace smsd
