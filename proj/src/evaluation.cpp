#include "smsd/evaluation.hpp"

#include "smsd/error.hpp"
#include "smsd/kernels.hpp"
#include "smsd/sparse_coding.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace smsd {

double mse(const Matrix& x, const Matrix& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) {
    throw InvalidInput("mse: shape mismatch");
  }
  if (x.size() == 0) throw InvalidInput("mse: empty input");
  return kernels::squared_distance(x.data(), xhat.data(), static_cast<std::size_t>(x.size())) /
         static_cast<double>(x.size());
}

double psnr_from_mse(double mse_value, int bits) {
  if (mse_value == 0.0) return kPerfectPsnr;
  const double peak = std::ldexp(1.0, bits) - 1.0;
  return 10.0 * std::log10(peak * peak / mse_value);
}

double psnr(const Matrix& x, const Matrix& xhat, int bits) {
  return psnr_from_mse(mse(x, xhat), bits);
}

namespace {

Vector gaussian_window(Index size, double sigma) {
  Vector w(size);
  const double centre = static_cast<double>(size - 1) / 2.0;
  for (Index i = 0; i < size; ++i) {
    const double d = static_cast<double>(i) - centre;
    w(i) = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return w / w.sum();
}

// Separable 'valid' correlation with a symmetric 1-D window.
Matrix filter_valid(const Matrix& img, const Vector& w) {
  const Index k = w.size();
  const Index out_rows = img.rows() - k + 1;
  const Index out_cols = img.cols() - k + 1;
  const auto n_rows = static_cast<std::size_t>(out_rows);

  Matrix vertical = Matrix::Zero(out_rows, img.cols());
  for (Index c = 0; c < img.cols(); ++c) {
    for (Index i = 0; i < k; ++i) {
      kernels::axpy(w(i), img.col(c).data() + i, vertical.col(c).data(), n_rows);
    }
  }
  Matrix out = Matrix::Zero(out_rows, out_cols);
  for (Index c = 0; c < out_cols; ++c) {
    for (Index i = 0; i < k; ++i) {
      kernels::axpy(w(i), vertical.col(c + i).data(), out.col(c).data(), n_rows);
    }
  }
  return out;
}

}  // namespace

double ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("ssim: shape mismatch");
  if (a.rows() < params.window || a.cols() < params.window) {
    throw InvalidInput("ssim: image is smaller than the " + std::to_string(params.window) +
                       "-pixel window");
  }
  const Vector w = gaussian_window(params.window, params.sigma);
  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);

  const Matrix mu_a = filter_valid(a, w);
  const Matrix mu_b = filter_valid(b, w);
  const Matrix e_aa = filter_valid(a.cwiseProduct(a), w);
  const Matrix e_bb = filter_valid(b.cwiseProduct(b), w);
  const Matrix e_ab = filter_valid(a.cwiseProduct(b), w);

  const auto ma = mu_a.array();
  const auto mb = mu_b.array();
  const auto var_a = e_aa.array() - ma * ma;
  const auto var_b = e_bb.array() - mb * mb;
  const auto cov = e_ab.array() - ma * mb;
  const Eigen::ArrayXXd map = ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                              ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  return map.mean();
}

EvaluationReport evaluate_cs_system(const Matrix& phi, const Dictionary& psi,
                                    const PatchDataset& test, Index sparsity,
                                    std::string label) {
  if (test.patch_count() == 0) throw InvalidInput("evaluate_cs_system: no test patches");
  if (phi.cols() != test.signal_dim() || psi.signal_dim() != test.signal_dim()) {
    throw InvalidInput("evaluate_cs_system: dimensions of phi, psi and patches differ");
  }
  const Matrix& x = test.columns;
  const DecodeResult decoded = decode_measurements(phi * x, psi, phi, sparsity);
  const Matrix& xhat = decoded.reconstructed;

  EvaluationReport report;
  report.system_label = std::move(label);
  report.mse = mse(x, xhat);
  report.psnr = psnr_from_mse(report.mse);

  Index exact = 0;
  for (Index k = 0; k < x.cols(); ++k) {
    const double err = (x.col(k) - xhat.col(k)).norm();
    if (err <= kExactRecoveryTolerance * std::max(x.col(k).norm(), 1.0)) ++exact;
  }
  report.exact_fraction = static_cast<double>(exact) / static_cast<double>(x.cols());

  double ssim_sum = 0.0;
  Index ssim_count = 0;
  for (const ImageInfo& info : test.images) {
    const std::vector<Index> cols = test.columns_of_image(info.id);
    if (cols.empty()) continue;
    ImageScore score;
    score.image_id = info.id;
    score.name = info.name;
    score.patches = static_cast<Index>(cols.size());
    double sq = 0.0;
    for (Index k : cols) sq += (x.col(k) - xhat.col(k)).squaredNorm();
    score.mse = sq / static_cast<double>(cols.size() * static_cast<std::size_t>(x.rows()));
    score.psnr = psnr_from_mse(score.mse);
    try {
      const GrayImage original = assemble_patches(test, x, info.id);
      const GrayImage recovered = assemble_patches(test, xhat, info.id);
      score.ssim = ssim(original, recovered);
      ssim_sum += score.ssim;
      ++ssim_count;
    } catch (const MissingPatchError&) {
    } catch (const InvalidInput&) {
      // Too small for the SSIM window.
    }
    report.per_image.push_back(score);
  }
  if (ssim_count > 0) report.ssim = ssim_sum / static_cast<double>(ssim_count);
  return report;
}

void write_report_csv(const std::vector<EvaluationReport>& reports,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "system,image,patches,mse,psnr,ssim\n" << std::setprecision(10);
  for (const auto& r : reports) {
    Index total = 0;
    for (const auto& s : r.per_image) {
      out << r.system_label << ',' << s.name << ',' << s.patches << ',' << s.mse << ','
          << s.psnr << ',' << s.ssim << '\n';
      total += s.patches;
    }
    out << r.system_label << ",Averaged," << total << ',' << r.mse << ',' << r.psnr << ','
        << r.ssim << '\n';
  }
}

std::string format_report_table(const std::vector<EvaluationReport>& reports) {
  std::ostringstream os;
  os << std::fixed;
  os << std::left << std::setw(20) << "";
  for (const auto& r : reports) os << " | " << std::setw(17) << r.system_label;
  os << '\n';
  std::vector<std::string> names;
  for (const auto& r : reports) {
    for (const auto& s : r.per_image) {
      if (std::find(names.begin(), names.end(), s.name) == names.end()) names.push_back(s.name);
    }
  }
  auto cell = [&os](double p, double s) {
    os << " | " << std::right << std::setw(8) << std::setprecision(4) << p << ' '
       << std::setw(8) << std::setprecision(4) << s << std::left;
  };
  for (const auto& name : names) {
    os << std::setw(20) << name;
    for (const auto& r : reports) {
      const auto it = std::find_if(r.per_image.begin(), r.per_image.end(),
                                   [&](const ImageScore& s) { return s.name == name; });
      if (it == r.per_image.end()) {
        os << " | " << std::setw(17) << "-";
      } else {
        cell(it->psnr, it->ssim);
      }
    }
    os << '\n';
  }
  os << std::setw(20) << "Averaged";
  for (const auto& r : reports) {
    double p = 0.0, s = 0.0;
    Index n = 0;
    for (const auto& img : r.per_image) {
      p += img.psnr;
      s += img.ssim;
      ++n;
    }
    if (n > 0) {
      cell(p / static_cast<double>(n), s / static_cast<double>(n));
    } else {
      cell(r.psnr, r.ssim);
    }
  }
  os << '\n';
  return os.str();
}

}  // namespace smsd
