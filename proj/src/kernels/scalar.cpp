#include "smsd/kernels.hpp"

namespace smsd::kernels::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = dot_scalar(a + j * rows, x, rows);
}

constexpr KernelTable kScalar{Backend::scalar, dot_scalar, squared_distance_scalar,
                              axpy_scalar, gemv_t_scalar};

}  // namespace

const KernelTable* scalar_table() { return &kScalar; }

}  // namespace smsd::kernels::detail
