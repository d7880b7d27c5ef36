#pragma once

// Dense double-precision inner loops shared by sparse coding, the metrics
// and the SSIM filter. Every routine has a portable scalar reference; SIMD
// variants are compiled into separate translation units and picked at
// runtime from what the CPU reports. SMSD_KERNEL_BACKEND=scalar|avx2|neon
// overrides the choice at startup.

#include <cstddef>
#include <string_view>

namespace smsd::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[j] = sum_i a[i + j*rows] * x[i]   (column-major a, rows x cols)
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
};

std::string_view backend_name(Backend b);
bool backend_available(Backend b);
Backend best_backend();

/// Table for a specific backend; throws InvalidInput if it is not available.
const KernelTable& table(Backend b);

const KernelTable& active();
void set_active_backend(Backend b);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double squared_distance(const double* a, const double* b, std::size_t n) {
  return active().squared_distance(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void gemv_t(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  active().gemv_t(a, rows, cols, x, y);
}

namespace detail {
const KernelTable* scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace smsd::kernels
