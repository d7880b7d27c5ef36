#include "smsd/error.hpp"
#include "smsd/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace smsd::kernels {
namespace {

std::vector<Backend> simd_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Sum of |terms|, the natural scale of rounding differences between
// summation orders.
double abs_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] * b[i]);
  return s;
}

TEST(Kernels, ScalarIsAlwaysAvailable) {
  EXPECT_TRUE(backend_available(Backend::scalar));
  EXPECT_EQ(table(Backend::scalar).backend, Backend::scalar);
  EXPECT_EQ(backend_name(Backend::scalar), "scalar");
}

TEST(Kernels, BestBackendIsAvailable) {
  EXPECT_TRUE(backend_available(best_backend()));
}

TEST(Kernels, UnavailableBackendThrows) {
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (!backend_available(b)) EXPECT_THROW(table(b), InvalidInput);
  }
}

TEST(Kernels, ActiveBackendCanBeSwitched) {
  const Backend before = active().backend;
  set_active_backend(Backend::scalar);
  EXPECT_EQ(active().backend, Backend::scalar);
  set_active_backend(before);
  EXPECT_EQ(active().backend, before);
}

TEST(Kernels, ScalarReferenceMatchesHandLoops) {
  const auto& s = table(Backend::scalar);
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {-1, 0.5, 2, 0, 1};
  EXPECT_DOUBLE_EQ(s.dot(a.data(), b.data(), 5), -1 + 1 + 6 + 0 + 5);
  EXPECT_DOUBLE_EQ(s.squared_distance(a.data(), b.data(), 5), 4 + 2.25 + 1 + 16 + 16);
  std::vector<double> y = b;
  s.axpy(2.0, a.data(), y.data(), 5);
  EXPECT_EQ(y, (std::vector<double>{1, 4.5, 8, 8, 11}));
  // 2 x 3 column-major: columns (1,2), (3,4), (5,0.5)
  const std::vector<double> m = {1, 2, 3, 4, 5, 0.5};
  const std::vector<double> x = {10, -1};
  std::vector<double> out(3);
  s.gemv_t(m.data(), 2, 3, x.data(), out.data());
  EXPECT_EQ(out, (std::vector<double>{8, 26, 49.5}));
}

TEST(Kernels, EmptyInputsAreZero) {
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
    if (!backend_available(b)) continue;
    const auto& t = table(b);
    EXPECT_EQ(t.dot(nullptr, nullptr, 0), 0.0);
    EXPECT_EQ(t.squared_distance(nullptr, nullptr, 0), 0.0);
  }
}

TEST(Kernels, SimdDotMatchesScalarOverLengthsAndOffsets) {
  const auto& ref = table(Backend::scalar);
  std::mt19937_64 rng(11);
  for (Backend b : simd_backends()) {
    const auto& simd = table(b);
    for (std::size_t n = 0; n <= 67; ++n) {
      for (std::size_t offset = 0; offset < 3; ++offset) {
        const auto a = random_values(n + offset, rng);
        const auto c = random_values(n + offset, rng);
        const double* pa = a.data() + offset;
        const double* pc = c.data() + offset;
        const double scale = abs_dot(pa, pc, n) + 1e-300;
        EXPECT_LE(std::abs(simd.dot(pa, pc, n) - ref.dot(pa, pc, n)), 1e-14 * scale)
            << backend_name(b) << " n=" << n << " offset=" << offset;
        const double d_ref = ref.squared_distance(pa, pc, n);
        EXPECT_LE(std::abs(simd.squared_distance(pa, pc, n) - d_ref), 1e-14 * (d_ref + 1e-300))
            << backend_name(b) << " n=" << n;
      }
    }
  }
}

TEST(Kernels, SimdAxpyMatchesScalar) {
  const auto& ref = table(Backend::scalar);
  std::mt19937_64 rng(12);
  for (Backend b : simd_backends()) {
    const auto& simd = table(b);
    for (std::size_t n = 0; n <= 41; ++n) {
      const auto x = random_values(n + 1, rng);
      const auto y0 = random_values(n + 1, rng);
      std::vector<double> y_ref = y0, y_simd = y0;
      ref.axpy(-0.37, x.data() + 1, y_ref.data() + 1, n);
      simd.axpy(-0.37, x.data() + 1, y_simd.data() + 1, n);
      EXPECT_EQ(y_ref[0], y_simd[0]);  // untouched
      for (std::size_t i = 1; i <= n; ++i) {
        EXPECT_NEAR(y_simd[i], y_ref[i], 1e-15 * (std::abs(y0[i]) + std::abs(0.37 * x[i])))
            << backend_name(b) << " n=" << n << " i=" << i;
      }
    }
  }
}

TEST(Kernels, SimdGemvTransposedMatchesScalar) {
  const auto& ref = table(Backend::scalar);
  std::mt19937_64 rng(13);
  for (Backend b : simd_backends()) {
    const auto& simd = table(b);
    for (std::size_t rows : {1u, 3u, 8u, 20u, 84u}) {
      for (std::size_t cols : {1u, 2u, 5u, 9u, 50u, 256u}) {
        const auto m = random_values(rows * cols, rng);
        const auto x = random_values(rows, rng);
        std::vector<double> y_ref(cols), y_simd(cols);
        ref.gemv_t(m.data(), rows, cols, x.data(), y_ref.data());
        simd.gemv_t(m.data(), rows, cols, x.data(), y_simd.data());
        for (std::size_t j = 0; j < cols; ++j) {
          const double scale = abs_dot(m.data() + j * rows, x.data(), rows);
          EXPECT_LE(std::abs(y_simd[j] - y_ref[j]), 1e-14 * scale)
              << backend_name(b) << " rows=" << rows << " cols=" << cols;
        }
      }
    }
  }
}

TEST(Kernels, ExactIntegerInputsAgreeBitForBit) {
  // Small integers: every partial sum is exact, so the order cannot matter.
  const auto& ref = table(Backend::scalar);
  std::vector<double> a(37), c(37);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<double>(static_cast<int>(i % 7) - 3);
    c[i] = static_cast<double>(static_cast<int>(i % 5) - 2);
  }
  for (Backend b : simd_backends()) {
    EXPECT_EQ(table(b).dot(a.data(), c.data(), a.size()), ref.dot(a.data(), c.data(), a.size()));
    EXPECT_EQ(table(b).squared_distance(a.data(), c.data(), a.size()),
              ref.squared_distance(a.data(), c.data(), a.size()));
  }
}

}  // namespace
}  // namespace smsd::kernels
