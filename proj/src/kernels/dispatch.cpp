#include "smsd/error.hpp"
#include "smsd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace smsd::kernels {

namespace detail {
#ifndef SMSD_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#ifndef SMSD_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(SMSD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* lookup(Backend b) {
  switch (b) {
    case Backend::scalar:
      return detail::scalar_table();
    case Backend::avx2:
      return cpu_has_avx2() ? detail::avx2_table() : nullptr;
    case Backend::neon:
      // Advanced SIMD is mandatory on AArch64.
      return detail::neon_table();
  }
  return nullptr;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SMSD_KERNEL_BACKEND")) {
    const std::string name(env);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (name == backend_name(b)) {
        if (const KernelTable* t = lookup(b)) return t;
        warn("requested kernel backend '" + name + "' is unavailable");
      }
    }
  }
  return lookup(best_backend());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) { return lookup(b) != nullptr; }

Backend best_backend() {
  if (backend_available(Backend::avx2)) return Backend::avx2;
  if (backend_available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

const KernelTable& table(Backend b) {
  const KernelTable* t = lookup(b);
  if (!t) {
    throw InvalidInput("kernel backend " + std::string(backend_name(b)) +
                       " is not available");
  }
  return *t;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_active_backend(Backend b) {
  current().store(&table(b), std::memory_order_release);
}

}  // namespace smsd::kernels
