#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lexfp/simd.hpp"

namespace lexfp::simd {
namespace {

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(LEXFP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(LEXFP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend default_backend() {
  if (const char* env = std::getenv("LEXFP_SIMD")) {
    const std::string want(env);
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (want == backend_name(b) && cpu_supports(b)) return b;
    }
  }
  if (cpu_supports(Backend::Avx2)) return Backend::Avx2;
  if (cpu_supports(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&kernels(default_backend())};
  return slot;
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd: operand length mismatch");
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool is_available(Backend b) { return cpu_supports(b); }

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& kernels(Backend b) {
  if (!cpu_supports(b)) {
    throw std::invalid_argument("simd backend not available: " + std::string(backend_name(b)));
  }
  switch (b) {
#if defined(LEXFP_HAVE_AVX2)
    case Backend::Avx2: return detail::avx2_table;
#endif
#if defined(LEXFP_HAVE_NEON)
    case Backend::Neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

Backend active_backend() { return active_slot().load()->backend; }

void set_backend(Backend b) { active_slot().store(&kernels(b)); }

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_relaxed); }

std::uint64_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  check_same_size(a.size(), b.size());
  return active_kernels().and_popcount(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

void add(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  check_same_size(a.size(), b.size());
  check_same_size(a.size(), out.size());
  active_kernels().add(a.data(), b.data(), out.data(), a.size());
}

void damp(std::span<double> x, std::span<const double> update, double damping) {
  check_same_size(x.size(), update.size());
  active_kernels().damp(x.data(), update.data(), damping, x.size());
}

void accumulate_relu(std::span<double> acc, std::span<const double> row) {
  check_same_size(acc.size(), row.size());
  active_kernels().accumulate_relu(acc.data(), row.data(), acc.size());
}

}  // namespace lexfp::simd
