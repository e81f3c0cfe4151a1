#pragma once
// Data-parallel kernels with a scalar reference and SIMD variants selected at runtime.
//
// Every variant computes the same function. The element-wise kernels (add, damp,
// accumulate_relu) and the integer kernels (popcount, and_popcount) agree bit-for-bit
// with the scalar reference; dot() may differ in the last few ulps because the
// vector variants use several partial accumulators.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace lexfp::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

/// Backends compiled into this binary and supported by the running CPU.
std::vector<Backend> available_backends();
bool is_available(Backend b);

/// Currently selected backend. Defaults to the widest available one; the
/// LEXFP_SIMD environment variable (scalar|avx2|neon) overrides the default.
Backend active_backend();
/// Throws std::invalid_argument when `b` is not available.
void set_backend(Backend b);

struct KernelTable {
  Backend backend;
  std::uint64_t (*popcount)(const std::uint64_t* a, std::size_t n);
  std::uint64_t (*and_popcount)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[i] = a[i] + b[i]
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  // x[i] = damping * x[i] + (1 - damping) * update[i]
  void (*damp)(double* x, const double* update, double damping, std::size_t n);
  // acc[i] += max(row[i], 0)
  void (*accumulate_relu)(double* acc, const double* row, std::size_t n);
};

const KernelTable& kernels(Backend b);
const KernelTable& active_kernels();

// Convenience wrappers over the active table.
inline std::uint64_t popcount(std::span<const std::uint64_t> a) {
  return active_kernels().popcount(a.data(), a.size());
}
std::uint64_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);
double dot(std::span<const double> a, std::span<const double> b);
void add(std::span<const double> a, std::span<const double> b, std::span<double> out);
void damp(std::span<double> x, std::span<const double> update, double damping);
void accumulate_relu(std::span<double> acc, std::span<const double> row);

namespace detail {
extern const KernelTable scalar_table;
#if defined(LEXFP_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(LEXFP_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace lexfp::simd
