#include "lexfp/simd.hpp"

#include <bit>

namespace lexfp::simd {
namespace {

std::uint64_t popcount_scalar(const std::uint64_t* a, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i]));
  return total;
}

std::uint64_t and_popcount_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return total;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void damp_scalar(double* x, const double* update, double damping, std::size_t n) {
  const double keep = 1.0 - damping;
  for (std::size_t i = 0; i < n; ++i) x[i] = damping * x[i] + keep * update[i];
}

void accumulate_relu_scalar(double* acc, const double* row, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += row[i] > 0.0 ? row[i] : 0.0;
}

}  // namespace

namespace detail {
const KernelTable scalar_table{
    Backend::Scalar, popcount_scalar, and_popcount_scalar, dot_scalar,
    add_scalar,      damp_scalar,     accumulate_relu_scalar,
};
}  // namespace detail

}  // namespace lexfp::simd
