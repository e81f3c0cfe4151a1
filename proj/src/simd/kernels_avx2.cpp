// AVX2 variants. This translation unit is compiled with -mavx2 -mpopcnt and is only
// entered after a runtime CPU check.
#include "lexfp/simd.hpp"

#include <immintrin.h>

#include <bit>

namespace lexfp::simd {
namespace {

// Nibble-lookup popcount of 256 bits, horizontal byte sums folded into 4 u64 lanes.
inline __m256i popcount256(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
  return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

inline std::uint64_t hsum_epi64(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

std::uint64_t popcount_avx2(const std::uint64_t* a, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    acc = _mm256_add_epi64(acc, popcount256(v));
  }
  std::uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i]));
  return total;
}

std::uint64_t and_popcount_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_add_epi64(acc, popcount256(_mm256_and_si256(va, vb)));
  }
  std::uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return total;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void add_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void damp_avx2(double* x, const double* update, double damping, std::size_t n) {
  const double keep = 1.0 - damping;
  const __m256d vd = _mm256_set1_pd(damping);
  const __m256d vk = _mm256_set1_pd(keep);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d old = _mm256_mul_pd(vd, _mm256_loadu_pd(x + i));
    const __m256d upd = _mm256_mul_pd(vk, _mm256_loadu_pd(update + i));
    _mm256_storeu_pd(x + i, _mm256_add_pd(old, upd));
  }
  for (; i < n; ++i) x[i] = damping * x[i] + keep * update[i];
}

void accumulate_relu_avx2(double* acc, const double* row, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max_pd(row, 0) returns 0 for NaN rows just like the scalar ternary.
    const __m256d r = _mm256_max_pd(_mm256_loadu_pd(row + i), zero);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), r));
  }
  for (; i < n; ++i) acc[i] += row[i] > 0.0 ? row[i] : 0.0;
}

}  // namespace

namespace detail {
const KernelTable avx2_table{
    Backend::Avx2, popcount_avx2, and_popcount_avx2, dot_avx2,
    add_avx2,      damp_avx2,     accumulate_relu_avx2,
};
}  // namespace detail

}  // namespace lexfp::simd
