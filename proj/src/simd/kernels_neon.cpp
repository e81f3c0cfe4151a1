// NEON variants for AArch64, where Advanced SIMD is part of the base ISA.
#include "lexfp/simd.hpp"

#include <arm_neon.h>

#include <bit>

namespace lexfp::simd {
namespace {

std::uint64_t popcount_neon(const std::uint64_t* a, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint8x16_t bytes = vcntq_u8(vreinterpretq_u8_u64(vld1q_u64(a + i)));
    acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(bytes))));
  }
  std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i]));
  return total;
}

std::uint64_t and_popcount_neon(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t both = vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i));
    const uint8x16_t bytes = vcntq_u8(vreinterpretq_u8_u64(both));
    acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(bytes))));
  }
  std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return total;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void add_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void damp_neon(double* x, const double* update, double damping, std::size_t n) {
  const double keep = 1.0 - damping;
  const float64x2_t vd = vdupq_n_f64(damping);
  const float64x2_t vk = vdupq_n_f64(keep);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t old = vmulq_f64(vd, vld1q_f64(x + i));
    const float64x2_t upd = vmulq_f64(vk, vld1q_f64(update + i));
    vst1q_f64(x + i, vaddq_f64(old, upd));
  }
  for (; i < n; ++i) x[i] = damping * x[i] + keep * update[i];
}

void accumulate_relu_neon(double* acc, const double* row, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vld1q_f64(row + i);
    // Select instead of vmaxq so NaN maps to 0 like the scalar path.
    const float64x2_t pos = vbslq_f64(vcgtq_f64(r, zero), r, zero);
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), pos));
  }
  for (; i < n; ++i) acc[i] += row[i] > 0.0 ? row[i] : 0.0;
}

}  // namespace

namespace detail {
const KernelTable neon_table{
    Backend::Neon, popcount_neon, and_popcount_neon, dot_neon,
    add_neon,      damp_neon,     accumulate_relu_neon,
};
}  // namespace detail

}  // namespace lexfp::simd
