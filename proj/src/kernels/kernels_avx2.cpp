// Compiled with -mavx2 (no -mfma). Only reached through the dispatcher after
// a CPUID check.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace squish::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d gather(const double* base, const __m128i& offsets) { return _mm256_i32gather_pd(base, offsets, 8); }

template <int Dim>
std::size_t spring_forces_impl(const SpringBatch& b, std::span<const double> state, SpringForceOut& out) {
  const std::size_t n = b.size();
  const std::size_t vec_end = n - n % kLanes;
  const double* s = state.data();
  const __m256d zero = _mm256_setzero_pd();
  std::size_t degenerate = 0;

  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    const __m128i h = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b.head_offset.data() + i));
    const __m128i t = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b.tail_offset.data() + i));

    const __m256d dx = _mm256_sub_pd(gather(s, t), gather(s, h));
    const __m256d dy = _mm256_sub_pd(gather(s + 1, t), gather(s + 1, h));
    __m256d len2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    __m256d dz = zero;
    if constexpr (Dim == 3) {
      dz = _mm256_sub_pd(gather(s + 2, t), gather(s + 2, h));
      len2 = _mm256_add_pd(len2, _mm256_mul_pd(dz, dz));
    }
    const __m256d len = _mm256_sqrt_pd(len2);
    const __m256d is_zero = _mm256_cmp_pd(len, zero, _CMP_EQ_OQ);
    degenerate += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(is_zero)));

    const __m256d ux = _mm256_div_pd(dx, len);
    const __m256d uy = _mm256_div_pd(dy, len);
    const __m256d dvx = _mm256_sub_pd(gather(s + Dim, t), gather(s + Dim, h));
    const __m256d dvy = _mm256_sub_pd(gather(s + Dim + 1, t), gather(s + Dim + 1, h));
    __m256d rel = _mm256_add_pd(_mm256_mul_pd(dvx, ux), _mm256_mul_pd(dvy, uy));
    __m256d uz = zero;
    if constexpr (Dim == 3) {
      uz = _mm256_div_pd(dz, len);
      const __m256d dvz = _mm256_sub_pd(gather(s + Dim + 2, t), gather(s + Dim + 2, h));
      rel = _mm256_add_pd(rel, _mm256_mul_pd(dvz, uz));
    }
    const __m256d stretch = _mm256_mul_pd(_mm256_sub_pd(len, _mm256_loadu_pd(b.rest.data() + i)),
                                          _mm256_loadu_pd(b.ks.data() + i));
    const __m256d f = _mm256_add_pd(stretch, _mm256_mul_pd(rel, _mm256_loadu_pd(b.kd.data() + i)));

    _mm256_storeu_pd(out.fx.data() + i, _mm256_blendv_pd(_mm256_mul_pd(f, ux), zero, is_zero));
    _mm256_storeu_pd(out.fy.data() + i, _mm256_blendv_pd(_mm256_mul_pd(f, uy), zero, is_zero));
    if constexpr (Dim == 3) {
      _mm256_storeu_pd(out.fz.data() + i, _mm256_blendv_pd(_mm256_mul_pd(f, uz), zero, is_zero));
    } else {
      _mm256_storeu_pd(out.fz.data() + i, zero);
    }
  }
  return degenerate + scalar::spring_forces_range(b, state, Dim, out, vec_end, n);
}

std::size_t spring_forces(const SpringBatch& batch, std::span<const double> state, int dim, SpringForceOut& out) {
  out.resize(batch.size());
  return dim == 3 ? spring_forces_impl<3>(batch, state, out) : spring_forces_impl<2>(batch, state, out);
}

void axpy(std::span<double> out, std::span<const double> y, double h, std::span<const double> k) {
  const std::size_t n = out.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d vh = _mm256_set1_pd(h);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y.data() + i), _mm256_mul_pd(vh, _mm256_loadu_pd(k.data() + i)));
    _mm256_storeu_pd(out.data() + i, r);
  }
  scalar::axpy_range(out, y, h, k, vec_end);
}

void midpoint(std::span<double> out, std::span<const double> y0, std::span<const double> k1,
              std::span<const double> k2, double h) {
  const std::size_t n = out.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d half = _mm256_set1_pd(0.5);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    const __m256d avg =
        _mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(k1.data() + i), _mm256_loadu_pd(k2.data() + i)), half);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_loadu_pd(y0.data() + i), _mm256_mul_pd(vh, avg)));
  }
  scalar::midpoint_range(out, y0, k1, k2, h, vec_end);
}

void rk4(std::span<double> out, std::span<const double> y0, std::span<const double> k1, std::span<const double> k2,
         std::span<const double> k3, std::span<const double> k4, double h) {
  const std::size_t n = out.size();
  const std::size_t vec_end = n - n % kLanes;
  const __m256d sixth = _mm256_set1_pd(h / 6.0);
  const __m256d two = _mm256_set1_pd(2.0);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    __m256d sum = _mm256_add_pd(_mm256_loadu_pd(k1.data() + i), _mm256_mul_pd(two, _mm256_loadu_pd(k2.data() + i)));
    sum = _mm256_add_pd(sum, _mm256_mul_pd(two, _mm256_loadu_pd(k3.data() + i)));
    sum = _mm256_add_pd(sum, _mm256_loadu_pd(k4.data() + i));
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_loadu_pd(y0.data() + i), _mm256_mul_pd(sixth, sum)));
  }
  scalar::rk4_range(out, y0, k1, k2, k3, k4, h, vec_end);
}

}  // namespace

const KernelTable* table() {
  static const KernelTable t{&spring_forces, &axpy, &midpoint, &rk4};
  return &t;
}

}  // namespace squish::kernels::avx2
