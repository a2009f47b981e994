#include <immintrin.h>

#include "step_body.hpp"

namespace ipdrl::kernels::detail {

namespace {

struct Vec4 {
  __m256d v;
};
struct Mask4 {
  __m256d m;
};

inline Vec4 operator+(Vec4 a, Vec4 b) { return {_mm256_add_pd(a.v, b.v)}; }
inline Vec4 operator-(Vec4 a, Vec4 b) { return {_mm256_sub_pd(a.v, b.v)}; }
inline Vec4 operator*(Vec4 a, Vec4 b) { return {_mm256_mul_pd(a.v, b.v)}; }
inline Vec4 operator/(Vec4 a, Vec4 b) { return {_mm256_div_pd(a.v, b.v)}; }

inline void store(double* p, Vec4 a) { _mm256_storeu_pd(p, a.v); }
inline Mask4 greater(Vec4 a, Vec4 b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
inline Vec4 select(Mask4 mask, Vec4 a, Vec4 b) { return {_mm256_blendv_pd(b.v, a.v, mask.m)}; }
inline Vec4 abs_value(Vec4 a) { return {_mm256_andnot_pd(_mm256_set1_pd(-0.0), a.v)}; }
// Matches the scalar a < b ? b : a.
inline Vec4 max_value(Vec4 a, Vec4 b) { return {_mm256_max_pd(b.v, a.v)}; }

}  // namespace

template <>
inline Vec4 load<Vec4>(const double* p) {
  return {_mm256_loadu_pd(p)};
}
template <>
inline Vec4 splat<Vec4>(double value) {
  return {_mm256_set1_pd(value)};
}

void step_avx2(const StepParams& params, double* planes, std::size_t stride, double* max_change) {
  for (std::size_t lane = 0; lane < stride; lane += 4) {
    step_lanes<Vec4>(params, planes, stride, lane, max_change);
  }
}

}  // namespace ipdrl::kernels::detail
