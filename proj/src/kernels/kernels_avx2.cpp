#include <immintrin.h>

#include "hierent/kernels.hpp"
#include "sincos_poly.hpp"

namespace hierent::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

inline void sincos_pi(__m256d v, __m256d& s, __m256d& c) {
  using namespace detail;
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(v, half), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(v, _mm256_mul_pd(two, k));
  const __m256d abs_r = _mm256_andnot_pd(sign_mask, r);
  const __m256d fold = _mm256_cmp_pd(abs_r, half, _CMP_GT_OQ);
  const __m256d signed_one = _mm256_or_pd(one, _mm256_and_pd(sign_mask, r));
  const __m256d rr = _mm256_blendv_pd(r, _mm256_sub_pd(signed_one, r), fold);

  const __m256d x = _mm256_mul_pd(_mm256_set1_pd(kPi), rr);
  const __m256d x2 = _mm256_mul_pd(x, x);
  __m256d sp = _mm256_set1_pd(kSin[kSinTerms - 1]);
  for (int i = kSinTerms - 2; i >= 0; --i) sp = _mm256_add_pd(_mm256_mul_pd(sp, x2), _mm256_set1_pd(kSin[i]));
  __m256d cp = _mm256_set1_pd(kCos[kCosTerms - 1]);
  for (int i = kCosTerms - 2; i >= 0; --i) cp = _mm256_add_pd(_mm256_mul_pd(cp, x2), _mm256_set1_pd(kCos[i]));
  s = _mm256_add_pd(x, _mm256_mul_pd(x, _mm256_mul_pd(x2, sp)));
  const __m256d cc = _mm256_add_pd(one, _mm256_mul_pd(x2, cp));
  c = _mm256_blendv_pd(cc, _mm256_xor_pd(cc, sign_mask), fold);
}

inline __m256d cube_cell(__m256d value, __m256d cells) {
  const __m256d q = _mm256_floor_pd(_mm256_mul_pd(value, cells));
  return _mm256_sub_pd(q, _mm256_mul_pd(cells, _mm256_floor_pd(_mm256_div_pd(q, cells))));
}

}  // namespace

void advance(const DisplacementStep& step, const Block& block) {
  const int d = block.dim;
  const double* a = step.matrix;
  const std::size_t vec_end = block.count - block.count % kLanes;
  const __m256d two_a = _mm256_set1_pd(2.0 * step.amplitude);
  const __m256d cb = _mm256_set1_pd(step.cos_base);
  const __m256d sb = _mm256_set1_pd(step.sin_base);
  __m256d v[kMaxDim];
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    for (int c = 0; c < d; ++c) v[c] = _mm256_loadu_pd(block.coords[c] + i);
    if (step.amplitude != 0.0) {
      __m256d s, co;
      sincos_pi(v[step.read], s, co);
      const __m256d t1 = _mm256_mul_pd(two_a, s);
      const __m256d t2 = _mm256_sub_pd(_mm256_mul_pd(cb, co), _mm256_mul_pd(sb, s));
      v[step.write] = _mm256_add_pd(v[step.write], _mm256_mul_pd(t1, t2));
    }
    for (int r = 0; r < d; ++r) {
      __m256d acc = _mm256_mul_pd(_mm256_set1_pd(a[r * d]), v[0]);
      for (int c = 1; c < d; ++c) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(a[r * d + c]), v[c]));
      _mm256_storeu_pd(block.coords[r] + i, acc);
    }
  }
  if (vec_end < block.count) {
    double* tail[kMaxDim];
    for (int c = 0; c < d; ++c) tail[c] = block.coords[c] + vec_end;
    scalar::advance(step, Block{d, block.count - vec_end, tail});
  }
}

void mark_ball_exits(const Block& block, double eps2, int step, int* survival) {
  const int d = block.dim;
  const std::size_t vec_end = block.count - block.count % kLanes;
  const __m256d threshold = _mm256_set1_pd(eps2);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    __m256d x = _mm256_loadu_pd(block.coords[0] + i);
    __m256d dist2 = _mm256_mul_pd(x, x);
    for (int c = 1; c < d; ++c) {
      x = _mm256_loadu_pd(block.coords[c] + i);
      dist2 = _mm256_add_pd(dist2, _mm256_mul_pd(x, x));
    }
    const int outside = _mm256_movemask_pd(_mm256_cmp_pd(dist2, threshold, _CMP_GE_OQ));
    if (outside == 0) continue;
    for (std::size_t lane = 0; lane < kLanes; ++lane)
      if ((outside >> lane & 1) && survival[i + lane] == kAlive) survival[i + lane] = step;
  }
  if (vec_end < block.count) {
    double* tail[kMaxDim];
    for (int c = 0; c < d; ++c) tail[c] = block.coords[c] + vec_end;
    scalar::mark_ball_exits(Block{d, block.count - vec_end, tail}, eps2, step, survival + vec_end);
  }
}

void mark_cube_exits(const Block& block, const double* ref, const double* ref_cell, double cells, int step,
                     int* survival) {
  const int d = block.dim;
  const std::size_t vec_end = block.count - block.count % kLanes;
  const __m256d cells_v = _mm256_set1_pd(cells);
  for (std::size_t i = 0; i < vec_end; i += kLanes) {
    __m256d differs = _mm256_setzero_pd();
    for (int c = 0; c < d; ++c) {
      const __m256d pos = _mm256_add_pd(_mm256_set1_pd(ref[c]), _mm256_loadu_pd(block.coords[c] + i));
      const __m256d cell = cube_cell(pos, cells_v);
      differs = _mm256_or_pd(differs, _mm256_cmp_pd(cell, _mm256_set1_pd(ref_cell[c]), _CMP_NEQ_UQ));
    }
    const int outside = _mm256_movemask_pd(differs);
    if (outside == 0) continue;
    for (std::size_t lane = 0; lane < kLanes; ++lane)
      if ((outside >> lane & 1) && survival[i + lane] == kAlive) survival[i + lane] = step;
  }
  if (vec_end < block.count) {
    double* tail[kMaxDim];
    for (int c = 0; c < d; ++c) tail[c] = block.coords[c] + vec_end;
    scalar::mark_cube_exits(Block{d, block.count - vec_end, tail}, ref, ref_cell, cells, step, survival + vec_end);
  }
}

}  // namespace hierent::kernels::avx2
