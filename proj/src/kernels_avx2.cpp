// AVX2 kernels. Element order and rounding match the scalar reference:
// mul/add/div/sqrt only (no FMA, no approximate reciprocals), one vector
// accumulator whose lanes are combined as (l0+l1)+(l2+l3).

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace adaptune::kernels::detail {
namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double result = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    result += a[i] * b[i];
  }
  return result;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void adam_avx2(double* p, double* m, double* v, const double* g,
               std::size_t n, const AdamStepSpec& s) {
  const __m256d lr_wd = _mm256_set1_pd(s.lr * s.weight_decay);
  const __m256d b1 = _mm256_set1_pd(s.beta1);
  const __m256d b2 = _mm256_set1_pd(s.beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - s.beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - s.beta2);
  const __m256d bc1 = _mm256_set1_pd(s.bias_corr1);
  const __m256d bc2 = _mm256_set1_pd(s.bias_corr2);
  const __m256d lr = _mm256_set1_pd(s.lr);
  const __m256d eps = _mm256_set1_pd(s.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vp = _mm256_loadu_pd(p + i);
    __m256d vm = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    const __m256d vg = _mm256_loadu_pd(g + i);

    vp = _mm256_sub_pd(vp, _mm256_mul_pd(lr_wd, vp));
    vm = _mm256_add_pd(_mm256_mul_pd(b1, vm), _mm256_mul_pd(omb1, vg));
    vv = _mm256_add_pd(_mm256_mul_pd(b2, vv),
                       _mm256_mul_pd(omb2, _mm256_mul_pd(vg, vg)));
    const __m256d m_hat = _mm256_div_pd(vm, bc1);
    const __m256d v_hat = _mm256_div_pd(vv, bc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps);
    vp = _mm256_sub_pd(vp, _mm256_mul_pd(lr, _mm256_div_pd(m_hat, denom)));

    _mm256_storeu_pd(p + i, vp);
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
  }
  const double lr_wd_s = s.lr * s.weight_decay;
  const double omb1_s = 1.0 - s.beta1;
  const double omb2_s = 1.0 - s.beta2;
  for (; i < n; ++i) {
    p[i] -= lr_wd_s * p[i];
    m[i] = s.beta1 * m[i] + omb1_s * g[i];
    v[i] = s.beta2 * v[i] + omb2_s * (g[i] * g[i]);
    const double m_hat = m[i] / s.bias_corr1;
    const double v_hat = v[i] / s.bias_corr2;
    p[i] -= s.lr * (m_hat / (std::sqrt(v_hat) + s.eps));
  }
}

}  // namespace

const Ops& avx2_ops() noexcept {
  static const Ops ops{dot_avx2, axpy_avx2, adam_avx2};
  return ops;
}

}  // namespace adaptune::kernels::detail
