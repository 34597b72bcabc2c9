// Scalar reference kernels. The 4-lane accumulation in dot() mirrors the
// AVX2 register layout so both backends produce bit-identical sums.

#include <cmath>

#include "kernels_internal.hpp"

namespace adaptune::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double lane0 = 0.0, lane1 = 0.0, lane2 = 0.0, lane3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane0 += a[i] * b[i];
    lane1 += a[i + 1] * b[i + 1];
    lane2 += a[i + 2] * b[i + 2];
    lane3 += a[i + 3] * b[i + 3];
  }
  double acc = (lane0 + lane1) + (lane2 + lane3);
  for (; i < n; ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
  }
}

void adam_scalar(double* p, double* m, double* v, const double* g,
                 std::size_t n, const AdamStepSpec& s) {
  const double lr_wd = s.lr * s.weight_decay;
  const double one_minus_b1 = 1.0 - s.beta1;
  const double one_minus_b2 = 1.0 - s.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] -= lr_wd * p[i];
    m[i] = s.beta1 * m[i] + one_minus_b1 * g[i];
    v[i] = s.beta2 * v[i] + one_minus_b2 * (g[i] * g[i]);
    const double m_hat = m[i] / s.bias_corr1;
    const double v_hat = v[i] / s.bias_corr2;
    p[i] -= s.lr * (m_hat / (std::sqrt(v_hat) + s.eps));
  }
}

}  // namespace

const Ops& scalar_ops() noexcept {
  static const Ops ops{dot_scalar, axpy_scalar, adam_scalar};
  return ops;
}

}  // namespace adaptune::kernels::detail
