#pragma once

#include <cstddef>

// Inner-loop arithmetic for the tagger: a scalar reference implementation and
// an AVX2 variant selected at runtime. Both paths use the same operation
// order (4-lane blocked reductions, no FMA), so their results are
// bit-identical; the equivalence tests assert exactly that.
namespace adaptune::kernels {

enum class Backend { Scalar, Avx2 };

bool avx2_supported() noexcept;

// Default backend is the best supported one; the ADAPTUNE_KERNELS environment
// variable ("scalar" / "avx2") overrides it at startup.
Backend active_backend() noexcept;
void set_backend(Backend);  // throws std::invalid_argument if unavailable

// sum_i a[i]*b[i], accumulated in four independent lanes combined as
// (l0+l1)+(l2+l3), with a sequential scalar tail.
double dot(const double* a, const double* b, std::size_t n) noexcept;

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;

struct AdamStepSpec {
  double lr = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled: p -= lr*weight_decay*p first
  double bias_corr1 = 1.0;    // 1 - beta1^t, or 1.0 with correction disabled
  double bias_corr2 = 1.0;    // 1 - beta2^t
};

// One bias-corrected Adam update over n parameters.
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, const AdamStepSpec& spec) noexcept;

}  // namespace adaptune::kernels
