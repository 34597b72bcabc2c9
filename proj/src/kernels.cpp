#include "adaptune/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "kernels_internal.hpp"

namespace adaptune::kernels {
namespace {

const detail::Ops* ops_for(Backend b) {
#if defined(ADAPTUNE_HAVE_AVX2)
  if (b == Backend::Avx2) return &detail::avx2_ops();
#endif
  (void)b;
  return &detail::scalar_ops();
}

Backend initial_backend() {
  if (const char* env = std::getenv("ADAPTUNE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::Avx2;
  }
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

struct Dispatch {
  std::atomic<Backend> backend;
  std::atomic<const detail::Ops*> ops;
  Dispatch() {
    const Backend b = initial_backend();
    backend.store(b);
    ops.store(ops_for(b));
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

bool avx2_supported() noexcept {
#if defined(ADAPTUNE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend active_backend() noexcept { return dispatch().backend.load(); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported()) {
    throw std::invalid_argument("AVX2 kernels are not available on this host");
  }
  dispatch().backend.store(b);
  dispatch().ops.store(ops_for(b));
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
  return dispatch().ops.load()->dot(a, b, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) noexcept {
  dispatch().ops.load()->axpy(a, x, y, n);
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, const AdamStepSpec& spec) noexcept {
  dispatch().ops.load()->adam(p, m, v, g, n, spec);
}

}  // namespace adaptune::kernels
