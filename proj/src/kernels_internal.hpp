#pragma once

#include "adaptune/kernels.hpp"

namespace adaptune::kernels::detail {

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*adam)(double*, double*, double*, const double*, std::size_t,
               const AdamStepSpec&);
};

const Ops& scalar_ops() noexcept;
#if defined(ADAPTUNE_HAVE_AVX2)
const Ops& avx2_ops() noexcept;
#endif

}  // namespace adaptune::kernels::detail
