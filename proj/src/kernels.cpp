#include "axistable/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace axistable::kernels {

#if defined(AXISTABLE_BUILD_AVX2)
const Backend* avx2_backend_impl();
#endif

const Backend* avx2_backend() {
#if defined(AXISTABLE_BUILD_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return avx2_backend_impl();
#endif
  return nullptr;
}

namespace {

const Backend* select() {
  // AXISTABLE_KERNELS=scalar forces the reference path (used by the
  // equivalence tests and handy when bisecting numerical differences).
  if (const char* env = std::getenv("AXISTABLE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_backend();
  }
  if (const Backend* simd = avx2_backend()) return simd;
  return &scalar_backend();
}

}  // namespace

const Backend& backend() {
  static const Backend* chosen = select();
  return *chosen;
}

std::string_view backend_name() { return backend().name; }

}  // namespace axistable::kernels
