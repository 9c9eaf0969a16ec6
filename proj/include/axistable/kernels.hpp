#pragma once

// Data-parallel inner loops used by the numeric modules. Every kernel has a
// scalar reference implementation and, on x86-64 with AVX2+FMA, a vectorized
// variant. The active backend is chosen once at runtime from CPUID; scalar
// and SIMD variants are equivalence-tested against each other.
//
// Reductions use a fixed blocked order, so results are reproducible for a
// given binary on a given machine (lane-reordered SIMD sums differ from the
// scalar ones only in the last few ulps).

#include <cstddef>
#include <span>
#include <string_view>

namespace axistable::kernels {

struct Backend {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  // out[k] = sum_l K[center - k + l] * 0.5*(rho[k]+rho[l]) * (v[k]-v[l]),
  // the axis-line application of a translation-invariant pair kernel.
  // K points at a (2n-1)-long array with K[center + t] = coupling at lag |t|.
  void (*line_apply)(const double* k_centered, const double* rho,
                     const double* v, double* out, std::size_t n);
  const char* name;
};

const Backend& backend();            // selected at first use
const Backend& scalar_backend();     // always available, reference semantics
const Backend* avx2_backend();       // nullptr when unavailable

inline double dot(std::span<const double> a, std::span<const double> b) {
  return backend().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) {
  return backend().sum(a.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  backend().axpy(alpha, x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> x) {
  backend().scale(alpha, x.data(), x.size());
}
inline void line_apply(std::span<const double> k_centered,
                       std::span<const double> rho,
                       std::span<const double> v, std::span<double> out) {
  backend().line_apply(k_centered.data(), rho.data(), v.data(), out.data(),
                       v.size());
}

std::string_view backend_name();

}  // namespace axistable::kernels
