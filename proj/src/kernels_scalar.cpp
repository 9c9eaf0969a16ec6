#include "axistable/kernels.hpp"

// Reference kernels. Reductions run in blocks of 8 with a final pass over the
// block partials so the accumulation tree matches the SIMD variants closely.

namespace axistable::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int j = 0; j < 8; ++j) acc[j] += a[i + j] * b[i + j];
  double head = ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
                ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; i < n; ++i) head += a[i] * b[i];
  return head;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int j = 0; j < 8; ++j) acc[j] += a[i + j];
  double head = ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
                ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; i < n; ++i) head += a[i];
  return head;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void line_apply_scalar(const double* k_centered, const double* rho,
                       const double* v, double* out, std::size_t n) {
  // k_centered has length 2n-1; lag t between nodes k and l maps to
  // k_centered[(n-1) - k + l].  The (v_k - v_l) difference form makes the
  // result exactly zero on constant vectors.
  const std::size_t c = n - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double vk = v[k];
    const double rk = rho[k];
    const double* kc = k_centered + (c - k);
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l)
      acc += kc[l] * (0.5 * (rk + rho[l])) * (vk - v[l]);
    out[k] = acc;
  }
}

const Backend kScalar = {dot_scalar, sum_scalar, axpy_scalar, scale_scalar,
                         line_apply_scalar, "scalar"};

}  // namespace

const Backend& scalar_backend() { return kScalar; }

}  // namespace axistable::kernels
