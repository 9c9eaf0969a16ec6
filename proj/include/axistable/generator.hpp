#pragma once

// Pointwise evaluation of the large-jump generator
//   L_{>1} g(x) = 1/2 sum_i \int_{|z|>1} (g(x+ze_i)-g(x))
//                 (e^{V(x)-V(x+ze_i)} + 1) |z|^{-1-alpha} dz
// and the numerical drift verification for the Holder function
// phi(x) = 1 + sum_i |x_i|^gamma.

#include <span>
#include <vector>

#include "axistable/criteria.hpp"
#include "axistable/potential.hpp"
#include "axistable/test_function.hpp"

namespace axistable {

double phi_lyapunov(std::span<const double> x, double gamma);

struct GeneratorSpec {
  int per_decade = 10;
  int order = 14;
  double tail_rel_tol = 1e-9;  // certified tail cut, relative
  double z_cap = 1e26;         // extension cap before declaring failure
};

// bounded test functions
double apply_generator(const Potential& pot, StableIndex alpha,
                       const TestFunction& g, std::span<const double> x,
                       const GeneratorSpec& spec = {});

// the unbounded Holder drift function phi
double apply_generator_phi(const Potential& pot, StableIndex alpha,
                           double gamma, std::span<const double> x,
                           const GeneratorSpec& spec = {});

struct DriftOptions {
  double r_min = 1.0;
  double r_max = 1e3;
  int steps = 16;      // geometric ladder steps
  int directions = 0;  // 0: 2 in d=1, 32 in d=2, 128 in d=3
  GeneratorSpec gen;
};

struct DriftSample {
  double radius;
  int direction;
  double l_phi;
  double lambda;
  double phi;
  double ratio;  // l_phi / (lambda * phi)
};

struct DriftReport {
  double gamma = 0.0;
  std::vector<double> radii;
  std::vector<double> worst_ratio;  // per shell, max over directions
  std::vector<double> worst_lphi;
  std::vector<DriftSample> samples;
  double r0 = 0.0;  // smallest ladder radius beyond which ratios are negative
  double c1 = 0.0;  // -max ratio beyond r0
  double c2 = 0.0;  // max of L phi on the ball (origin included)
  bool pass = false;
};

// Requires the limsup diagnostic and the positive-liminf hypothesis to have
// PASSed in the profile; refuses with the violated hypothesis otherwise.
DriftReport drift_verify(const Potential& pot, StableIndex alpha, double gamma,
                         const CriteriaProfile& profile,
                         const DriftOptions& opts = {});

}  // namespace axistable
