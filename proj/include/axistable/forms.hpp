#pragma once

// Numerical evaluation of the singular quadratic forms against mu_V: the
// axis-increment energy (full and large-jump truncated), its bilinear
// polarization, means/variances, relative entropy, the local rate shape, and
// per-inequality residuals on concrete test functions.
//
// Inner z-integrals split at delta_inner; below it the integrand behaves like
// |z|^{1-alpha} and runs on graded panels down to a certified floor, above it
// log-spaced panels run to the support exit, where the analytic tail
// 2 f(x)^2 Z^{-alpha}/alpha takes over. The outer integral maps each product
// coordinate through its quantile (heavy tails become a unit cube).

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "axistable/potential.hpp"
#include "axistable/test_function.hpp"

namespace axistable {

struct QuadratureSpec {
  double delta_inner = 1e-3;  // inner split point
  int inner_per_decade = 8;   // panels per decade above the split
  int inner_order = 12;       // GL order per panel
  int head_per_decade = 3;    // panels per decade below the split
  int head_order = 8;
  double z_hard_max = 1e9;    // cap when no support certificate exists
  int outer_panels = 0;       // per-axis composite panels in u (0: by dim)
  int outer_order = 0;        // GL order per u panel (0: by dim)
  double outer_trunc_tol = 1e-8;
  double target_rel_tol = 2e-5;
  int refine_max = 3;

  QuadratureSpec refined() const;  // one refinement level up
};

enum class Truncation { full, above_one };

// Outer rule: points and probability weights for expectations against mu_V.
struct OuterRule {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;

  double expect(const std::function<double(std::span<const double>)>& g) const;
};

// axis_breaks: per-axis coordinate values where the integrand has kinks
// (panels split there; pass the test function's breakpoints).
OuterRule build_outer_rule(const Potential& pot, const QuadratureSpec& spec,
                           const std::vector<std::vector<double>>& axis_breaks = {});

// D(f,f) or D_{>1}(f,f)
double dirichlet_form(const Potential& pot, StableIndex alpha,
                      const TestFunction& f, const QuadratureSpec& spec = {},
                      Truncation trunc = Truncation::full);

// symmetric bilinear version; bilinear(f,f) coincides with dirichlet_form(f)
double bilinear_form(const Potential& pot, StableIndex alpha,
                     const TestFunction& f, const TestFunction& g,
                     const QuadratureSpec& spec = {},
                     Truncation trunc = Truncation::full);

// D(f, log f) for strictly positive f (entropy right-hand side)
double bilinear_form_log(const Potential& pot, StableIndex alpha,
                         const TestFunction& f, const QuadratureSpec& spec = {},
                         Truncation trunc = Truncation::full);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // computed as E[(f - Ef)^2], never negative
};
Moments variance_and_mean(const Potential& pot, const TestFunction& f,
                          const QuadratureSpec& spec = {});

double mean_abs(const Potential& pot, const TestFunction& f,
                const QuadratureSpec& spec = {});

// mu(f^2 1_{B(0,r)})
double second_moment_in_ball(const Potential& pot, const TestFunction& f,
                             double r, const QuadratureSpec& spec = {});

// Ent_mu(f) = mu(f log f) - mu(f) log mu(f); requires a positive floor
double entropy_functional(const Potential& pot, const TestFunction& f,
                          const QuadratureSpec& spec = {});

// local rate shape: c3 [t ^ (r^alpha sup/inf)]^{-d/alpha} sup^{2+d/a}/inf^{1+d/a}
double local_super_beta(const Potential& pot, StableIndex alpha, double r,
                        double t, double c3 = 1.0);
double log_local_super_beta(const Potential& pot, StableIndex alpha, double r,
                            double t, double c3 = 1.0);

struct ResidualInput {
  enum class Kind { poincare, super_poincare, local_super, entropy, weak };
  Kind kind = Kind::poincare;
  double s = 0.0;        // super_poincare
  double r = 0.0;        // local_super / weak
  double t = 0.0;        // local_super
  double constant = 1.0; // multiplies the free part of the rhs
};

struct Residual {
  std::string kind;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;             // rhs - lhs
  double minimal_constant = 0.0;  // smallest free constant making lhs <= rhs
  bool vacuous = false;           // 0/0 situations (constant f)
  bool satisfied = false;
};

Residual inequality_residual(const ResidualInput& in, const Potential& pot,
                             StableIndex alpha, const TestFunction& f,
                             const QuadratureSpec& spec = {});

}  // namespace axistable
