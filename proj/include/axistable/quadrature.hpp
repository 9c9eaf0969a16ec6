#pragma once

// Quadrature building blocks shared by the form, generator and marginal
// code: Gauss-Legendre rules, geometric (log-spaced) panel subdivision for
// power-law integrands, and a half-line integrator for heavy-tailed
// densities that decay like t^{-(1+a)} times a slowly varying factor.

#include <functional>
#include <span>
#include <vector>

namespace axistable {

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Nodes by Newton iteration on the Legendre polynomial; cached per order.
const GaussLegendre& gauss_legendre(int order);

// Integral of f over [a, b] with a single Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int order = 16);

// Integral of f over [a, b] (0 < a < b) on panels whose endpoints are
// geometric in t, `per_decade` panels per decade, GL of `order` per panel.
// Suited to integrands behaving like powers of t.
double integrate_geometric(const std::function<double(double)>& f, double a,
                           double b, int per_decade = 8, int order = 16);

// Same, but additionally splits panels at the given breakpoints (kinks of
// the integrand); points outside (a, b) are ignored.
double integrate_geometric_breaks(const std::function<double(double)>& f,
                                  double a, double b,
                                  std::span<const double> breaks,
                                  int per_decade = 8, int order = 16);

// \int_0^\infty f, where f is smooth on (0, infinity), integrable at 0, and
// eventually dominated by t^{-(1+decay)} with decay > 0. [0,1] is handled by
// a graded geometric rule, [1, inf) through the substitution t = e^w with the
// upper cutoff chosen from `decay` and `tail_tol`.
double integrate_halfline(const std::function<double(double)>& f, double decay,
                          double tail_tol = 1e-12, int per_decade = 8,
                          int order = 16);

// A tabulated nondecreasing function with generalized-inverse lookup
// (smallest abscissa whose value reaches the target; ties resolve low).
struct MonotoneTable {
  std::vector<double> x;  // increasing
  std::vector<double> y;  // nondecreasing

  bool empty() const { return x.empty(); }
  double value_at_floor(double q) const;  // y at the largest x <= q
  // inf{ x : y(x) >= target }; +inf when the table never reaches target,
  // 0 when even the first entry does.
  double generalized_inverse(double target) const;
};

}  // namespace axistable
