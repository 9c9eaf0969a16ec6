#pragma once

// Reference measures mu_V(dx) = e^{-V(x)} dx with heavy polynomial or
// log-corrected tails, plus variable-order and custom variants. All density
// arithmetic is carried in log scale; the per-family normalizing constant is
// computed lazily and cached.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axistable/errors.hpp"

namespace axistable {

struct StableIndex {
  double alpha;
  explicit StableIndex(double a) : alpha(a) {
    if (!(a > 0.0) || !(a < 2.0))
      throw config_error("stable index alpha must lie in (0,2), got " +
                         std::to_string(a));
  }
};

// Bounded coefficient field over R^d for variable-order densities. Grammar:
// constants, +, *, min, max, and blend(c_near, c_far, r_lo, r_hi) which
// interpolates smoothly between two constants as |x| moves across [r_lo, r_hi].
class Coefficient {
 public:
  static Coefficient constant(double c);
  static Coefficient add(Coefficient a, Coefficient b);
  static Coefficient mul(Coefficient a, Coefficient b);
  static Coefficient minimum(Coefficient a, Coefficient b);
  static Coefficient maximum(Coefficient a, Coefficient b);
  static Coefficient radial_blend(double near, double far, double r_lo, double r_hi);

  static Coefficient parse(const std::string& text);
  std::string to_string() const;

  double operator()(std::span<const double> x) const;
  double lower_bound() const;  // inf over R^d, from interval arithmetic
  double upper_bound() const;  // sup over R^d

  struct Node;  // definition lives in potential.cpp

 private:
  explicit Coefficient(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// One symmetric 1-d factor f(|t|) of a product density, unnormalized.
// Exposes the closed forms the toolkit leans on: mass, CDF/quantile, two-sided
// tails, and the shape facts (monotonicity, location of the maximum).
class Marginal1D {
 public:
  enum class Kind { poly, log_corrected };

  static Marginal1D poly(double eps);
  static Marginal1D log_corrected(double alpha, double eps);

  Kind kind() const { return kind_; }
  double eps() const { return eps_; }

  double log_factor(double t) const;
  double unnorm_mass() const;      // \int_R f
  double log_normalizer() const;   // -log unnorm_mass
  double cdf(double t) const;      // of the normalized marginal
  double quantile(double u) const; // u in (0,1)
  double tail(double u) const;     // P(|X| > u), u >= 0
  bool monotone() const { return monotone_; }
  double sup_radius() const { return sup_radius_; }
  double log_sup() const { return log_sup_; }
  double log_sup_beyond(double s) const;  // log sup_{|t|>=s} f(t)

 private:
  Marginal1D() = default;
  void build_table();

  Kind kind_ = Kind::poly;
  double eps_ = 1.0;
  double alpha_ = 1.0;  // log_corrected only
  bool monotone_ = true;
  double sup_radius_ = 0.0;
  double log_sup_ = 0.0;
  double unnorm_mass_ = 0.0;
  // log_corrected: one-sided upper tail integrals on a radius grid
  std::vector<double> knot_r_;
  std::vector<double> knot_tail_;  // T(r) = \int_r^inf f, decreasing
};

class Potential {
 public:
  enum class Family { product_polynomial, product_log_corrected, variable_order, custom };

  static Potential product_polynomial(std::vector<double> eps);
  static Potential product_log_corrected(double alpha, std::vector<double> eps);
  static Potential variable_order(std::vector<Coefficient> coeffs);
  // log_unnorm evaluates log e^{-V} up to the normalizer; log_sup_unnorm is
  // the declared boundedness certificate. A support radius makes the density
  // zero outside the centered box and enables exact normalization.
  static Potential custom(int dim,
                          std::function<double(std::span<const double>)> log_unnorm,
                          double log_sup_unnorm,
                          std::optional<double> support_radius = std::nullopt,
                          std::optional<double> declared_normalizer = std::nullopt);
  // Uniform density on [-r, r]^d (a custom with everything declared).
  static Potential uniform_box(int dim, double r);

  Family family() const;
  int dim() const;
  double alpha_hint() const;  // log_corrected families carry their alpha

  // log of e^{-V(x)} *excluding* the normalizer (and any offset).
  double log_unnorm(std::span<const double> x) const;
  // log of the normalized density: log C + log_unnorm - offset = -V(x).
  double log_density(std::span<const double> x) const;
  double potential_value(std::span<const double> x) const { return -log_density(x); }

  double normalizer() const;      // C with C * \int e^{-V} dx = 1 (lazy, cached)
  double log_normalizer() const;
  double log_sup_density() const; // log sup_x of the normalized density

  bool product() const;
  // every 1-d factor is nonincreasing in |t| (closed-form Gamma branches)
  bool product_monotone() const;
  const Marginal1D& marginal(int i) const;
  const Coefficient& coefficient(int i) const;
  const std::vector<double>& epsilons() const;
  std::optional<double> support_radius() const;

  // V -> V + c. The result is a tilt, not a probability measure; used by the
  // invariance checks (all Gamma/Lambda ratios must not move).
  Potential with_offset(double c) const;
  double offset() const;

  struct Density {
    double v;                  // V(x), normalizer included
    double unnorm_density;     // e^{-V(x)} before the normalizer
    double log_unnorm_density;
    bool saturated;            // exp over/underflowed; log value retained
  };
  Density eval_density(std::span<const double> x) const;

 private:
  struct Impl;
  explicit Potential(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
  double offset_ = 0.0;
};

}  // namespace axistable
