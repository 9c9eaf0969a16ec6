#pragma once

// The geometric criteria functions attached to a reference measure: the
// one-coordinate infimum/supremum densities Gamma_inf / Gamma_sup, the
// normalized drift strength Lambda, its running radial infimum Phi with
// generalized inverse, and the limsup ratio diagnostic. Everything is
// evaluated in log scale; ratios are formed as log differences.

#include <span>
#include <vector>

#include "axistable/potential.hpp"
#include "axistable/quadrature.hpp"

namespace axistable {

// log of inf over coordinates i with |x_i| >= |x|/sqrt(d) and |u_i| <= 1 of
// the normalized density with the i-th entry replaced by u_i. At x = 0 every
// coordinate is admissible (the condition holds with equality).
double log_gamma_inf(const Potential& pot, std::span<const double> x);

// log of sup over all i and |u_i| >= |x_i| of the same replacement. For
// product families with monotone factors this equals the density itself; the
// general branch samples a geometric ray and is flagged approximate.
double log_gamma_sup(const Potential& pot, std::span<const double> x,
                     bool* approximate = nullptr);

// log Lambda(x) = V(x) + log Gamma_inf(x) - (1+alpha) log(1+|x|).
double log_lambda(const Potential& pot, StableIndex alpha,
                  std::span<const double> x);

struct CriteriaOptions {
  double r_min = 1.0;
  int shells_per_decade = 7;   // ~40 geometric steps over 2^20 by default
  double ladder_span = 1048576.0;  // shells cover [r_min, r_min * span]
  int directions = 0;          // 0: family default (2 in d=1, 64 d=2, 256 d=3)
  double refine_rel_tol = 1e-3;
  int max_refinements = 3;
};

struct PhiTable {
  // radius shells (increasing) and log Phi(r) = log inf_{|x|>=r} Lambda;
  // nondecreasing by construction (running infimum from the top shell down).
  MonotoneTable log_phi;
  // raw per-shell direction minima of log Lambda (not monotone); the slope
  // diagnostics read these, since the suffix minimum flattens decay
  std::vector<double> shell_log_lambda;
  int directions_used = 0;
  int shells_per_decade_used = 0;
  bool converged = true;  // refinement pairs agreed within tolerance

  double phi(double r) const;          // linear scale
  double log_phi_at(double r) const;
  // inf{ u : Phi(u) >= s }; +inf sentinel when sup Phi < s, 0 when immediate.
  double phi_inverse(double s) const;
};

// Tabulates Phi over the shell ladder. If value_target is positive the ladder
// keeps extending (up to radius_cap) until Phi reaches it, so that
// phi_inverse(value_target) is resolvable.
PhiTable build_phi_table(const Potential& pot, StableIndex alpha,
                         const CriteriaOptions& opts = {},
                         double value_target = 0.0,
                         double radius_cap = 1e12);

struct LimsupReport {
  double gamma = 0.0;
  std::vector<double> radii;
  std::vector<double> value;      // max over directions of |x|^{1+a-g} Gsup/Ginf
  std::vector<double> log_value;
  bool pass = false;              // heuristic: decreasing toward 0, top decade
  bool heuristic = true;
};

// Diagnostic for the limsup hypothesis: the tabulated ratio must decrease
// over the top decade of radii. A PASS is a heuristic, never a proof.
LimsupReport limsup_condition_report(const Potential& pot, StableIndex alpha,
                                     double gamma,
                                     std::span<const double> radii,
                                     int directions = 0);

struct CriteriaProfile {
  double gamma = 0.0;
  double alpha = 1.0;
  PhiTable phi;
  LimsupReport limsup;
  // log Phi slope over the top decade of the ladder; the liminf and
  // lim-infinite diagnostics below are heuristic reads of it.
  double top_decade_slope = 0.0;
  bool liminf_positive = false;   // Phi stays bounded away from 0
  bool limit_infinite = false;    // Phi grows without apparent ceiling
};

CriteriaProfile build_criteria_profile(const Potential& pot, StableIndex alpha,
                                       double gamma,
                                       const CriteriaOptions& opts = {},
                                       double phi_value_target = 0.0);

// Direction grid on the unit sphere: +-1 in d=1, uniform angles in d=2,
// Fibonacci points in d=3.
std::vector<std::vector<double>> direction_grid(int dim, int count);

}  // namespace axistable
