#pragma once

// Grid discretization of the axis-increment form and spectral-gap estimation.
//
// Nodes are cell centers of a uniform grid on [-R, R]^d (d = 1 or 2). The
// discrete energy is the energy of the piecewise-linear interpolant along
// each axis line: pair couplings come from exact integrals of the |z|^{-1-a}
// kernel against cubic B-spline correlations of the hat basis, so the
// singular short-range part is kept, and the quadratic form of the constant
// vector is exactly zero. Pair weights carry the average of the two cell
// masses; everything reduces to a lag kernel per axis line.

#include <string>
#include <vector>

#include "axistable/potential.hpp"
#include "axistable/test_function.hpp"

namespace axistable {

// Exact hat-basis lag weights w_m, m = 1..count, in unit spacing, in the
// pair-coupling convention: the PL-interpolant energy on a unit-spaced line
// with cell masses m_k equals sum_{k<l} (v_k - v_l)^2 (m_k + m_l)/2 w_{l-k}.
std::vector<double> hat_kernel_weights(double alpha, int count);

struct GridForm {
  int dim = 1;
  double box_radius = 0.0;
  int n = 0;        // nodes per axis
  double h = 0.0;   // spacing
  std::vector<double> coords;           // node centers per axis (shared)
  std::vector<double> mass;             // n^dim cell masses under mu_V
  std::vector<double> kernel_centered;  // 2n-1 lag kernel, lag 0 entry is 0

  std::size_t size() const { return mass.size(); }
  double mass_total() const;
  // out = A v with (Av)_p = sum_q W_pq (v_p - v_q); exact 0 on constants
  void apply(const std::vector<double>& v, std::vector<double>& out) const;
  double quadratic(const std::vector<double>& v) const;
  std::vector<double> row_sums() const;  // diag of A, for preconditioning
  // restriction of a test function to the grid nodes
  std::vector<double> sample(const TestFunction& f) const;
};

GridForm assemble(const Potential& pot, StableIndex alpha, double box_radius,
                  int n);

struct GapResult {
  double lambda1 = 0.0;
  std::vector<double> minimizer;
  int iterations = 0;
  double residual = 0.0;
};

// smallest nonzero generalized eigenvalue of (A, diag(mass)) with the
// constant mode deflated against the mass vector
GapResult estimate_gap(const GridForm& gf, double tol = 1e-8,
                       int max_iter = 1500, std::uint64_t seed = 12345);

enum class WitnessCase { poly_subcritical, log_subcritical };

// widening-plateau family g_n along the heaviest coordinate; only exists in
// the subcritical regimes
TestFunction witness_family(WitnessCase c, double eps, StableIndex alpha,
                            int dim, int axis, int index);

struct GapSweepRow {
  double box_radius;
  int n;
  double lambda1;
  double ratio_to_previous;  // lambda1 / previous lambda1 (1 for the first)
  std::string verdict;       // "stabilized" / "shrinking" / ""
};

std::vector<GapSweepRow> gap_sweep(const Potential& pot, StableIndex alpha,
                                   const std::vector<double>& boxes, int n);

}  // namespace axistable
