#pragma once

// Sampling: the cylindrical stable increments (one CMS draw per coordinate),
// the Pareto axis-jump proposal, and the reversible large-jump chain
// simulated exactly by thinning. Two interchangeable event engines drive the
// chain: the global-envelope one follows the textbook construction with
// M(x) = e^{V(x)} sup e^{-V}; the axis engine uses per-coordinate envelopes
// that stay within a constant factor of the true jump rate, so far excursions
// cost O(1) work per accepted event. Both produce the same law; the axis
// engine is the default for long runs.

#include <cstdint>
#include <string>
#include <vector>

#include "axistable/potential.hpp"
#include "axistable/rng.hpp"
#include "axistable/test_function.hpp"

namespace axistable {

struct StableSamplerSpec {
  StableIndex alpha;
  double t = 1.0;
};

// one draw of t^{1/alpha} S, S standard symmetric alpha-stable
double sample_stable_increment(const StableSamplerSpec& spec, RngStream& rng);

struct AxisJump {
  int axis;
  double z;  // |z| > delta
};

AxisJump sample_axis_jump(double alpha, double delta, int dim, RngStream& rng);

struct JumpChainState {
  std::vector<double> x;
  double clock = 0.0;
  double delta = 1.0;
  double envelope_m = 1.0;  // e^{V(x)} sup e^{-V}, recomputed per visit
};

JumpChainState make_chain_state(const Potential& pot, std::vector<double> x0,
                                double delta);

struct StepOutcome {
  JumpChainState state;
  bool accepted = false;
};

// one proposal of the global-envelope thinning chain (fictitious events keep
// the state and advance the clock)
StepOutcome thinning_step(const Potential& pot, StableIndex alpha,
                          const JumpChainState& state, RngStream& rng);

// Event engine with per-coordinate envelopes (product families only).
class AxisChain {
 public:
  AxisChain(const Potential& pot, StableIndex alpha, double delta);

  // advances to the next accepted jump, mutating x and clock
  void next_event(std::vector<double>& x, double& clock, RngStream& rng) const;

  long long proposals() const { return proposals_; }
  long long accepted() const { return accepted_; }

 private:
  const Potential pot_;
  double alpha_;
  double delta_;
  double rate_free_;  // d delta^{-alpha}/alpha
  mutable long long proposals_ = 0;
  mutable long long accepted_ = 0;
};

struct DecayOptions {
  double horizon = 1e3;
  int trajectories = 10000;
  double delta = 1.0;
  std::uint64_t seed = 1;
  int points_per_decade = 12;
  double t_min_fraction = 1e-3;
  int threads = 1;
  int fit_exclude_decades = 1;  // burn-in of the fit, not of the chain
};

struct DecayReport {
  std::vector<double> time;
  std::vector<double> rho;     // stationary autocovariance of f
  std::vector<double> se;      // standard errors
  // raw accumulators (mergeable)
  std::vector<double> sum_prod;
  std::vector<double> sum_prod_sq;
  double sum_f0 = 0.0;
  double sum_f0_sq = 0.0;
  long long count = 0;

  std::string fit_tag;         // "exponential" or "power"
  double slope_or_rate = 0.0;  // decay rate (exp) or exponent (power)
  double ci_low = 0.0, ci_high = 0.0;
  double sse_exponential = 0.0, sse_power = 0.0;
  bool insufficient_sampling = false;  // negative tail beyond noise
  long long accepted_events = 0;
};

DecayReport decay_estimate(const Potential& pot, StableIndex alpha,
                           const TestFunction& f, const DecayOptions& opts);

// combine two partial reports over the same grid and refit
DecayReport merge_decay(DecayReport a, const DecayReport& b);

// run the chain from a stationary start and collect the first-coordinate
// occupation samples at unit clock ticks until n_accepted jumps happened
std::vector<double> occupation_samples(const Potential& pot, StableIndex alpha,
                                       double delta, long long n_accepted,
                                       double sample_dt, std::uint64_t seed);

// two-sided Kolmogorov-Smirnov distance of samples against a marginal CDF
double ks_distance(std::vector<double> samples, const Marginal1D& marginal);

}  // namespace axistable
