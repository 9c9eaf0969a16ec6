#include "axistable/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "axistable/errors.hpp"
#include "axistable/fits.hpp"

namespace axistable {

double sample_stable_increment(const StableSamplerSpec& spec, RngStream& rng) {
  const double a = spec.alpha.alpha;
  const double u = rng.uniform(-M_PI_2, M_PI_2);
  double s;
  if (std::abs(a - 1.0) < 1e-12) {
    s = std::tan(u);
  } else {
    const double e = rng.exponential();
    s = std::sin(a * u) / std::pow(std::cos(u), 1.0 / a) *
        std::pow(std::cos((1.0 - a) * u) / e, (1.0 - a) / a);
  }
  return std::pow(spec.t, 1.0 / a) * s;
}

AxisJump sample_axis_jump(double alpha, double delta, int dim, RngStream& rng) {
  AxisJump j;
  j.axis = rng.uniform_index(dim);
  j.z = rng.sign() * delta * std::pow(rng.uniform(), -1.0 / alpha);
  return j;
}

JumpChainState make_chain_state(const Potential& pot, std::vector<double> x0,
                                double delta) {
  JumpChainState st;
  st.x = std::move(x0);
  st.delta = delta;
  st.envelope_m = std::exp(pot.log_sup_density() - pot.log_density(st.x));
  return st;
}

StepOutcome thinning_step(const Potential& pot, StableIndex alpha,
                          const JumpChainState& state, RngStream& rng) {
  const int d = pot.dim();
  const double a = alpha.alpha;
  StepOutcome out;
  out.state = state;
  const double m = state.envelope_m;
  const double rate = d * (m + 1.0) * std::pow(state.delta, -a) / a;
  out.state.clock += rng.exponential() / rate;
  const AxisJump j = sample_axis_jump(a, state.delta, d, rng);
  std::vector<double> y = state.x;
  y[static_cast<std::size_t>(j.axis)] += j.z;
  const double ratio = std::exp(pot.log_density(y) - pot.log_density(state.x));
  const double accept = (ratio + 1.0) / (m + 1.0);
  if (accept > 1.0 + 1e-12)
    throw numeric_error("thinning envelope violated: acceptance > 1", accept, m);
  if (rng.uniform() < accept) {
    out.state.x = std::move(y);
    out.state.envelope_m =
        std::exp(pot.log_sup_density() - pot.log_density(out.state.x));
    out.accepted = true;
  }
  return out;
}

// ------------------------------------------------------------- axis chain ---

AxisChain::AxisChain(const Potential& pot, StableIndex alpha, double delta)
    : pot_(pot), alpha_(alpha.alpha), delta_(delta) {
  if (!pot.product())
    throw config_error("the axis event engine requires a product family");
  rate_free_ = pot.dim() * std::pow(delta, -alpha_) / alpha_;
}

void AxisChain::next_event(std::vector<double>& x, double& clock,
                           RngStream& rng) const {
  const int d = pot_.dim();
  const double a = alpha_;
  for (;;) {
    // per-coordinate envelope masses for the density-ratio part
    double total = rate_free_;
    std::vector<double> mass1(static_cast<std::size_t>(d));
    std::vector<double> mass2(static_cast<std::size_t>(d));
    std::vector<double> big_l(static_cast<std::size_t>(d));
    std::vector<double> bound1(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const Marginal1D& m = pot_.marginal(i);
      const double xi = x[static_cast<std::size_t>(i)];
      const double log_fxi = m.log_factor(xi);
      const double l = std::max(delta_, 0.5 * std::abs(xi));
      big_l[static_cast<std::size_t>(i)] = l;
      double m1 = 0.0, b1 = 1.0;
      if (l > delta_) {
        b1 = std::exp(m.log_sup_beyond(0.5 * std::abs(xi)) - log_fxi);
        m1 = b1 * (std::pow(delta_, -a) - std::pow(l, -a)) / a;
      }
      const double m2 = 0.5 * std::pow(l, -1.0 - a) *
                        std::exp(std::log(m.unnorm_mass()) - log_fxi);
      mass1[static_cast<std::size_t>(i)] = m1;
      mass2[static_cast<std::size_t>(i)] = m2;
      bound1[static_cast<std::size_t>(i)] = b1;
      total += m1 + m2;
    }

    clock += rng.exponential() / total;
    ++proposals_;
    double pick = rng.uniform() * total;
    if (pick < rate_free_) {
      // state-independent part: always an accepted jump
      const AxisJump j = sample_axis_jump(a, delta_, d, rng);
      x[static_cast<std::size_t>(j.axis)] += j.z;
      ++accepted_;
      return;
    }
    pick -= rate_free_;
    int axis = 0;
    bool region1 = true;
    for (int i = 0; i < d; ++i) {
      if (pick < mass1[static_cast<std::size_t>(i)]) {
        axis = i;
        region1 = true;
        break;
      }
      pick -= mass1[static_cast<std::size_t>(i)];
      if (pick < mass2[static_cast<std::size_t>(i)]) {
        axis = i;
        region1 = false;
        break;
      }
      pick -= mass2[static_cast<std::size_t>(i)];
    }
    const Marginal1D& m = pot_.marginal(axis);
    const double xi = x[static_cast<std::size_t>(axis)];
    const double log_fxi = m.log_factor(xi);
    const double l = big_l[static_cast<std::size_t>(axis)];
    if (region1) {
      // |z| in (delta, L], truncated Pareto
      const double da = std::pow(delta_, -a);
      const double la = std::pow(l, -a);
      const double zabs = std::pow(da - rng.uniform() * (da - la), -1.0 / a);
      const double z = rng.sign() * zabs;
      const double ratio = std::exp(m.log_factor(xi + z) - log_fxi);
      if (rng.uniform() * bound1[static_cast<std::size_t>(axis)] < ratio) {
        x[static_cast<std::size_t>(axis)] += z;
        ++accepted_;
        return;
      }
    } else {
      // landing point from the marginal; envelope covers |z| > L only
      const double w = m.quantile(rng.uniform());
      const double z = w - xi;
      if (std::abs(z) > l &&
          rng.uniform() < std::pow(l / std::abs(z), 1.0 + a)) {
        x[static_cast<std::size_t>(axis)] += z;
        ++accepted_;
        return;
      }
    }
  }
}

// ---------------------------------------------------------------- decay -----

namespace {

// per-trajectory slots: the reduction order is fixed by trajectory index, so
// the thread count never changes a bit of the result
struct Slots {
  std::vector<double> prod;  // trajectories x grid, row-major
  std::vector<double> f0;
  long long accepted = 0;
};

long long run_block(const Potential& pot, StableIndex alpha,
                    const TestFunction& f, const DecayOptions& opts,
                    const std::vector<double>& grid, int traj_lo, int traj_hi,
                    Slots& slots) {
  AxisChain chain(pot, alpha, opts.delta);
  const int d = pot.dim();
  const std::size_t nt = grid.size();
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int traj = traj_lo; traj < traj_hi; ++traj) {
    RngStream rng(opts.seed, static_cast<std::uint64_t>(traj) + 1);
    for (int i = 0; i < d; ++i)
      x[static_cast<std::size_t>(i)] = pot.marginal(i).quantile(rng.uniform());
    double clock = 0.0;
    const double f0 = f(x);
    slots.f0[static_cast<std::size_t>(traj)] = f0;
    std::size_t next_idx = 0;
    std::vector<double> prev = x;
    double* row = slots.prod.data() + static_cast<std::size_t>(traj) * nt;
    while (next_idx < nt) {
      if (clock >= grid[next_idx]) {
        // the chain sat at `prev` through this grid time
        row[next_idx] = f0 * f(prev);
        ++next_idx;
        continue;
      }
      prev = x;
      chain.next_event(x, clock, rng);
    }
  }
  return chain.accepted();
}

void fit_report(DecayReport& rep, const DecayOptions& opts) {
  const std::size_t n = rep.time.size();
  rep.rho.assign(n, 0.0);
  rep.se.assign(n, 0.0);
  const double nn = static_cast<double>(rep.count);
  const double mean_f0 = rep.sum_f0 / nn;
  for (std::size_t k = 0; k < n; ++k) {
    const double mean_prod = rep.sum_prod[k] / nn;
    rep.rho[k] = mean_prod - mean_f0 * mean_f0;
    const double var_prod =
        std::max(0.0, rep.sum_prod_sq[k] / nn - mean_prod * mean_prod);
    rep.se[k] = std::sqrt(var_prod / nn);
  }
  // fit window: drop the first decade of the grid, keep points above noise
  const double t_fit = rep.time.front() * std::pow(10.0, opts.fit_exclude_decades);
  std::vector<double> ts, rs;
  rep.insufficient_sampling = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (rep.time[k] < t_fit) continue;
    if (rep.rho[k] < -3.0 * rep.se[k]) rep.insufficient_sampling = true;
    if (rep.rho[k] > 2.0 * rep.se[k]) {
      ts.push_back(rep.time[k]);
      rs.push_back(rep.rho[k]);
    }
  }
  if (ts.size() < 4) {
    rep.fit_tag = "insufficient";
    return;
  }
  LineFit fexp = fit_semilog(ts, rs);
  LineFit fpow = fit_loglog(ts, rs);
  rep.sse_exponential = fexp.sse;
  rep.sse_power = fpow.sse;
  if (fexp.sse <= fpow.sse) {
    rep.fit_tag = "exponential";
    rep.slope_or_rate = -fexp.slope;  // decay rate
    rep.ci_low = -fexp.slope - 2.0 * fexp.stderr_slope;
    rep.ci_high = -fexp.slope + 2.0 * fexp.stderr_slope;
  } else {
    rep.fit_tag = "power";
    rep.slope_or_rate = -fpow.slope;  // decay exponent
    rep.ci_low = -fpow.slope - 2.0 * fpow.stderr_slope;
    rep.ci_high = -fpow.slope + 2.0 * fpow.stderr_slope;
  }
}

}  // namespace

DecayReport decay_estimate(const Potential& pot, StableIndex alpha,
                           const TestFunction& f, const DecayOptions& opts) {
  if (!pot.product())
    throw config_error("decay estimation draws stationary starts per "
                       "coordinate; product families only");
  if (opts.trajectories < 1000)
    throw config_error("decay estimation needs at least 1e3 trajectories");
  DecayReport rep;
  const double t0 = opts.horizon * opts.t_min_fraction;
  const int decades = static_cast<int>(
      std::round(std::log10(opts.horizon / t0) * opts.points_per_decade));
  for (int k = 0; k <= decades; ++k)
    rep.time.push_back(t0 * std::pow(opts.horizon / t0,
                                     static_cast<double>(k) / decades));

  const int nthreads = std::max(1, opts.threads);
  const std::size_t nt = rep.time.size();
  Slots slots;
  slots.prod.assign(static_cast<std::size_t>(opts.trajectories) * nt, 0.0);
  slots.f0.assign(static_cast<std::size_t>(opts.trajectories), 0.0);
  std::vector<std::future<long long>> futs;
  const int per = (opts.trajectories + nthreads - 1) / nthreads;
  for (int b = 0; b < nthreads; ++b) {
    const int lo = b * per;
    const int hi = std::min(opts.trajectories, lo + per);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [&, lo, hi] {
      return run_block(pot, alpha, f, opts, rep.time, lo, hi, slots);
    }));
  }
  rep.accepted_events = 0;
  for (auto& fu : futs) rep.accepted_events += fu.get();

  rep.sum_prod.assign(nt, 0.0);
  rep.sum_prod_sq.assign(nt, 0.0);
  for (int traj = 0; traj < opts.trajectories; ++traj) {
    const double* row = slots.prod.data() + static_cast<std::size_t>(traj) * nt;
    for (std::size_t k = 0; k < nt; ++k) {
      rep.sum_prod[k] += row[k];
      rep.sum_prod_sq[k] += row[k] * row[k];
    }
    const double f0 = slots.f0[static_cast<std::size_t>(traj)];
    rep.sum_f0 += f0;
    rep.sum_f0_sq += f0 * f0;
  }
  rep.count = opts.trajectories;
  fit_report(rep, opts);
  return rep;
}

DecayReport merge_decay(DecayReport a, const DecayReport& b) {
  if (a.time.size() != b.time.size())
    throw config_error("cannot merge decay reports over different grids");
  for (std::size_t k = 0; k < a.time.size(); ++k) {
    a.sum_prod[k] += b.sum_prod[k];
    a.sum_prod_sq[k] += b.sum_prod_sq[k];
  }
  a.sum_f0 += b.sum_f0;
  a.sum_f0_sq += b.sum_f0_sq;
  a.count += b.count;
  a.accepted_events += b.accepted_events;
  DecayOptions opts;  // grid already fixed; only fit options matter
  fit_report(a, opts);
  return a;
}

std::vector<double> occupation_samples(const Potential& pot, StableIndex alpha,
                                       double delta, long long n_accepted,
                                       double sample_dt, std::uint64_t seed) {
  AxisChain chain(pot, alpha, delta);
  RngStream rng(seed, 777);
  const int d = pot.dim();
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    x[static_cast<std::size_t>(i)] = pot.marginal(i).quantile(rng.uniform());
  std::vector<double> samples;
  double clock = 0.0;
  double next_tick = sample_dt;
  std::vector<double> prev = x;
  while (chain.accepted() < n_accepted) {
    prev = x;
    chain.next_event(x, clock, rng);
    // the chain held `prev` through every tick inside this waiting interval
    while (next_tick <= clock) {
      samples.push_back(prev[0]);
      next_tick += sample_dt;
    }
  }
  return samples;
}

double ks_distance(std::vector<double> samples, const Marginal1D& marginal) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double c = marginal.cdf(samples[k]);
    worst = std::max(worst, std::abs(c - static_cast<double>(k) / n));
    worst = std::max(worst, std::abs(static_cast<double>(k + 1) / n - c));
  }
  return worst;
}

}  // namespace axistable
