#include "axistable/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axistable/errors.hpp"
#include "axistable/quadrature.hpp"

namespace axistable {

double phi_lyapunov(std::span<const double> x, double gamma) {
  double acc = 1.0;
  for (double xi : x) acc += std::pow(std::abs(xi), gamma);
  return acc;
}

namespace {

// e^{V(x) - V(x + z e_i)} as a ratio of unnormalized densities; the
// normalizer and any tilt cancel.
struct DensityRatio {
  const Potential* pot;
  std::vector<double> base;  // copy of x
  int axis;
  double log_rho_x;

  DensityRatio(const Potential& p, std::span<const double> x, int i)
      : pot(&p), base(x.begin(), x.end()), axis(i),
        log_rho_x(p.log_unnorm(base)) {}

  double operator()(double z) const {
    std::vector<double> y = base;
    y[static_cast<std::size_t>(axis)] += z;
    return std::exp(pot->log_unnorm(y) - log_rho_x);
  }

  // upper bound on \int_{|z| > Z} ratio(z) |z|^{-1-alpha} dz per sign
  double tail_bound(double big_z, double alpha) const {
    if (pot->product()) {
      const Marginal1D& m = pot->marginal(axis);
      const double log_fxi =
          m.log_factor(base[static_cast<std::size_t>(axis)]);
      return std::pow(big_z, -1.0 - alpha) *
             std::exp(std::log(m.unnorm_mass()) - log_fxi);
    }
    if (pot->support_radius()) {
      // the shifted density vanishes once the point leaves the box
      const double exit =
          *pot->support_radius() +
          std::abs(base[static_cast<std::size_t>(axis)]);
      if (big_z >= exit) return 0.0;
      return std::pow(big_z, -alpha) / alpha *
             std::exp(pot->log_sup_density() - pot->log_normalizer() - log_rho_x);
    }
    // variable order: dominate the factor by the declared lower bound
    const double lb = pot->coefficient(axis).lower_bound();
    const double xi = base[static_cast<std::size_t>(axis)];
    return std::pow(big_z, -1.0 - alpha) * (2.0 / lb) *
           std::pow(1.0 + std::abs(xi), 1.0 + pot->coefficient(axis).upper_bound());
  }
};

// graded breakpoints accumulating toward an interior kink at m0
void push_graded(std::vector<double>& breaks, double m0) {
  if (!(m0 > 0.0)) return;
  breaks.push_back(m0);
  for (int k = 1; k <= 12; ++k) {
    const double off = m0 * std::pow(2.0, -k);
    breaks.push_back(m0 - off);
    breaks.push_back(m0 + off);
  }
}

}  // namespace

double apply_generator(const Potential& pot, StableIndex alpha,
                       const TestFunction& g, std::span<const double> x,
                       const GeneratorSpec& spec) {
  const double a = alpha.alpha;
  double acc = 0.0;
  for (int i = 0; i < pot.dim(); ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const double g0 = g(x);
    DensityRatio ratio(pot, x, i);
    const double exit_z = g.axis_exit(i) + std::abs(xi) + 1e-9;
    auto g_breaks = g.axis_breakpoints(i);
    for (int sign : {1, -1}) {
      auto integrand = [&](double m) {
        const double z = sign * m;
        return (g.eval_shifted(x, i, z) - g0) * (ratio(z) + 1.0) *
               std::pow(m, -1.0 - a);
      };
      std::vector<double> breaks;
      for (double b : g_breaks) {
        const double m = sign > 0 ? b - xi : xi - b;
        if (m > 1.0) breaks.push_back(m);
      }
      const double body_hi = std::max(exit_z, 1.0 + 1e-9);
      acc += integrate_geometric_breaks(integrand, 1.0, body_hi, breaks,
                                        spec.per_decade, spec.order);
      // beyond the exit: increment frozen at its far value
      const double dg_far = g.far_value(x, i, sign) - g0;
      acc += dg_far * std::pow(body_hi, -a) / a;  // the "+1" part, exact
      if (dg_far != 0.0) {
        // density-ratio part: extend in packets until the certified bound
        // falls below tolerance
        double z_lo = body_hi;
        double packet_acc = 0.0;
        for (;;) {
          const double bound = std::abs(dg_far) * ratio.tail_bound(z_lo, a);
          if (bound <=
              spec.tail_rel_tol * (std::abs(acc) + std::abs(packet_acc) + 1e-300))
            break;
          if (z_lo > spec.z_cap)
            throw numeric_error("generator tail extension did not converge",
                                acc, packet_acc);
          const double z_hi = z_lo * 4.0;
          packet_acc += dg_far * integrate_geometric(
                                     [&](double m) {
                                       return ratio(sign * m) *
                                              std::pow(m, -1.0 - a);
                                     },
                                     z_lo, z_hi, spec.per_decade, spec.order);
          z_lo = z_hi;
        }
        acc += packet_acc;
      }
    }
  }
  return 0.5 * acc;
}

double apply_generator_phi(const Potential& pot, StableIndex alpha,
                           double gamma, std::span<const double> x,
                           const GeneratorSpec& spec) {
  const double a = alpha.alpha;
  if (!(gamma > 0.0) || !(gamma < std::min(a, 1.0)))
    throw config_error("drift exponent gamma must lie in (0, min(alpha,1))");
  double acc = 0.0;
  for (int i = 0; i < pot.dim(); ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const double pxi = std::pow(std::abs(xi), gamma);
    DensityRatio ratio(pot, x, i);
    for (int sign : {1, -1}) {
      auto dphi = [&](double m) {
        return std::pow(std::abs(xi + sign * m), gamma) - pxi;
      };
      auto integrand = [&](double m) {
        return dphi(m) * (ratio(sign * m) + 1.0) * std::pow(m, -1.0 - a);
      };
      // |x_i + z|^gamma has a steep kink where x_i + z = 0
      std::vector<double> breaks;
      const double m_kink = sign > 0 ? -xi : xi;
      if (m_kink > 1.0) push_graded(breaks, m_kink);
      double z_lo = 1.0;
      double z_hi = std::max({4.0, 2.0 * std::abs(xi) + 2.0, z_lo * 4.0});
      acc += integrate_geometric_breaks(integrand, z_lo, z_hi, breaks,
                                        spec.per_decade, spec.order);
      // extend until the growth envelope certifies the rest below tolerance
      for (;;) {
        // |dphi| <= z^gamma, so the "+1" rest is <= z^{gamma-a}/(a-gamma) and
        // the ratio rest is <= Z^gamma * (certified density tail bound)
        const double rest_plus = std::pow(z_hi, gamma - a) / (a - gamma);
        const double rest_ratio =
            2.0 * std::pow(z_hi, gamma) * ratio.tail_bound(z_hi, a);
        const double rest = rest_plus + rest_ratio;
        if (rest <= spec.tail_rel_tol * (std::abs(acc) + 1.0)) break;
        if (z_hi > spec.z_cap)
          throw numeric_error("drift-function tail extension did not converge",
                              acc, rest);
        const double z_next = z_hi * 4.0;
        acc += integrate_geometric(integrand, z_hi, z_next, spec.per_decade,
                                   spec.order);
        z_hi = z_next;
      }
    }
  }
  return 0.5 * acc;
}

DriftReport drift_verify(const Potential& pot, StableIndex alpha, double gamma,
                         const CriteriaProfile& profile,
                         const DriftOptions& opts) {
  if (!profile.limsup.pass)
    throw gate_error(
        "drift verification requires the limsup ratio hypothesis to PASS");
  if (!profile.liminf_positive)
    throw gate_error(
        "drift verification requires liminf e^V Gamma_inf / |x|^{1+alpha} > 0 "
        "(diagnostic FAILed)");

  DriftReport rep;
  rep.gamma = gamma;
  const int d = pot.dim();
  const int dirs_n =
      opts.directions > 0 ? opts.directions : (d == 1 ? 2 : (d == 2 ? 32 : 128));
  const auto dirs = direction_grid(d, dirs_n);

  std::vector<double> x(static_cast<std::size_t>(d));
  for (int k = 0; k <= opts.steps; ++k) {
    const double r = opts.r_min * std::pow(opts.r_max / opts.r_min,
                                           static_cast<double>(k) / opts.steps);
    double worst_ratio = -std::numeric_limits<double>::infinity();
    double worst_lphi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      for (int i = 0; i < d; ++i)
        x[static_cast<std::size_t>(i)] = r * dirs[j][static_cast<std::size_t>(i)];
      const double lphi = apply_generator_phi(pot, alpha, gamma, x, opts.gen);
      const double lam = std::exp(log_lambda(pot, alpha, x));
      const double phi = phi_lyapunov(x, gamma);
      const double ratio = lphi / (lam * phi);
      rep.samples.push_back({r, static_cast<int>(j), lphi, lam, phi, ratio});
      worst_ratio = std::max(worst_ratio, ratio);
      worst_lphi = std::max(worst_lphi, lphi);
    }
    rep.radii.push_back(r);
    rep.worst_ratio.push_back(worst_ratio);
    rep.worst_lphi.push_back(worst_lphi);
  }

  // smallest ladder radius beyond which every sampled ratio is negative
  std::size_t idx = rep.radii.size();
  for (std::size_t k = rep.radii.size(); k-- > 0;) {
    if (rep.worst_ratio[k] >= 0.0) break;
    idx = k;
  }
  if (idx < rep.radii.size()) {
    rep.pass = true;
    rep.r0 = rep.radii[idx];
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = idx; k < rep.radii.size(); ++k)
      worst = std::max(worst, rep.worst_ratio[k]);
    rep.c1 = -worst;
    // C2: the generator maximum inside the ball, origin included
    std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
    double c2 = apply_generator_phi(pot, alpha, gamma, origin, opts.gen);
    for (std::size_t k = 0; k < idx; ++k) c2 = std::max(c2, rep.worst_lphi[k]);
    rep.c2 = c2;
  }
  return rep;
}

}  // namespace axistable
