#include "axistable/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace axistable {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// inf over |u| <= 1 of a unimodal symmetric 1-d factor sits at an endpoint.
double log_inner_inf_factor(const Marginal1D& m) {
  return std::min(m.log_factor(0.0), m.log_factor(1.0));
}

// Generic inner infimum for non-product families: replace coordinate i by u
// on a grid over [-1, 1] (endpoints included) and take the minimum.
double log_inner_inf_generic(const Potential& pot, std::span<const double> x,
                             int i) {
  std::vector<double> y(x.begin(), x.end());
  double best = kInf;
  const int n = 65;
  for (int k = 0; k < n; ++k) {
    y[static_cast<std::size_t>(i)] = -1.0 + 2.0 * k / (n - 1);
    best = std::min(best, pot.log_density(y));
  }
  return best;
}

}  // namespace

double log_gamma_inf(const Potential& pot, std::span<const double> x) {
  const int d = pot.dim();
  const double r = norm2(x);
  const double threshold = r / std::sqrt(static_cast<double>(d));
  double best = kInf;
  const bool product = pot.product();
  const double log_dens = product ? pot.log_density(x) : 0.0;
  for (int i = 0; i < d; ++i) {
    if (std::abs(x[static_cast<std::size_t>(i)]) < threshold * (1.0 - 1e-12))
      continue;  // not admissible (at x = 0 every coordinate passes)
    double candidate;
    if (product) {
      const Marginal1D& m = pot.marginal(i);
      candidate = log_dens - m.log_factor(x[static_cast<std::size_t>(i)]) +
                  log_inner_inf_factor(m);
    } else {
      candidate = log_inner_inf_generic(pot, x, i);
    }
    best = std::min(best, candidate);
  }
  return best;
}

double log_gamma_sup(const Potential& pot, std::span<const double> x,
                     bool* approximate) {
  if (approximate) *approximate = false;
  const int d = pot.dim();
  if (pot.product()) {
    const double log_dens = pot.log_density(x);
    if (pot.product_monotone()) return log_dens;
    double best = -kInf;
    for (int i = 0; i < d; ++i) {
      const Marginal1D& m = pot.marginal(i);
      const double xi = x[static_cast<std::size_t>(i)];
      best = std::max(best,
                      log_dens - m.log_factor(xi) + m.log_sup_beyond(xi));
    }
    return best;
  }
  // Non-product: estimate the ray supremum by geometric sampling. Flagged
  // approximate.
  if (approximate) *approximate = true;
  std::vector<double> y(x.begin(), x.end());
  double best = -kInf;
  for (int i = 0; i < d; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const double base = std::max(std::abs(xi), 1e-6);
    for (int k = 0; k <= 96; ++k) {
      const double u = base * std::pow(1e6, k / 96.0);
      for (double sgn : {1.0, -1.0}) {
        if (std::abs(u) < std::abs(xi)) continue;
        y[static_cast<std::size_t>(i)] = sgn * u;
        best = std::max(best, pot.log_density(y));
      }
    }
    y[static_cast<std::size_t>(i)] = xi;
  }
  // the untouched point itself (u_i = x_i is always admissible)
  best = std::max(best, pot.log_density(x));
  return best;
}

double log_lambda(const Potential& pot, StableIndex alpha,
                  std::span<const double> x) {
  return log_gamma_inf(pot, x) - pot.log_density(x) -
         (1.0 + alpha.alpha) * std::log1p(norm2(x));
}

std::vector<std::vector<double>> direction_grid(int dim, int count) {
  std::vector<std::vector<double>> dirs;
  if (dim == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
    return dirs;
  }
  if (dim == 2) {
    for (int j = 0; j < count; ++j) {
      const double th = 2.0 * M_PI * (j + 0.5) / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  // d = 3: Fibonacci sphere
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int j = 0; j < count; ++j) {
    const double z = 1.0 - 2.0 * (j + 0.5) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * j;
    dirs.push_back({rho * std::cos(th), rho * std::sin(th), z});
  }
  return dirs;
}

namespace {

int default_directions(int dim) {
  switch (dim) {
    case 1: return 2;
    case 2: return 64;
    default: return 256;
  }
}

// One ladder pass: per-shell minimum of log Lambda over the direction grid,
// then the running infimum from the top shell down (so the stored table is a
// genuine nondecreasing Phi estimate that is <= every sampled value).
struct LadderPass {
  MonotoneTable table;
  std::vector<double> shell_min;
};

LadderPass ladder_pass(const Potential& pot, StableIndex alpha,
                       const std::vector<double>& radii, int directions) {
  const auto dirs = direction_grid(pot.dim(), directions);
  std::vector<double> shell_min(radii.size(), kInf);
  std::vector<double> x(static_cast<std::size_t>(pot.dim()));
  for (std::size_t k = 0; k < radii.size(); ++k) {
    for (const auto& dir : dirs) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = radii[k] * dir[i];
      shell_min[k] = std::min(shell_min[k], log_lambda(pot, alpha, x));
    }
  }
  LadderPass out;
  out.table.x = radii;
  out.table.y.resize(radii.size());
  double running = kInf;
  for (std::size_t k = radii.size(); k-- > 0;) {
    running = std::min(running, shell_min[k]);
    out.table.y[k] = running;
  }
  out.shell_min = std::move(shell_min);
  return out;
}

std::vector<double> make_radii(double r_min, double r_max, int per_decade) {
  std::vector<double> radii;
  const double decades = std::log10(r_max / r_min);
  const int steps = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
  for (int k = 0; k <= steps; ++k)
    radii.push_back(r_min * std::pow(r_max / r_min, static_cast<double>(k) / steps));
  return radii;
}

double max_rel_gap(const MonotoneTable& coarse, const MonotoneTable& fine) {
  // compare on the coarse radii (a subset-ish set; use floor lookup)
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.x.size(); ++k) {
    const double a = coarse.y[k];
    const double b = fine.value_at_floor(coarse.x[k]);
    worst = std::max(worst, std::abs(a - b));  // log-scale difference
  }
  return worst;
}

}  // namespace

double PhiTable::log_phi_at(double r) const {
  return log_phi.value_at_floor(r);
}

double PhiTable::phi(double r) const { return std::exp(log_phi_at(r)); }

double PhiTable::phi_inverse(double s) const {
  return log_phi.generalized_inverse(std::log(s));
}

PhiTable build_phi_table(const Potential& pot, StableIndex alpha,
                         const CriteriaOptions& opts, double value_target,
                         double radius_cap) {
  const int dirs0 = opts.directions > 0 ? opts.directions
                                        : default_directions(pot.dim());
  double r_max = opts.r_min * opts.ladder_span;
  PhiTable out;
  for (;;) {
    int per_decade = opts.shells_per_decade;
    int dirs = dirs0;
    std::vector<double> radii = make_radii(opts.r_min, r_max, per_decade);
    LadderPass coarse = ladder_pass(pot, alpha, radii, dirs);
    bool converged = false;
    LadderPass fine = coarse;
    for (int level = 0; level < opts.max_refinements; ++level) {
      per_decade *= 2;
      dirs *= 2;
      radii = make_radii(opts.r_min, r_max, per_decade);
      fine = ladder_pass(pot, alpha, radii, dirs);
      if (max_rel_gap(coarse.table, fine.table) <= opts.refine_rel_tol) {
        converged = true;
        break;
      }
      coarse = fine;
    }
    out.log_phi = fine.table;
    out.shell_log_lambda = fine.shell_min;
    out.directions_used = dirs;
    out.shells_per_decade_used = per_decade;
    out.converged = converged;
    if (value_target > 0.0 && out.log_phi.y.back() < std::log(value_target) &&
        r_max < radius_cap) {
      r_max = std::min(radius_cap, r_max * 1e3);  // extend and redo
      continue;
    }
    return out;
  }
}

LimsupReport limsup_condition_report(const Potential& pot, StableIndex alpha,
                                     double gamma,
                                     std::span<const double> radii,
                                     int directions) {
  if (!(gamma > 0.0) || !(gamma < std::min(alpha.alpha, 1.0)))
    throw config_error("gamma must lie in (0, min(alpha,1))");
  const int dirs_n = directions > 0 ? directions : default_directions(pot.dim());
  const auto dirs = direction_grid(pot.dim(), dirs_n);
  LimsupReport rep;
  rep.gamma = gamma;
  std::vector<double> x(static_cast<std::size_t>(pot.dim()));
  for (double r : radii) {
    double worst = -kInf;
    for (const auto& dir : dirs) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = r * dir[i];
      const double lv = (1.0 + alpha.alpha - gamma) * std::log(r) +
                        log_gamma_sup(pot, x) - log_gamma_inf(pot, x);
      worst = std::max(worst, lv);
    }
    rep.radii.push_back(r);
    rep.log_value.push_back(worst);
    rep.value.push_back(std::exp(worst));
  }
  // PASS heuristic: nonincreasing over the top decade and clearly below the
  // start of that decade at the end.
  const double r_top = rep.radii.back();
  std::vector<std::size_t> top;
  for (std::size_t k = 0; k < rep.radii.size(); ++k)
    if (rep.radii[k] >= r_top / 10.0) top.push_back(k);
  bool decreasing = top.size() >= 2;
  for (std::size_t j = 1; j < top.size(); ++j)
    if (rep.log_value[top[j]] > rep.log_value[top[j - 1]] + 1e-9)
      decreasing = false;
  const bool dropped = top.size() >= 2 &&
                       rep.log_value[top.back()] <
                           rep.log_value[top.front()] - 0.05;
  rep.pass = decreasing && dropped;
  rep.heuristic = true;
  return rep;
}

CriteriaProfile build_criteria_profile(const Potential& pot, StableIndex alpha,
                                       double gamma,
                                       const CriteriaOptions& opts,
                                       double phi_value_target) {
  CriteriaProfile profile;
  profile.gamma = gamma;
  profile.alpha = alpha.alpha;
  profile.phi = build_phi_table(pot, alpha, opts, phi_value_target);

  const auto& radii = profile.phi.log_phi.x;
  std::vector<double> lim_radii;
  for (double r : radii)
    if (lim_radii.empty() || r > lim_radii.back() * 1.5) lim_radii.push_back(r);
  profile.limsup = limsup_condition_report(pot, alpha, gamma, lim_radii,
                                           opts.directions);

  // slope of the per-shell log Lambda minima against log r over the top
  // decade (the suffix-min Phi flattens decay and would hide it)
  const double r_top = radii.back();
  double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] < r_top / 10.0) continue;
    const double lx = std::log(radii[k]);
    const double ly = profile.phi.shell_log_lambda[k];
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  profile.top_decade_slope =
      n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  const double log_phi_top = profile.phi.log_phi.y.back();
  profile.liminf_positive =
      std::isfinite(log_phi_top) && profile.top_decade_slope > -0.02;
  const double growth = log_phi_top - profile.phi.log_phi.y.front();
  profile.limit_infinite = profile.liminf_positive && growth > std::log(4.0);
  return profile;
}

}  // namespace axistable
