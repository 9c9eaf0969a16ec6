#include "axistable/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axistable/quadrature.hpp"

namespace axistable {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(c * (1 + e^w)) without overflow
double log_c_1p_exp(double log_c, double w) {
  if (w > 700.0) return log_c + w;
  return log_c + std::log1p(std::exp(w));
}
}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "HOLDS";
    case Verdict::fails: return "FAILS";
    case Verdict::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

const char* to_string(RateFunction::Tag t) {
  using Tag = RateFunction::Tag;
  switch (t) {
    case Tag::super_poincare_beta: return "super_poincare_beta";
    case Tag::poly_beta: return "poly_beta";
    case Tag::log_beta: return "log_beta";
    case Tag::weak_eta: return "weak_eta";
    case Tag::weak_eta_poly: return "weak_eta_poly";
    case Tag::weak_eta_log: return "weak_eta_log";
    case Tag::decay_envelope_power: return "decay_envelope_power";
    case Tag::decay_envelope_stretched: return "decay_envelope_stretched";
    case Tag::decay_envelope_exponential: return "decay_envelope_exponential";
  }
  return "?";
}

// ---------------------------------------------------------- box extrema -----

namespace {

// extrema of a unimodal symmetric 1-d factor over [0, r]
double log_factor_max_on(const Marginal1D& m, double r) {
  if (m.sup_radius() <= r) return m.log_sup();
  return m.log_factor(r);  // still on the increasing branch
}
double log_factor_min_on(const Marginal1D& m, double r) {
  return std::min(m.log_factor(0.0), m.log_factor(r));
}

}  // namespace

double log_sup_potential_on_box(const Potential& pot, double r) {
  // sup V = -inf log density
  if (pot.product()) {
    double acc = pot.log_normalizer() - pot.offset();
    for (int i = 0; i < pot.dim(); ++i)
      acc += log_factor_min_on(pot.marginal(i), r);
    return -acc;
  }
  // grid search over the box (corners included via per-axis extremes)
  const auto dirs = direction_grid(pot.dim(), pot.dim() == 1 ? 2 : 64);
  double lo = kInf;
  std::vector<double> x(static_cast<std::size_t>(pot.dim()));
  for (int k = 0; k <= 24; ++k) {
    for (const auto& dir : dirs) {
      double m = 0.0;
      for (double di : dir) m = std::max(m, std::abs(di));
      const double scale = (r * k / 24.0) / std::max(m, 1e-12);
      for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::clamp(scale * dir[i], -r, r);
      lo = std::min(lo, pot.log_density(x));
    }
  }
  return -lo;
}

double log_inf_potential_on_box(const Potential& pot, double r) {
  // inf V = -sup log density
  if (pot.product()) {
    double acc = pot.log_normalizer() - pot.offset();
    for (int i = 0; i < pot.dim(); ++i)
      acc += log_factor_max_on(pot.marginal(i), r);
    return -acc;
  }
  const auto dirs = direction_grid(pot.dim(), pot.dim() == 1 ? 2 : 64);
  double hi = -kInf;
  std::vector<double> x(static_cast<std::size_t>(pot.dim()));
  for (int k = 0; k <= 24; ++k) {
    const double rad = r * k / 24.0;
    for (const auto& dir : dirs) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = rad * dir[i];
      hi = std::max(hi, pot.log_density(x));
    }
  }
  return -hi;
}

// ------------------------------------------------------ poincare verdict ----

PoincareVerdict poincare_verdict(const Potential& pot, StableIndex alpha,
                                 const CriteriaProfile* profile) {
  PoincareVerdict out;
  switch (pot.family()) {
    case Potential::Family::product_polynomial: {
      const auto& eps = pot.epsilons();
      const double emin = *std::min_element(eps.begin(), eps.end());
      if (emin >= alpha.alpha) {
        out.verdict = Verdict::holds;
        out.evidence = "polynomial family: all eps_i >= alpha";
      } else {
        out.verdict = Verdict::fails;
        out.evidence = "polynomial family: some eps_i < alpha (sharp threshold)";
      }
      return out;
    }
    case Potential::Family::product_log_corrected: {
      if (std::abs(pot.alpha_hint() - alpha.alpha) > 1e-12) break;
      const auto& eps = pot.epsilons();
      const double emin = *std::min_element(eps.begin(), eps.end());
      if (emin >= 0.0) {
        out.verdict = Verdict::holds;
        out.evidence = "log-corrected family: all eps_i >= 0";
      } else {
        out.verdict = Verdict::fails;
        out.evidence = "log-corrected family: some eps_i < 0 (sharp threshold)";
      }
      return out;
    }
    case Potential::Family::variable_order: {
      VariableOrderReport rep = variable_order_analyze(pot, alpha);
      if (rep.poincare == Verdict::holds) {
        out.verdict = Verdict::holds;
        out.evidence =
            "variable order: A(x) >= alpha at large radius and M_j >= N_j";
        return out;
      }
      break;
    }
    case Potential::Family::custom:
      break;
  }
  if (profile) {
    if (profile->limsup.pass && profile->liminf_positive) {
      out.verdict = Verdict::holds;
      out.evidence =
          "numeric diagnostic: lim Phi > 0 and limsup condition PASS (heuristic)";
      return out;
    }
    out.verdict = Verdict::unknown;
    out.evidence = "numeric diagnostics inconclusive";
    return out;
  }
  out.verdict = Verdict::unknown;
  out.evidence = "no closed form applies and no numeric profile supplied";
  return out;
}

// ------------------------------------------------------------- super beta ---

SuperBetaValue super_poincare_beta(const Potential& pot, StableIndex alpha,
                                   const CriteriaProfile& profile, double s,
                                   const SuperBetaOptions& opts) {
  if (!profile.limit_infinite)
    throw gate_error(
        "super-Poincare rate requires the lim Phi = infinity diagnostic to pass");
  const double d = pot.dim();
  const double target = opts.c2 * (1.0 + 1.0 / s);
  const double r1 = profile.phi.phi_inverse(target);
  if (std::isinf(r1))
    throw numeric_error(
        "super-Poincare criterion not met at this s (Phi^{-1} sentinel)");
  const double r2 = 2.0 * std::sqrt(d) * r1;
  const double log_sup = log_sup_potential_on_box(pot, r2);
  const double log_inf = log_inf_potential_on_box(pot, r1);
  SuperBetaValue out;
  out.box_radius = r1;
  out.log_value =
      log_c_1p_exp(std::log(opts.c1), -(d / alpha.alpha) * std::log(s)) +
      (2.0 + d / alpha.alpha) * log_sup - (1.0 + d / alpha.alpha) * log_inf;
  out.value = out.log_value > 700.0 ? kInf : std::exp(out.log_value);
  return out;
}

// ------------------------------------------------------ closed-form rates ---

double poly_beta_exponent(StableIndex alpha, const std::vector<double>& eps) {
  const double d = static_cast<double>(eps.size());
  const double emin = *std::min_element(eps.begin(), eps.end());
  double sum = 0.0;
  for (double e : eps) sum += 1.0 + e;
  return d / alpha.alpha +
         (2.0 * alpha.alpha + d) * sum / (alpha.alpha * (emin - alpha.alpha));
}

PolyBeta poly_beta_rate(StableIndex alpha, const std::vector<double>& eps,
                             double r, double c) {
  const double emin = *std::min_element(eps.begin(), eps.end());
  if (!(emin > alpha.alpha))
    throw gate_error(
        "super-Poincare fails for the polynomial family: need all eps_i > alpha");
  PolyBeta out;
  out.exponent = poly_beta_exponent(alpha, eps);
  out.log_value = log_c_1p_exp(std::log(c), -out.exponent * std::log(r));
  out.value = out.log_value > 700.0 ? kInf : std::exp(out.log_value);
  return out;
}

LogBeta log_beta_rate(StableIndex alpha, const std::vector<double>& eps,
                           double r, double c) {
  (void)alpha;
  const double emin = *std::min_element(eps.begin(), eps.end());
  if (!(emin > 0.0))
    throw gate_error(
        "super-Poincare fails for the log-corrected family: need all eps_i > 0");
  LogBeta out;
  out.inner_exponent = -1.0 / emin;
  out.log_value = c * (1.0 + std::pow(r, -1.0 / emin));
  out.value = out.log_value > 700.0 ? kInf : std::exp(out.log_value);
  return out;
}

bool logsobolev_iff(const std::vector<double>& eps) {
  return *std::min_element(eps.begin(), eps.end()) >= 1.0;
}

// ---------------------------------------------------------- variable order --

namespace {

double coeff_at_replaced(const Coefficient& a, std::span<const double> x, int i,
                         double u) {
  std::vector<double> y(x.begin(), x.end());
  y[static_cast<std::size_t>(i)] = u;
  return a(y);
}

}  // namespace

VariableOrderReport variable_order_analyze(const Potential& pot,
                                           StableIndex alpha,
                                           const VariableOrderOptions& opts) {
  if (pot.family() != Potential::Family::variable_order)
    throw config_error("variable_order_analyze requires a variable-order potential");
  const int d = pot.dim();
  VariableOrderReport rep;
  for (int i = 0; i < d; ++i) rep.b.push_back(pot.coefficient(i).upper_bound());

  const int dir_n = opts.directions > 0 ? opts.directions
                                        : (d == 1 ? 2 : (d == 2 ? 32 : 128));
  const auto dirs = direction_grid(d, dir_n);
  const int steps = std::max(
      2, static_cast<int>(std::ceil(std::log10(opts.r_max / opts.r_min) *
                                    opts.shells_per_decade)));
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int k = 0; k <= steps; ++k) {
    const double r = opts.r_min *
                     std::pow(opts.r_max / opts.r_min, static_cast<double>(k) / steps);
    double a_min = kInf;
    bool cond = true;
    for (const auto& dir : dirs) {
      for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = r * dir[i];
      const double thresh =
          r / std::sqrt(static_cast<double>(d)) * (1.0 - 1e-12);

      std::vector<double> n_j(static_cast<std::size_t>(d), -kInf);
      double a_x = kInf;
      for (int i = 0; i < d; ++i) {
        if (std::abs(x[static_cast<std::size_t>(i)]) < thresh) continue;
        double sup_own = -kInf;
        for (int j = 0; j < d; ++j) {
          double sup_j = -kInf;
          for (int g = 0; g <= 32; ++g) {
            const double u = -1.0 + 2.0 * g / 32.0;
            sup_j = std::max(sup_j, coeff_at_replaced(pot.coefficient(j), x, i, u));
          }
          n_j[static_cast<std::size_t>(j)] =
              std::max(n_j[static_cast<std::size_t>(j)], sup_j);
          if (j == i) sup_own = sup_j;
        }
        a_x = std::min(a_x, sup_own);
      }
      a_min = std::min(a_min, a_x);

      for (int j = 0; j < d && cond; ++j) {
        double m_j = kInf;
        for (int i = 0; i < d; ++i) {
          const double base =
              std::max(std::abs(x[static_cast<std::size_t>(i)]), 1e-9);
          for (int g = 0; g <= 48; ++g) {
            const double u = base * std::pow(1e9 / base, g / 48.0);
            m_j = std::min(m_j, coeff_at_replaced(pot.coefficient(j), x, i, u));
            m_j = std::min(m_j, coeff_at_replaced(pot.coefficient(j), x, i, -u));
          }
        }
        if (m_j < n_j[static_cast<std::size_t>(j)] - 1e-9) cond = false;
      }
    }
    rep.radii.push_back(r);
    rep.a_min.push_back(a_min);
    rep.condition_m_ge_n.push_back(cond);
  }

  std::vector<double> suffix(rep.a_min.size());
  double running = kInf;
  for (std::size_t k = rep.a_min.size(); k-- > 0;) {
    running = std::min(running, rep.a_min[k]);
    suffix[k] = running;
  }
  const double r_top = rep.radii.back();
  rep.a_star = suffix.back();
  rep.stabilized = true;
  for (std::size_t k = 0; k < rep.radii.size(); ++k) {
    if (rep.radii[k] < r_top / 100.0) continue;
    rep.a_star = std::min(rep.a_star, suffix[k]);
    if (std::abs(suffix[k] - suffix.back()) > 1e-9) rep.stabilized = false;
  }

  rep.condition_all = true;
  for (std::size_t k = 0; k < rep.radii.size(); ++k)
    if (rep.radii[k] >= r_top / 10.0 && !rep.condition_m_ge_n[k])
      rep.condition_all = false;

  rep.eps_slack =
      opts.eps_slack >= 0.0
          ? opts.eps_slack
          : (rep.stabilized ? 0.0
                            : 0.05 * std::max(0.0, rep.a_star - alpha.alpha));

  bool a_large_enough = true;
  for (std::size_t k = 0; k < rep.radii.size(); ++k)
    if (rep.radii[k] >= r_top / 10.0 && rep.a_min[k] < alpha.alpha - 1e-9)
      a_large_enough = false;
  rep.poincare = (a_large_enough && rep.condition_all) ? Verdict::holds
                                                       : Verdict::unknown;

  if (rep.a_star - rep.eps_slack > alpha.alpha && rep.condition_all) {
    const double dd = static_cast<double>(d);
    double sum = 0.0;
    for (double bi : rep.b) sum += 1.0 + bi;
    rep.beta_exponent =
        dd / alpha.alpha +
        (2.0 * alpha.alpha + dd) * sum /
            (alpha.alpha * (rep.a_star - rep.eps_slack - alpha.alpha));
  }
  return rep;
}

// -------------------------------------------------------- entropy condition --

namespace {

// e^{V_i(t)} for the normalized i-th factor; an overall tilt is split evenly
// across the coordinates so that sum_i V_i = V
double log_exp_vi(const Potential& pot, int i, double t) {
  const Marginal1D& m = pot.marginal(i);
  return -(m.log_factor(t) + m.log_normalizer() - pot.offset() / pot.dim());
}

double pair_objective(const Potential& pot, int i, double a, double s, double t) {
  const double ls = log_exp_vi(pot, i, s);
  const double lt = log_exp_vi(pot, i, t);
  const double m = std::max(ls, lt);
  return m + std::log(std::exp(ls - m) + std::exp(lt - m)) -
         (1.0 + a) * std::log(std::abs(s - t));
}

}  // namespace

EntropyCondition entropy_condition(const Potential& pot, StableIndex alpha,
                                   const EntropyConditionOptions& opts) {
  if (!pot.product())
    throw config_error("entropy condition requires a declared product measure");
  EntropyCondition out;
  out.holds = true;
  for (int i = 0; i < pot.dim(); ++i) {
    std::vector<double> pts{0.0};
    for (int k = 0; k <= opts.grid; ++k) {
      const double m =
          1e-3 * std::pow(opts.extent / 1e-3, static_cast<double>(k) / opts.grid);
      pts.push_back(m);
      pts.push_back(-m);
    }
    double best = kInf, best_inner = kInf;
    double bs = 0.0, bt = 0.0;
    for (double s : pts) {
      for (double t : pts) {
        if (std::abs(s - t) < 1e-12) continue;
        const double v = pair_objective(pot, i, alpha.alpha, s, t);
        if (v < best) {
          best = v;
          bs = s;
          bt = t;
        }
        if (std::abs(s) <= opts.extent / 4.0 &&
            std::abs(t) <= opts.extent / 4.0 && v < best_inner)
          best_inner = v;
      }
    }
    double hs = std::max(std::abs(bs), 1.0) * 0.5;
    double ht = std::max(std::abs(bt), 1.0) * 0.5;
    for (int round = 0; round < opts.refine_rounds; ++round) {
      const double cs = bs, ct = bt;
      for (int a = -3; a <= 3; ++a) {
        for (int b = -3; b <= 3; ++b) {
          const double s = std::clamp(cs + hs * a / 3.0, -opts.extent, opts.extent);
          const double t = std::clamp(ct + ht * b / 3.0, -opts.extent, opts.extent);
          if (std::abs(s - t) < 1e-12) continue;
          const double v = pair_objective(pot, i, alpha.alpha, s, t);
          if (v < best) {
            best = v;
            bs = s;
            bt = t;
          }
        }
      }
      hs /= 3.0;
      ht /= 3.0;
    }
    // decay verdict: the sampled minimum keeps dropping as the box grows
    const bool decays = best < best_inner + std::log(0.8);
    const double c_i = decays ? 0.0 : std::exp(best);
    if (decays) out.holds = false;
    out.c_i.push_back(c_i);
  }
  double worst_inv = 0.0;
  for (double c : out.c_i)
    worst_inv = std::max(worst_inv, c > 0.0 ? 1.0 / c : kInf);
  out.entropy_constant = 2.0 * worst_inv;
  return out;
}

// ------------------------------------------------------------- weak rates ---

Potential default_weak_reference(const Potential& pot, StableIndex alpha) {
  switch (pot.family()) {
    case Potential::Family::product_polynomial: {
      std::vector<double> eps0;
      for (double e : pot.epsilons()) eps0.push_back(std::max(e, alpha.alpha));
      return Potential::product_polynomial(eps0);
    }
    case Potential::Family::product_log_corrected: {
      std::vector<double> eps0;
      for (double e : pot.epsilons()) eps0.push_back(std::max(e, 0.0));
      return Potential::product_log_corrected(pot.alpha_hint(), eps0);
    }
    default:
      throw config_error("default weak reference exists for product families only");
  }
}

namespace {

struct WeakPair {
  double log_k;               // e^{V0-V}(x) = K * prod_i G_i(|x_i|)
  std::vector<int> involved;  // coordinates with non-constant G_i
};

double log_g(const Potential& pot, const Potential& pot0, int i, double t) {
  return pot.marginal(i).log_factor(t) - pot0.marginal(i).log_factor(t);
}

// smallest radius where the factor ratio reaches e^{log_s}
double g_inverse(const Potential& pot, const Potential& pot0, int i,
                 double log_s) {
  double lo = 0.0, hi = 1.0;
  while (log_g(pot, pot0, i, hi) < log_s) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e280) return kInf;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_g(pot, pot0, i, mid) < log_s) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

WeakPair analyze_pair(const Potential& pot, const Potential& pot0) {
  if (!pot.product() || !pot0.product() || pot.dim() != pot0.dim() ||
      pot.family() != pot0.family())
    throw config_error("weak rate needs two product potentials of the same family");
  WeakPair wp;
  wp.log_k = (pot.log_normalizer() - pot.offset()) -
             (pot0.log_normalizer() - pot0.offset());
  for (int i = 0; i < pot.dim(); ++i) {
    double prev = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double t = std::pow(10.0, -2.0 + 12.0 * k / 40.0);
      const double g = log_g(pot, pot0, i, t);
      if (g < prev - 1e-9)
        throw gate_error(
            "weak rate hypothesis violated: sup e^{V - V0} unbounded "
            "(factor ratio decreases in coordinate " +
            std::to_string(i) + ")");
      prev = g;
    }
    if (log_g(pot, pot0, i, 1e12) > 1e-9) wp.involved.push_back(i);
  }
  return wp;
}

// mu_V( prod_{i in coords, i >= from} G_i(|x_i|) <= e^{log_s} )
double sublevel_mass_rec(const Potential& pot, const Potential& pot0,
                         const std::vector<int>& coords, std::size_t from,
                         double log_s) {
  if (log_s < 0.0) return 0.0;
  if (from == coords.size()) return 1.0;
  const int i = coords[from];
  if (from + 1 == coords.size()) {
    const double t = g_inverse(pot, pot0, i, log_s);
    if (std::isinf(t)) return 1.0;
    return 1.0 - pot.marginal(i).tail(t);
  }
  const double t_max = g_inverse(pot, pot0, i, log_s);
  if (std::isinf(t_max)) return 1.0;
  const Marginal1D& m = pot.marginal(i);
  auto f = [&](double t) {
    const double inner = sublevel_mass_rec(pot, pot0, coords, from + 1,
                                           log_s - log_g(pot, pot0, i, t));
    return std::exp(m.log_factor(t)) * inner;
  };
  const double un = 2.0 * integrate_geometric(f, 1e-12, t_max, 10, 12) +
                    2e-12 * f(5e-13);
  return un / m.unnorm_mass();
}

}  // namespace

double weak_sublevel_mass(const Potential& pot, const Potential& pot0,
                          double s) {
  WeakPair wp = analyze_pair(pot, pot0);
  if (!(s > 0.0)) return 0.0;
  return sublevel_mass_rec(pot, pot0, wp.involved, 0, std::log(s) - wp.log_k);
}

double weak_eta(const Potential& pot, const Potential& pot0, StableIndex alpha,
                double r, double c) {
  WeakPair wp = analyze_pair(pot, pot0);
  {
    PoincareVerdict v0 = poincare_verdict(pot0, alpha);
    if (v0.verdict != Verdict::holds)
      throw gate_error(
          "weak rate hypothesis violated: reference measure verdict is " +
          std::string(to_string(v0.verdict)));
  }
  const double target = 1.0 / (1.0 + r);
  if (wp.involved.empty()) return c * std::exp(wp.log_k);

  double lo = 0.0;  // log s relative to K
  double hi = 1.0;
  while (sublevel_mass_rec(pot, pot0, wp.involved, 0, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6)
      throw numeric_error("weak rate bisection did not bracket the target mass");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sublevel_mass_rec(pot, pot0, wp.involved, 0, mid) < target) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-10 * (1.0 + hi)) break;
  }
  return c * std::exp(wp.log_k + 0.5 * (lo + hi));
}

WeakEtaClosedForm weak_eta_closed_form(WeakFamily family, StableIndex alpha,
                                       const std::vector<double>& eps,
                                       double c) {
  WeakEtaClosedForm out;
  const double emin = *std::min_element(eps.begin(), eps.end());
  if (family == WeakFamily::poly) {
    if (!(emin > 0.0) || !(emin < alpha.alpha))
      throw gate_error("weak polynomial rate requires 0 < min eps_i < alpha");
    double deficit = 0.0;
    for (double e : eps) deficit += std::max(alpha.alpha - e, 0.0);
    const double q = deficit / emin;
    out.eta_exponent = q;
    out.decay_exponent = emin / deficit;
    out.eta.tag = RateFunction::Tag::weak_eta_poly;
    out.eta.params = {{"c", c}, {"exponent", q}};
    out.eta.log_value = [c, q](double r) {
      return log_c_1p_exp(std::log(c), -q * std::log(r));
    };
    const double p = out.decay_exponent;
    out.envelope.tag = RateFunction::Tag::decay_envelope_power;
    out.envelope.params = {{"lambda", 1.0}, {"exponent", p}};
    out.envelope.log_value = [p](double t) { return -p * std::log(t); };
  } else {
    if (!(emin < 0.0))
      throw gate_error("weak log-corrected rate requires min eps_i < 0");
    double qsum = 0.0;
    for (double e : eps) qsum += std::min(e, 0.0);
    const double q = -qsum;  // > 0
    out.eta_exponent = q;
    out.decay_exponent = 1.0 / (1.0 + q);
    out.eta.tag = RateFunction::Tag::weak_eta_log;
    out.eta.params = {{"c", c}, {"exponent", q}};
    out.eta.log_value = [c, q](double r) {
      const double inner = std::log1p(1.0 / r);
      return std::log(c) + std::log1p(std::pow(inner, q));
    };
    const double p = out.decay_exponent;
    out.envelope.tag = RateFunction::Tag::decay_envelope_stretched;
    out.envelope.params = {{"lambda1", 1.0}, {"lambda2", 1.0}, {"exponent", p}};
    out.envelope.log_value = [p](double t) { return 1.0 - std::pow(t, p); };
  }
  return out;
}

}  // namespace axistable
