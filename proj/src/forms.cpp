#include "axistable/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axistable/kernels.hpp"
#include "axistable/quadrature.hpp"
#include "axistable/rates.hpp"

namespace axistable {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic Halton points (bases 2,3,5) for the importance-sampled outer
// rule of non-product potentials.
double halton_pt(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

QuadratureSpec resolve(const QuadratureSpec& in, int dim) {
  QuadratureSpec s = in;
  if (s.outer_panels == 0) s.outer_panels = dim == 1 ? 12 : (dim == 2 ? 6 : 4);
  if (s.outer_order == 0) s.outer_order = dim == 1 ? 10 : (dim == 2 ? 8 : 5);
  return s;
}

}  // namespace

QuadratureSpec QuadratureSpec::refined() const {
  // refining an unresolved spec (outer fields 0) resolves to the d=2 defaults
  // first so the ladder is meaningful for every caller
  QuadratureSpec s = resolve(*this, 2);
  s.inner_per_decade *= 2;
  s.inner_order = std::min(s.inner_order + 4, 24);
  s.head_per_decade *= 2;
  s.outer_panels += (s.outer_panels + 1) / 2;
  s.outer_order = std::min(s.outer_order + 2, 24);
  return s;
}

double OuterRule::expect(
    const std::function<double(std::span<const double>)>& g) const {
  std::vector<double> vals(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) vals[k] = g(points[k]);
  return kernels::dot(weights, vals);
}

OuterRule build_outer_rule(const Potential& pot, const QuadratureSpec& in,
                           const std::vector<std::vector<double>>& axis_breaks) {
  const int d = pot.dim();
  const QuadratureSpec spec = resolve(in, d);
  OuterRule rule;

  if (pot.product()) {
    // per-axis nodes through the quantile transform; panels split at the
    // u-images of the integrand's kinks
    const double u0 = spec.outer_trunc_tol / (2.0 * d);
    const GaussLegendre& gl = gauss_legendre(spec.outer_order);
    std::vector<std::vector<double>> axis_x(static_cast<std::size_t>(d));
    std::vector<std::vector<double>> axis_w(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const Marginal1D& m = pot.marginal(i);
      std::vector<double> cuts;
      for (int p = 0; p <= spec.outer_panels; ++p)
        cuts.push_back(u0 + (1.0 - 2.0 * u0) * p / spec.outer_panels);
      if (static_cast<int>(axis_breaks.size()) > i)
        for (double bx : axis_breaks[static_cast<std::size_t>(i)]) {
          const double ub = m.cdf(bx);
          if (ub > u0 * (1.0 + 1e-9) && ub < 1.0 - u0 * (1.0 + 1e-9))
            cuts.push_back(ub);
        }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end(),
                             [](double a, double b) { return b - a < 1e-13; }),
                 cuts.end());
      for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p];
        const double b = cuts[p + 1];
        for (int q = 0; q < spec.outer_order; ++q) {
          const double u = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
          axis_x[static_cast<std::size_t>(i)].push_back(m.quantile(u));
          axis_w[static_cast<std::size_t>(i)].push_back(0.5 * (b - a) *
                                                        gl.weights[q]);
        }
      }
    }
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= axis_x[static_cast<std::size_t>(i)].size();
    rule.points.reserve(total);
    rule.weights.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      std::vector<double> x(static_cast<std::size_t>(d));
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        const std::size_t n_i = axis_x[static_cast<std::size_t>(i)].size();
        const std::size_t j = rem % n_i;
        rem /= n_i;
        x[static_cast<std::size_t>(i)] = axis_x[static_cast<std::size_t>(i)][j];
        w *= axis_w[static_cast<std::size_t>(i)][j];
      }
      rule.points.push_back(std::move(x));
      rule.weights.push_back(w);
    }
    return rule;
  }

  if (pot.support_radius()) {
    // bounded support: tensor GL against the density
    const double r = *pot.support_radius();
    const int order = spec.outer_order * spec.outer_panels;
    const GaussLegendre& gl = gauss_legendre(std::min(order, 48));
    const std::size_t n = gl.nodes.size();
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= n;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      std::vector<double> x(static_cast<std::size_t>(d));
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        const std::size_t j = rem % n;
        rem /= n;
        x[static_cast<std::size_t>(i)] = r * gl.nodes[j];
        w *= r * gl.weights[j];
      }
      w *= std::exp(pot.log_density(x));
      rule.points.push_back(std::move(x));
      rule.weights.push_back(w);
    }
    return rule;
  }

  // variable order (or unbounded custom): importance sampling on Halton nodes
  // against the product-polynomial proposal with the declared lower bounds
  if (pot.family() != Potential::Family::variable_order)
    throw numeric_error("outer rule: unbounded custom potentials unsupported");
  std::vector<Marginal1D> prop;
  for (int i = 0; i < d; ++i)
    prop.push_back(Marginal1D::poly(pot.coefficient(i).lower_bound()));
  static const int bases[3] = {2, 3, 5};
  const std::uint64_t n = 1 << 13;
  const double log_c = pot.log_normalizer();
  for (std::uint64_t k = 1; k <= n; ++k) {
    std::vector<double> x(static_cast<std::size_t>(d));
    double log_prop = 0.0;
    for (int i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] =
          prop[static_cast<std::size_t>(i)].quantile(halton_pt(k, bases[i]));
      log_prop += prop[static_cast<std::size_t>(i)].log_factor(
                      x[static_cast<std::size_t>(i)]) +
                  prop[static_cast<std::size_t>(i)].log_normalizer();
    }
    const double w =
        std::exp(log_c + pot.log_unnorm(x) - log_prop) / static_cast<double>(n);
    rule.points.push_back(std::move(x));
    rule.weights.push_back(w);
  }
  return rule;
}

// ------------------------------------------------------------ inner z-rule --

namespace {

// One shifted factor of the inner integrand. take_log turns f into log f
// (entropy right-hand side); the positivity floor certifies the logs.
struct ShiftEval {
  const TestFunction* fn;
  bool take_log;
  std::span<const double> x;
  int axis;

  double at(double z) const {
    const double v = fn->eval_shifted(x, axis, z);
    if (!take_log) return v;
    if (!(v > 0.0))
      throw numeric_error("log of a non-positive test function value");
    return std::log(v);
  }
  double far(int sign) const {
    const double v = fn->far_value(x, axis, sign);
    if (!take_log) return v;
    if (!(v > 0.0))
      throw numeric_error("log of a non-positive far value");
    return std::log(v);
  }
  double exit_radius() const { return fn->axis_exit(axis); }
  double lip() const {
    if (!take_log) return fn->lipschitz_bound();
    return fn->lipschitz_bound() / fn->positive_floor();
  }
};

// \int (u(x+ze_i)-u(x)) (v(x+ze_i)-v(x)) |z|^{-1-alpha} dz over |z| > lo
// (lo = 0: full, with graded head below delta_inner).
double inner_axis(const ShiftEval& u, const ShiftEval& v, double alpha,
                  const QuadratureSpec& spec, double lo,
                  std::span<const double> x_breaks) {
  const double u0 = u.at(0.0);
  const double v0 = v.at(0.0);
  const double xi = u.x[static_cast<std::size_t>(u.axis)];
  const double exit_z =
      std::max(u.exit_radius(), v.exit_radius()) + std::abs(xi) + 1e-9;
  double acc = 0.0;
  for (int sign : {1, -1}) {
    auto integrand = [&](double m) {
      const double z = sign * m;
      return (u.at(z) - u0) * (v.at(z) - v0) * std::pow(m, -1.0 - alpha);
    };
    // kinks of z -> f(x + z e_i) sit at z = b - x_i
    std::vector<double> breaks;
    for (double b : x_breaks) {
      const double m = sign > 0 ? (b - xi) : (xi - b);
      if (m > 0.0) breaks.push_back(m);
    }
    const double body_lo = std::max(lo, spec.delta_inner);
    if (lo == 0.0) {
      // graded head below the split; the omitted floor is Lipschitz-certified
      const double lip2 = u.lip() * v.lip();
      const double head_tol = 1e-13 * (std::abs(u0 * v0) + 1.0);
      double z_floor = spec.delta_inner;
      if (lip2 > 0.0)
        z_floor = std::min(spec.delta_inner,
                           std::pow(head_tol * (2.0 - alpha) / lip2,
                                    1.0 / (2.0 - alpha)));
      if (z_floor < spec.delta_inner)
        acc += integrate_geometric_breaks(integrand, z_floor, spec.delta_inner,
                                          breaks, spec.head_per_decade,
                                          spec.head_order);
    }
    if (exit_z > body_lo)
      acc += integrate_geometric_breaks(integrand, body_lo, exit_z, breaks,
                                        spec.inner_per_decade, spec.inner_order);
    // beyond the exit both factors are constant along the axis; the analytic
    // tail starts where the panel coverage ends (the head may already have
    // integrated past a small exit radius)
    const double covered_hi =
        lo == 0.0 ? std::max(exit_z, spec.delta_inner) : std::max(exit_z, lo);
    acc += (u.far(sign) - u0) * (v.far(sign) - v0) *
           std::pow(std::max(covered_hi, 1e-300), -alpha) / alpha;
  }
  return acc;
}

std::vector<std::vector<double>> merged_breaks(const TestFunction& f,
                                               const TestFunction& g, int dim) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    auto bf = f.axis_breakpoints(i);
    auto bg = g.axis_breakpoints(i);
    bf.insert(bf.end(), bg.begin(), bg.end());
    std::sort(bf.begin(), bf.end());
    bf.erase(std::unique(bf.begin(), bf.end()), bf.end());
    out[static_cast<std::size_t>(i)] = std::move(bf);
  }
  return out;
}

double form_once(const Potential& pot, StableIndex alpha, const TestFunction& f,
                 const TestFunction& g, bool g_log, const QuadratureSpec& in,
                 Truncation trunc) {
  const QuadratureSpec spec = resolve(in, pot.dim());
  const auto breaks = merged_breaks(f, g, pot.dim());
  const OuterRule rule = build_outer_rule(pot, spec, breaks);
  const double lo = trunc == Truncation::above_one ? 1.0 : 0.0;
  std::vector<double> vals(rule.points.size());
  for (std::size_t k = 0; k < rule.points.size(); ++k) {
    const auto& x = rule.points[k];
    double acc = 0.0;
    for (int i = 0; i < pot.dim(); ++i) {
      ShiftEval ue{&f, false, x, i};
      ShiftEval ve{&g, g_log, x, i};
      acc += inner_axis(ue, ve, alpha.alpha, spec, lo,
                        breaks[static_cast<std::size_t>(i)]);
    }
    vals[k] = acc;
  }
  return 0.5 * kernels::dot(rule.weights, vals);
}

double form_refined(const Potential& pot, StableIndex alpha,
                    const TestFunction& f, const TestFunction& g, bool g_log,
                    const QuadratureSpec& in, Truncation trunc) {
  QuadratureSpec spec = resolve(in, pot.dim());
  const double scale_hint =
      (f.sup_bound() + 1.0) * (g.sup_bound() + 1.0) * 1e-14;
  double prev = form_once(pot, alpha, f, g, g_log, spec, trunc);
  if (spec.refine_max <= 0) return prev;  // caller opted out of the check
  double cur = prev;
  for (int k = 0; k < spec.refine_max; ++k) {
    spec = spec.refined();
    const double next = form_once(pot, alpha, f, g, g_log, spec, trunc);
    prev = cur;
    cur = next;
    const double scale = std::max({std::abs(cur), std::abs(prev), scale_hint});
    if (std::abs(cur - prev) <= in.target_rel_tol * scale) return cur;
  }
  throw numeric_error("form quadrature refinement disagreement", prev, cur);
}

}  // namespace

double dirichlet_form(const Potential& pot, StableIndex alpha,
                      const TestFunction& f, const QuadratureSpec& spec,
                      Truncation trunc) {
  return form_refined(pot, alpha, f, f, false, spec, trunc);
}

double bilinear_form(const Potential& pot, StableIndex alpha,
                     const TestFunction& f, const TestFunction& g,
                     const QuadratureSpec& spec, Truncation trunc) {
  return form_refined(pot, alpha, f, g, false, spec, trunc);
}

double bilinear_form_log(const Potential& pot, StableIndex alpha,
                         const TestFunction& f, const QuadratureSpec& spec,
                         Truncation trunc) {
  if (!f.positive())
    throw numeric_error("D(f, log f) requires a positive test function");
  return form_refined(pot, alpha, f, f, true, spec, trunc);
}

Moments variance_and_mean(const Potential& pot, const TestFunction& f,
                          const QuadratureSpec& spec) {
  const OuterRule rule =
      build_outer_rule(pot, spec, merged_breaks(f, f, pot.dim()));
  Moments m;
  m.mean = rule.expect([&](std::span<const double> x) { return f(x); });
  m.variance = rule.expect([&](std::span<const double> x) {
    const double d = f(x) - m.mean;
    return d * d;
  });
  return m;
}

double mean_abs(const Potential& pot, const TestFunction& f,
                const QuadratureSpec& spec) {
  const OuterRule rule =
      build_outer_rule(pot, spec, merged_breaks(f, f, pot.dim()));
  return rule.expect([&](std::span<const double> x) { return std::abs(f(x)); });
}

double second_moment_in_ball(const Potential& pot, const TestFunction& f,
                             double r, const QuadratureSpec& spec) {
  auto breaks = merged_breaks(f, f, pot.dim());
  for (auto& b : breaks) {
    b.push_back(-r);
    b.push_back(r);
    std::sort(b.begin(), b.end());
  }
  const OuterRule rule = build_outer_rule(pot, spec, breaks);
  return rule.expect([&](std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    if (s > r * r) return 0.0;
    const double v = f(x);
    return v * v;
  });
}

double entropy_functional(const Potential& pot, const TestFunction& f,
                          const QuadratureSpec& spec) {
  if (!f.positive())
    throw numeric_error("entropy requires a test function with a positive floor");
  const OuterRule rule =
      build_outer_rule(pot, spec, merged_breaks(f, f, pot.dim()));
  const double mean = rule.expect([&](std::span<const double> x) {
    const double v = f(x);
    if (!(v > 0.0)) throw numeric_error("non-positive evaluation in entropy");
    return v;
  });
  const double flogf = rule.expect([&](std::span<const double> x) {
    const double v = f(x);
    return v * std::log(v);
  });
  return flogf - mean * std::log(mean);
}

double log_local_super_beta(const Potential& pot, StableIndex alpha, double r,
                            double t, double c3) {
  const double d = pot.dim();
  const double log_sup = log_sup_potential_on_box(pot, 2.0 * std::sqrt(d) * r);
  const double log_inf = log_inf_potential_on_box(pot, r);
  const double log_cap = alpha.alpha * std::log(r) + log_sup - log_inf;
  const double log_t_eff = std::min(std::log(t), log_cap);
  return std::log(c3) - (d / alpha.alpha) * log_t_eff +
         (2.0 + d / alpha.alpha) * log_sup - (1.0 + d / alpha.alpha) * log_inf;
}

double local_super_beta(const Potential& pot, StableIndex alpha, double r,
                        double t, double c3) {
  return std::exp(log_local_super_beta(pot, alpha, r, t, c3));
}

Residual inequality_residual(const ResidualInput& in, const Potential& pot,
                             StableIndex alpha, const TestFunction& f,
                             const QuadratureSpec& spec) {
  Residual out;
  using Kind = ResidualInput::Kind;
  switch (in.kind) {
    case Kind::poincare: {
      out.kind = "poincare";
      const Moments m = variance_and_mean(pot, f, spec);
      const double d = dirichlet_form(pot, alpha, f, spec);
      out.lhs = m.variance;
      out.rhs = in.constant * d;
      if (d <= 0.0 && m.variance <= 1e-12 * (1.0 + f.sup_bound())) {
        out.vacuous = true;
        out.minimal_constant = 0.0;
      } else if (d <= 0.0) {
        throw numeric_error(
            "violation witness: zero energy with positive variance");
      } else {
        out.minimal_constant = m.variance / d;
      }
      break;
    }
    case Kind::super_poincare: {
      out.kind = "super_poincare";
      const OuterRule rule = build_outer_rule(pot, spec);
      const double f2 = rule.expect([&](std::span<const double> x) {
        const double v = f(x);
        return v * v;
      });
      const double fabs = mean_abs(pot, f, spec);
      const double d = dirichlet_form(pot, alpha, f, spec);
      out.lhs = f2;
      out.rhs = in.s * d + in.constant * fabs * fabs;
      out.minimal_constant =
          fabs > 0.0 ? (f2 - in.s * d) / (fabs * fabs) : 0.0;
      out.vacuous = fabs == 0.0 && f2 == 0.0;
      break;
    }
    case Kind::local_super: {
      out.kind = "local_super";
      const double lhs = second_moment_in_ball(pot, f, in.r, spec);
      const double d = dirichlet_form(pot, alpha, f, spec);
      const double fabs = mean_abs(pot, f, spec);
      const double shape = local_super_beta(pot, alpha, in.r, in.t, 1.0);
      out.lhs = lhs;
      out.rhs = in.t * d + in.constant * shape * fabs * fabs;
      out.minimal_constant =
          fabs > 0.0 ? (lhs - in.t * d) / (shape * fabs * fabs) : 0.0;
      out.vacuous = fabs == 0.0 && lhs == 0.0;
      break;
    }
    case Kind::entropy: {
      out.kind = "entropy";
      const double ent = entropy_functional(pot, f, spec);
      const double dlog = bilinear_form_log(pot, alpha, f, spec);
      out.lhs = ent;
      out.rhs = in.constant * dlog;
      if (dlog <= 0.0 && ent <= 1e-12 * (1.0 + f.sup_bound())) {
        out.vacuous = true;
        out.minimal_constant = 0.0;
      } else if (dlog <= 0.0) {
        throw numeric_error(
            "violation witness: zero entropy energy with positive entropy");
      } else {
        out.minimal_constant = ent / dlog;
      }
      break;
    }
    case Kind::weak: {
      out.kind = "weak";
      const Moments m = variance_and_mean(pot, f, spec);
      const double d = dirichlet_form(pot, alpha, f, spec);
      const double sup_centered = f.sup_bound() + std::abs(m.mean);
      out.lhs = m.variance;
      out.rhs = in.constant * d + in.r * sup_centered * sup_centered;
      if (d > 0.0)
        out.minimal_constant =
            std::max(0.0, m.variance - in.r * sup_centered * sup_centered) / d;
      else
        out.vacuous = m.variance <= 1e-12;
      break;
    }
  }
  out.slack = out.rhs - out.lhs;
  out.satisfied = out.lhs <= out.rhs + 1e-12 * (std::abs(out.rhs) + 1.0);
  return out;
}

}  // namespace axistable
