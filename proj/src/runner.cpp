#include "axistable/runner.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "axistable/criteria.hpp"
#include "axistable/errors.hpp"
#include "axistable/fits.hpp"
#include "axistable/forms.hpp"
#include "axistable/generator.hpp"
#include "axistable/rates.hpp"
#include "axistable/rng.hpp"
#include "axistable/simulate.hpp"
#include "axistable/spectral.hpp"

namespace axistable {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw numeric_error("cannot open output file " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

json with_tol(double value, double tolerance) {
  return json{{"value", value}, {"tolerance", tolerance}};
}
json with_se(double value, double se) {
  return json{{"value", value}, {"stderr", se}};
}

struct Artifacts {
  std::string dir;
  json summary;

  void csv(const std::string& name, const std::string& content) const {
    write_atomic(dir + "/" + name, content);
  }
  void finish(const RunConfig& rc) const {
    write_atomic(dir + "/manifest.cfg", rc.manifest());
    write_atomic(dir + "/summary.json", summary.dump(2) + "\n");
  }
};

CriteriaOptions criteria_options(const RunConfig& rc) {
  CriteriaOptions o;
  o.r_min = rc.criteria.r_min;
  o.ladder_span = rc.criteria.ladder_span;
  o.shells_per_decade = rc.criteria.shells_per_decade;
  o.directions = rc.criteria.directions;
  if (rc.tol > 0.0) o.refine_rel_tol = rc.tol;
  return o;
}

QuadratureSpec quadrature_spec(const RunConfig& rc) {
  QuadratureSpec q;
  if (rc.tol > 0.0) q.target_rel_tol = rc.tol;
  return q;
}

// seeded battery of bounded test functions for residual sweeps
std::vector<TestFunction> battery(int count, int dim, std::uint64_t seed,
                                  bool positive) {
  RngStream rng(seed, 99);
  std::vector<TestFunction> out;
  for (int k = 0; k < count; ++k) {
    std::vector<TensorTerm> terms;
    for (int t = 0; t < 1 + rng.uniform_index(2); ++t) {
      TensorTerm term;
      term.coeff = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < dim; ++i) {
        Atom1D a;
        switch (rng.uniform_index(3)) {
          case 0:
            a = {Atom1D::Kind::bump, rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0)};
            break;
          case 1:
            a = {Atom1D::Kind::gauss, rng.uniform(-2.0, 2.0), rng.uniform(0.5, 1.5)};
            break;
          default:
            a = {Atom1D::Kind::tent, rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0)};
            break;
        }
        term.atoms.push_back(a);
      }
      terms.push_back(term);
    }
    TestFunction f(dim, terms);
    if (positive)
      f = f.scaled(0.45 / (f.sup_bound() + 1e-9)).plus_constant(1.0);
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------- criteria --

void run_criteria(const RunConfig& rc, Artifacts& art) {
  Potential pot = rc.potential.build();
  StableIndex alpha(rc.potential.alpha);
  const double gamma = rc.gamma_or_default(rc.criteria.gamma);
  CriteriaProfile profile = build_criteria_profile(
      pot, alpha, gamma, criteria_options(rc), rc.criteria.phi_target);
  PoincareVerdict verdict = poincare_verdict(pot, alpha, &profile);

  std::ostringstream phi;
  phi << "radius,phi,log_phi,shell_log_lambda\n";
  for (std::size_t k = 0; k < profile.phi.log_phi.x.size(); ++k)
    phi << num(profile.phi.log_phi.x[k]) << ","
        << num(std::exp(profile.phi.log_phi.y[k])) << ","
        << num(profile.phi.log_phi.y[k]) << ","
        << num(profile.phi.shell_log_lambda[k]) << "\n";
  art.csv("phi_table.csv", phi.str());

  std::ostringstream lim;
  lim << "radius,value,log_value\n";
  for (std::size_t k = 0; k < profile.limsup.radii.size(); ++k)
    lim << num(profile.limsup.radii[k]) << "," << num(profile.limsup.value[k])
        << "," << num(profile.limsup.log_value[k]) << "\n";
  art.csv("limsup.csv", lim.str());

  art.summary["task"] = "criteria";
  art.summary["verdict"] = to_string(verdict.verdict);
  art.summary["evidence"] = verdict.evidence;
  art.summary["gamma"] = gamma;
  art.summary["limsup_pass_heuristic"] = profile.limsup.pass;
  art.summary["liminf_positive_heuristic"] = profile.liminf_positive;
  art.summary["phi_limit_infinite_heuristic"] = profile.limit_infinite;
  art.summary["top_decade_slope"] =
      with_tol(profile.top_decade_slope, 0.02);
  art.summary["phi_converged"] = profile.phi.converged;
  art.summary["directions_used"] = profile.phi.directions_used;
  art.summary["shells_per_decade_used"] = profile.phi.shells_per_decade_used;
}

// ------------------------------------------------------------------- rates --

void rate_rows(std::ostringstream& out, const std::string& family,
               const std::string& params, double arg, double log_value,
               const std::string& verdict) {
  const double value = log_value > 700.0 ? INFINITY : std::exp(log_value);
  out << family << "," << params << "," << num(arg) << "," << num(value) << ","
      << num(log_value) << "," << verdict << "\n";
}

void run_rates(const RunConfig& rc, Artifacts& art) {
  Potential pot = rc.potential.build();
  StableIndex alpha(rc.potential.alpha);
  const auto& rb = rc.rates;
  std::ostringstream csv;
  csv << "family,params,argument,value,log_value,verdict\n";

  std::vector<double> grid;
  {
    const int steps = std::max(
        2, static_cast<int>(std::round(std::log10(rb.s_hi / rb.s_lo) *
                                       rb.points_per_decade)));
    for (int k = 0; k <= steps; ++k)
      grid.push_back(rb.s_lo *
                     std::pow(rb.s_hi / rb.s_lo, static_cast<double>(k) / steps));
  }

  PoincareVerdict pv = poincare_verdict(pot, alpha);
  art.summary["task"] = "rates";
  art.summary["poincare_verdict"] = to_string(pv.verdict);
  art.summary["evidence"] = pv.evidence;

  switch (pot.family()) {
    case Potential::Family::product_polynomial: {
      const auto& eps = pot.epsilons();
      const double emin = *std::min_element(eps.begin(), eps.end());
      if (emin > alpha.alpha) {
        const double e = poly_beta_exponent(alpha, eps);
        art.summary["poly_beta_exponent"] = with_tol(e, 0.0);
        for (double s : grid) {
          PolyBeta b = poly_beta_rate(alpha, eps, s, rb.c);
          rate_rows(csv, "poly_beta", "c=" + num(rb.c) + ";E=" + num(e), s,
                    b.log_value, "HOLDS");
        }
        // numeric rate through the tabulated radial infimum
        CriteriaOptions copts = criteria_options(rc);
        const double gamma = rc.gamma_or_default(rc.criteria.gamma);
        CriteriaProfile profile = build_criteria_profile(
            pot, alpha, gamma, copts, rb.c2 * (1.0 + 1.0 / rb.s_lo));
        std::vector<double> ls, lb;
        for (double s : grid) {
          SuperBetaValue v = super_poincare_beta(pot, alpha, profile, s,
                                                 {rb.c1, rb.c2});
          rate_rows(csv, "super_poincare_beta",
                    "c1=" + num(rb.c1) + ";c2=" + num(rb.c2), s, v.log_value,
                    "HOLDS");
          ls.push_back(std::log(s));
          lb.push_back(v.log_value);
        }
        LineFit fit = fit_line(ls, lb);
        art.summary["super_beta_fitted_slope"] =
            with_se(fit.slope, fit.stderr_slope);
        art.summary["slope_vs_exponent_rel_gap"] =
            with_tol(std::abs(-fit.slope - e) / e, 0.10);
      } else if (emin > 0.0 && emin < alpha.alpha) {
        WeakEtaClosedForm cf = weak_eta_closed_form(WeakFamily::poly, alpha,
                                                    eps, rb.c);
        art.summary["weak_eta_exponent"] = with_tol(cf.eta_exponent, 0.0);
        art.summary["decay_envelope_exponent"] =
            with_tol(cf.decay_exponent, 0.0);
        Potential ref = default_weak_reference(pot, alpha);
        std::vector<double> lr, le;
        for (double s : grid) {
          const double eta = weak_eta(pot, ref, alpha, s, rb.c);
          rate_rows(csv, "weak_eta", "c=" + num(rb.c), s, std::log(eta),
                    "HOLDS");
          rate_rows(csv, "weak_eta_poly", "c=" + num(rb.c), s,
                    cf.eta.log_value(s), "HOLDS");
          lr.push_back(std::log(s));
          le.push_back(std::log(eta));
        }
        LineFit fit = fit_line(lr, le);
        art.summary["weak_eta_fitted_slope"] =
            with_se(fit.slope, fit.stderr_slope);
      }
      break;
    }
    case Potential::Family::product_log_corrected: {
      const auto& eps = pot.epsilons();
      const double emin = *std::min_element(eps.begin(), eps.end());
      art.summary["logsobolev_iff"] = logsobolev_iff(eps);
      if (emin > 0.0) {
        art.summary["log_beta_inner_exponent"] = with_tol(-1.0 / emin, 0.0);
        for (double s : grid) {
          LogBeta b = log_beta_rate(alpha, eps, s, rb.c);
          rate_rows(csv, "log_beta", "c=" + num(rb.c), s, b.log_value, "HOLDS");
        }
      } else if (emin < 0.0) {
        WeakEtaClosedForm cf = weak_eta_closed_form(WeakFamily::log_corrected,
                                                    alpha, eps, rb.c);
        art.summary["weak_eta_exponent"] = with_tol(cf.eta_exponent, 0.0);
        art.summary["decay_envelope_exponent"] =
            with_tol(cf.decay_exponent, 0.0);
        Potential ref = default_weak_reference(pot, alpha);
        for (double s : grid) {
          const double eta = weak_eta(pot, ref, alpha, s, rb.c);
          rate_rows(csv, "weak_eta", "c=" + num(rb.c), s, std::log(eta),
                    "HOLDS");
          rate_rows(csv, "weak_eta_log", "c=" + num(rb.c), s,
                    cf.eta.log_value(s), "HOLDS");
        }
      }
      break;
    }
    case Potential::Family::variable_order: {
      VariableOrderOptions vo;
      vo.eps_slack = rb.eps_slack;
      VariableOrderReport rep = variable_order_analyze(pot, alpha, vo);
      art.summary["a_star"] = with_tol(rep.a_star, 1e-6);
      art.summary["condition_m_ge_n"] = rep.condition_all;
      art.summary["stabilized"] = rep.stabilized;
      art.summary["eps_slack"] = rep.eps_slack;
      art.summary["poincare_verdict"] = to_string(rep.poincare);
      if (rep.beta_exponent) {
        art.summary["beta_exponent"] = with_tol(*rep.beta_exponent, 0.0);
        for (double s : grid)
          rate_rows(csv, "poly_beta",
                    "E=" + num(*rep.beta_exponent), s,
                    std::log1p(std::pow(s, -*rep.beta_exponent)), "HOLDS");
      }
      for (std::size_t k = 0; k < rep.radii.size(); ++k)
        rate_rows(csv, "variable_order_a",
                  "cond=" + std::string(rep.condition_m_ge_n[k] ? "1" : "0"),
                  rep.radii[k], std::log(std::max(rep.a_min[k], 1e-300)),
                  rep.condition_m_ge_n[k] ? "PASS" : "FAIL");
      break;
    }
    case Potential::Family::custom:
      break;
  }
  // entropy condition for product measures
  if (pot.product()) {
    EntropyCondition ec = entropy_condition(pot, alpha);
    json cs = json::array();
    for (double c : ec.c_i) cs.push_back(with_tol(c, 0.01));
    art.summary["entropy_c_i"] = cs;
    art.summary["entropy_constant"] =
        ec.holds ? json(ec.entropy_constant) : json("unbounded");
    art.summary["entropy_condition_holds"] = ec.holds;
  }
  art.csv("rates.csv", csv.str());
}

// -------------------------------------------------------------------- form --

void run_form(const RunConfig& rc, Artifacts& art) {
  Potential pot = rc.potential.build();
  StableIndex alpha(rc.potential.alpha);
  QuadratureSpec qs = quadrature_spec(rc);
  // battery sweeps favor throughput; --tol overrides
  if (rc.tol <= 0.0) qs.target_rel_tol = 2e-4;
  ResidualInput in;
  const std::string& kind = rc.form.kind;
  bool positive = false;
  if (kind == "poincare") {
    in.kind = ResidualInput::Kind::poincare;
  } else if (kind == "super_poincare") {
    in.kind = ResidualInput::Kind::super_poincare;
    in.s = rc.form.s;
  } else if (kind == "local_super") {
    in.kind = ResidualInput::Kind::local_super;
    in.r = rc.form.r;
    in.t = rc.form.t;
  } else if (kind == "entropy") {
    in.kind = ResidualInput::Kind::entropy;
    positive = true;
  } else if (kind == "weak") {
    in.kind = ResidualInput::Kind::weak;
    in.r = rc.form.r;
  } else {
    throw config_error("unknown residual kind '" + kind + "'");
  }
  in.constant = rc.form.constant;

  const int dim = rc.form.battery_dim > 0 ? rc.form.battery_dim : pot.dim();
  if (dim != pot.dim())
    throw config_error("battery dimension must match the potential dimension");
  auto fns = battery(rc.form.battery, dim, rc.seed, positive);

  std::ostringstream csv;
  csv << "kind,params,lhs,rhs,minimal_constant,tolerance\n";
  int satisfied = 0;
  double worst = 0.0;
  for (const auto& f : fns) {
    Residual res = inequality_residual(in, pot, alpha, f, qs);
    csv << res.kind << ","
        << "s=" << num(in.s) << ";r=" << num(in.r) << ";t=" << num(in.t)
        << ";constant=" << num(in.constant) << "," << num(res.lhs) << ","
        << num(res.rhs) << "," << num(res.minimal_constant) << ","
        << num(qs.target_rel_tol) << "\n";
    if (res.satisfied) ++satisfied;
    if (!res.vacuous) worst = std::max(worst, res.minimal_constant);
  }
  art.csv("residuals.csv", csv.str());
  art.summary["task"] = "form";
  art.summary["kind"] = kind;
  art.summary["battery"] = rc.form.battery;
  art.summary["satisfied"] = satisfied;
  art.summary["worst_minimal_constant"] =
      with_tol(worst, qs.target_rel_tol);
}

// ---------------------------------------------------------------- lyapunov --

void run_lyapunov(const RunConfig& rc, Artifacts& art) {
  Potential pot = rc.potential.build();
  StableIndex alpha(rc.potential.alpha);
  const double gamma = rc.gamma_or_default(rc.lyapunov.gamma);
  CriteriaProfile profile =
      build_criteria_profile(pot, alpha, gamma, criteria_options(rc));
  DriftOptions opts;
  opts.r_min = rc.lyapunov.r_min;
  opts.r_max = rc.lyapunov.r_max;
  opts.steps = rc.lyapunov.steps;
  opts.directions = rc.lyapunov.directions;
  DriftReport rep = drift_verify(pot, alpha, gamma, profile, opts);

  std::ostringstream csv;
  csv << "radius,direction,l_phi,lambda,phi,ratio\n";
  for (const auto& s : rep.samples)
    csv << num(s.radius) << "," << s.direction << "," << num(s.l_phi) << ","
        << num(s.lambda) << "," << num(s.phi) << "," << num(s.ratio) << "\n";
  art.csv("drift.csv", csv.str());

  art.summary["task"] = "lyapunov";
  art.summary["gamma"] = gamma;
  art.summary["pass"] = rep.pass;
  art.summary["r0"] = with_tol(rep.r0, 0.0);
  art.summary["c1_fitted"] = with_tol(rep.c1, 1e-9);
  art.summary["c2_fitted"] = with_tol(rep.c2, 1e-9);
  if (!rep.pass)
    art.summary["note"] =
        "ratios did not turn negative on the ladder (expected when the "
        "proposition's hypotheses fail)";
}

// --------------------------------------------------------------------- gap --

void run_gap(const RunConfig& rc, Artifacts& art) {
  Potential pot = rc.potential.build();
  if (pot.dim() > 2)
    throw config_error("gap task supports d <= 2 (axis-pair assembly)");
  StableIndex alpha(rc.potential.alpha);
  auto rows = gap_sweep(pot, alpha, rc.gap.boxes, rc.gap.n);
  std::ostringstream csv;
  csv << "box_radius,n,lambda1,ratio_to_previous,verdict\n";
  for (const auto& r : rows)
    csv << num(r.box_radius) << "," << r.n << "," << num(r.lambda1) << ","
        << num(r.ratio_to_previous) << "," << r.verdict << "\n";
  art.csv("gap.csv", csv.str());
  art.summary["task"] = "gap";
  art.summary["n"] = rc.gap.n;
  art.summary["verdict"] = rows.empty() ? "" : rows.back().verdict;
  json lam = json::array();
  for (const auto& r : rows) lam.push_back(with_tol(r.lambda1, 1e-8));
  art.summary["lambda1"] = lam;
}

// ---------------------------------------------------------------- simulate --

void run_simulate(const RunConfig& rc, Artifacts& art) {
  Potential pot = rc.potential.build();
  StableIndex alpha(rc.potential.alpha);
  auto f = TestFunction::coordinate_atom(
      pot.dim(), rc.simulate.f_axis,
      {Atom1D::Kind::bump, rc.simulate.f_center, rc.simulate.f_radius});
  DecayOptions opts;
  opts.horizon = rc.simulate.horizon;
  opts.trajectories = rc.simulate.trajectories;
  opts.delta = rc.simulate.delta;
  opts.points_per_decade = rc.simulate.points_per_decade;
  opts.t_min_fraction = rc.simulate.t_min_fraction;
  opts.seed = rc.seed;
  opts.threads = rc.threads;
  DecayReport rep = decay_estimate(pot, alpha, f, opts);

  std::ostringstream csv;
  csv << "t,rho_hat,stderr\n";
  for (std::size_t k = 0; k < rep.time.size(); ++k)
    csv << num(rep.time[k]) << "," << num(rep.rho[k]) << "," << num(rep.se[k])
        << "\n";
  art.csv("decay.csv", csv.str());

  art.summary["task"] = "simulate";
  art.summary["fit_tag"] = rep.fit_tag;
  art.summary["slope_or_rate"] = with_se(
      rep.slope_or_rate, 0.5 * (rep.ci_high - rep.ci_low) / 2.0);
  art.summary["ci_low"] = rep.ci_low;
  art.summary["ci_high"] = rep.ci_high;
  art.summary["sse_exponential"] = rep.sse_exponential;
  art.summary["sse_power"] = rep.sse_power;
  art.summary["accepted_events"] = rep.accepted_events;
  art.summary["insufficient_sampling"] = rep.insufficient_sampling;
  art.summary["trajectories"] = rep.count;
}

// ------------------------------------------------------------------ report --

void run_report(const RunConfig& rc, Artifacts& art) {
  Potential pot = rc.potential.build();
  StableIndex alpha(rc.potential.alpha);
  const double gamma = rc.gamma_or_default(rc.criteria.gamma);
  CriteriaProfile profile =
      build_criteria_profile(pot, alpha, gamma, criteria_options(rc));
  PoincareVerdict pv = poincare_verdict(pot, alpha, &profile);
  art.summary["task"] = "report";
  art.summary["poincare_verdict"] = to_string(pv.verdict);
  art.summary["evidence"] = pv.evidence;
  art.summary["limsup_pass_heuristic"] = profile.limsup.pass;
  art.summary["phi_limit_infinite_heuristic"] = profile.limit_infinite;

  std::ostringstream csv;
  csv << "family,params,argument,value,log_value,verdict\n";
  if (pot.product()) {
    const auto& eps = pot.epsilons();
    const double emin = *std::min_element(eps.begin(), eps.end());
    const bool poly = pot.family() == Potential::Family::product_polynomial;
    if (poly && emin > alpha.alpha) {
      art.summary["regime"] = "super (polynomial rate)";
      art.summary["poly_beta_exponent"] =
          with_tol(poly_beta_exponent(alpha, eps), 0.0);
    } else if (poly && emin < alpha.alpha && emin > 0.0) {
      WeakEtaClosedForm cf = weak_eta_closed_form(WeakFamily::poly, alpha, eps);
      art.summary["regime"] = "weak (algebraic decay)";
      art.summary["weak_eta_exponent"] = with_tol(cf.eta_exponent, 0.0);
      art.summary["decay_envelope_exponent"] = with_tol(cf.decay_exponent, 0.0);
      for (double t = 1.0; t <= 1e6; t *= 10.0)
        rate_rows(csv, to_string(cf.envelope.tag), "lambda=1", t,
                  cf.envelope.log_value(t), "");
    } else if (!poly) {
      art.summary["logsobolev_iff"] = logsobolev_iff(eps);
      if (emin < 0.0) {
        WeakEtaClosedForm cf =
            weak_eta_closed_form(WeakFamily::log_corrected, alpha, eps);
        art.summary["regime"] = "weak (stretched-exponential decay)";
        art.summary["decay_envelope_exponent"] =
            with_tol(cf.decay_exponent, 0.0);
        for (double t = 1.0; t <= 1e6; t *= 10.0)
          rate_rows(csv, to_string(cf.envelope.tag), "l1=1;l2=1", t,
                    cf.envelope.log_value(t), "");
      } else {
        art.summary["regime"] = "super (log-corrected rate)";
      }
    } else {
      art.summary["regime"] = emin == alpha.alpha
                                  ? "boundary (spectral gap holds, no super rate)"
                                  : "unknown";
    }
  }
  art.csv("rate_table.csv", csv.str());
}

}  // namespace

void run_task(const RunConfig& rc) {
  std::filesystem::create_directories(rc.out_dir);
  Artifacts art;
  art.dir = rc.out_dir;
  art.summary = json::object();

  if (rc.task == "criteria")
    run_criteria(rc, art);
  else if (rc.task == "rates")
    run_rates(rc, art);
  else if (rc.task == "form")
    run_form(rc, art);
  else if (rc.task == "lyapunov")
    run_lyapunov(rc, art);
  else if (rc.task == "gap")
    run_gap(rc, art);
  else if (rc.task == "simulate")
    run_simulate(rc, art);
  else if (rc.task == "report")
    run_report(rc, art);
  else
    throw config_error("unknown task '" + rc.task + "'");

  art.finish(rc);
}

}  // namespace axistable
