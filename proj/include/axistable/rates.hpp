#pragma once

// Criterion verdicts and closed-form rate functions: the spectral-gap
// verdicts with their sharp parameter thresholds, the beta and eta rate
// families, the variable-order analysis, the per-coordinate entropy
// condition, and the weak rate from reference-measure tail masses. The
// criteria assert existence of their constants only, so every such constant
// is a free parameter with default 1; verdicts depend on exponents and
// shapes alone.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "axistable/criteria.hpp"
#include "axistable/potential.hpp"

namespace axistable {

enum class Verdict { holds, fails, unknown };
const char* to_string(Verdict v);

struct RateFunction {
  enum class Tag {
    super_poincare_beta,
    poly_beta,
    log_beta,
    weak_eta,
    weak_eta_poly,
    weak_eta_log,
    decay_envelope_power,
    decay_envelope_stretched,
    decay_envelope_exponential,
  };
  Tag tag;
  std::map<std::string, double> params;
  std::function<double(double)> log_value;  // natural log of the rate

  double value(double s) const { return std::exp(log_value(s)); }
  double operator()(double s) const { return value(s); }
};

const char* to_string(RateFunction::Tag t);

// ---- Poincare verdict -------------------------------------------------------
struct PoincareVerdict {
  Verdict verdict = Verdict::unknown;
  std::string evidence;
};

// Closed-form thresholds first (they are exact iff statements for the
// built-in families); the numeric profile, when supplied, upgrades an
// undecided case to a heuristic HOLDS.
PoincareVerdict poincare_verdict(const Potential& pot, StableIndex alpha,
                                 const CriteriaProfile* profile = nullptr);

// ---- super rate via the tabulated Phi --------------------------------------
struct SuperBetaOptions {
  double c1 = 1.0;
  double c2 = 1.0;
};

struct SuperBetaValue {
  double log_value;
  double value;       // +inf when the log overflows
  double box_radius;  // Phi^{-1}(c2 (1 + 1/s))
};

SuperBetaValue super_poincare_beta(const Potential& pot, StableIndex alpha,
                                   const CriteriaProfile& profile, double s,
                                   const SuperBetaOptions& opts = {});

// ---- closed-form tail rates ---------------------------------------------------
struct PolyBeta {
  double exponent;   // E in beta(r) = c (1 + r^{-E})
  double log_value;
  double value;
};
PolyBeta poly_beta_rate(StableIndex alpha, const std::vector<double>& eps,
                             double r, double c = 1.0);
double poly_beta_exponent(StableIndex alpha, const std::vector<double>& eps);

struct LogBeta {
  double inner_exponent;  // -1/eps_* inside the exponential
  double log_value;       // c (1 + r^{-1/eps_*})
  double value;
};
LogBeta log_beta_rate(StableIndex alpha, const std::vector<double>& eps,
                           double r, double c = 1.0);
bool logsobolev_iff(const std::vector<double>& eps);

// ---- variable order ----------------------------------------------------------
struct VariableOrderOptions {
  double r_min = 1.0;
  double r_max = 1e6;
  int shells_per_decade = 6;
  int directions = 0;        // 0 = family default
  double eps_slack = -1.0;   // <0: auto (0 when the inf stabilizes)
};

struct VariableOrderReport {
  double a_star = 0.0;                // liminf A(x) estimate
  std::vector<double> radii;
  std::vector<double> a_min;          // per-shell direction minimum of A
  std::vector<bool> condition_m_ge_n; // per shell
  bool condition_all = false;
  bool stabilized = false;
  double eps_slack = 0.0;
  std::vector<double> b;              // sup bounds B_i
  std::optional<double> beta_exponent;
  Verdict poincare = Verdict::unknown;
};

VariableOrderReport variable_order_analyze(const Potential& pot,
                                           StableIndex alpha,
                                           const VariableOrderOptions& opts = {});

// ---- entropy condition -------------------------------------------------------
struct EntropyConditionOptions {
  double extent = 1e3;   // grid box half-width
  int grid = 96;         // log-spaced samples per sign per axis
  int refine_rounds = 3;
};

struct EntropyCondition {
  std::vector<double> c_i;     // per-coordinate minima; 0 on decay verdict
  double entropy_constant;     // 2 * max_i 1/C_i, +inf if any C_i = 0
  bool holds;                  // all C_i > 0
};

EntropyCondition entropy_condition(const Potential& pot, StableIndex alpha,
                                   const EntropyConditionOptions& opts = {});

// ---- weak rate via reference tail masses ------------------------------------
// Sub-level sets D_s = { e^{V0 - V} <= s }; eta(r) = C * inf{ s : mu_V(D_s)
// >= 1/(1+r) }. pot0 defaults to the per-coordinate envelope reference.
Potential default_weak_reference(const Potential& pot, StableIndex alpha);

double weak_eta(const Potential& pot, const Potential& pot0, StableIndex alpha,
                double r, double c = 1.0);

// mass of D_s (exposed for tests)
double weak_sublevel_mass(const Potential& pot, const Potential& pot0,
                          double s);

struct WeakEtaClosedForm {
  RateFunction eta;       // weak_eta_poly or weak_eta_log
  RateFunction envelope;  // matching decay envelope in t
  double eta_exponent;    // power of r^{-1} (poly) or of log(1+1/r) (log)
  double decay_exponent;  // power decay or stretched exponent
};

enum class WeakFamily { poly, log_corrected };

WeakEtaClosedForm weak_eta_closed_form(WeakFamily family, StableIndex alpha,
                                       const std::vector<double>& eps,
                                       double c = 1.0);

// box extrema of e^{V} used by the super rate and the local rate
double log_sup_potential_on_box(const Potential& pot, double r);
double log_inf_potential_on_box(const Potential& pot, double r);

}  // namespace axistable
