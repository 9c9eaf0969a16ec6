#include "axistable/potential.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <mutex>

#include "axistable/quadrature.hpp"

namespace axistable {

// ------------------------------------------------------------ Coefficient ---

struct Coefficient::Node {
  enum class Op { constant, add, mul, min, max, blend };
  Op op = Op::constant;
  double c0 = 0.0, c1 = 0.0, r_lo = 0.0, r_hi = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

Coefficient Coefficient::constant(double c) {
  auto n = std::make_shared<Node>();
  n->op = Node::Op::constant;
  n->c0 = c;
  return Coefficient(std::move(n));
}

namespace {
std::shared_ptr<Coefficient::Node> make_binary(Coefficient::Node::Op op,
                                               std::shared_ptr<const Coefficient::Node> a,
                                               std::shared_ptr<const Coefficient::Node> b) {
  auto n = std::make_shared<Coefficient::Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}
}  // namespace

Coefficient Coefficient::add(Coefficient a, Coefficient b) {
  return Coefficient(make_binary(Node::Op::add, a.node_, b.node_));
}
Coefficient Coefficient::mul(Coefficient a, Coefficient b) {
  return Coefficient(make_binary(Node::Op::mul, a.node_, b.node_));
}
Coefficient Coefficient::minimum(Coefficient a, Coefficient b) {
  return Coefficient(make_binary(Node::Op::min, a.node_, b.node_));
}
Coefficient Coefficient::maximum(Coefficient a, Coefficient b) {
  return Coefficient(make_binary(Node::Op::max, a.node_, b.node_));
}

Coefficient Coefficient::radial_blend(double near, double far, double r_lo, double r_hi) {
  if (!(r_hi > r_lo) || !(r_lo >= 0.0))
    throw config_error("blend radii must satisfy 0 <= r_lo < r_hi");
  auto n = std::make_shared<Node>();
  n->op = Node::Op::blend;
  n->c0 = near;
  n->c1 = far;
  n->r_lo = r_lo;
  n->r_hi = r_hi;
  return Coefficient(std::move(n));
}

namespace {

double eval_node(const Coefficient::Node& n, std::span<const double> x);

double radius(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::sqrt(s);
}

}  // namespace

double Coefficient::operator()(std::span<const double> x) const {
  return eval_node(*node_, x);
}

namespace {

double eval_node(const Coefficient::Node& n, std::span<const double> x) {
  using Op = Coefficient::Node::Op;
  switch (n.op) {
    case Op::constant: return n.c0;
    case Op::add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Op::mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Op::min: return std::min(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
    case Op::max: return std::max(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
    case Op::blend: {
      const double r = radius(x);
      if (r <= n.r_lo) return n.c0;
      if (r >= n.r_hi) return n.c1;
      const double t = (r - n.r_lo) / (n.r_hi - n.r_lo);
      return n.c0 + (n.c1 - n.c0) * t * t * (3.0 - 2.0 * t);
    }
  }
  return 0.0;
}

struct Interval {
  double lo, hi;
};

Interval bounds_node(const Coefficient::Node& n) {
  using Op = Coefficient::Node::Op;
  switch (n.op) {
    case Op::constant: return {n.c0, n.c0};
    case Op::blend:
      return {std::min(n.c0, n.c1), std::max(n.c0, n.c1)};
    case Op::add: {
      Interval a = bounds_node(*n.lhs), b = bounds_node(*n.rhs);
      return {a.lo + b.lo, a.hi + b.hi};
    }
    case Op::mul: {
      Interval a = bounds_node(*n.lhs), b = bounds_node(*n.rhs);
      double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
      return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    case Op::min: {
      Interval a = bounds_node(*n.lhs), b = bounds_node(*n.rhs);
      return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
    }
    case Op::max: {
      Interval a = bounds_node(*n.lhs), b = bounds_node(*n.rhs);
      return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

double Coefficient::lower_bound() const { return bounds_node(*node_).lo; }
double Coefficient::upper_bound() const { return bounds_node(*node_).hi; }

// --- tiny recursive-descent parser: expr := term (('+') term)*,
//     term := atom (('*') atom)*, atom := number | min(e,e) | max(e,e) |
//     blend(c,c,r,r) | '(' expr ')'
namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c))
      throw config_error("coefficient parse error: expected '" + std::string(1, c) +
                         "' at offset " + std::to_string(pos) + " in '" + s + "'");
  }
  bool match_word(const char* w) {
    skip();
    std::size_t len = std::strlen(w);
    if (s.compare(pos, len, w) == 0) {
      pos += len;
      return true;
    }
    return false;
  }
  double number() {
    skip();
    std::size_t end = pos;
    while (end < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
            s[end] == '-' || s[end] == '+' || s[end] == 'e' || s[end] == 'E'))
      ++end;
    try {
      std::size_t used = 0;
      double v = std::stod(s.substr(pos, end - pos), &used);
      pos += used;
      return v;
    } catch (...) {
      throw config_error("coefficient parse error: bad number at offset " +
                         std::to_string(pos) + " in '" + s + "'");
    }
  }

  Coefficient expr() {
    Coefficient v = term();
    while (eat('+')) v = Coefficient::add(v, term());
    return v;
  }
  Coefficient term() {
    Coefficient v = atom();
    while (eat('*')) v = Coefficient::mul(v, atom());
    return v;
  }
  Coefficient atom() {
    skip();
    if (match_word("blend")) {
      expect('(');
      double c0 = number();
      expect(',');
      double c1 = number();
      expect(',');
      double r0 = number();
      expect(',');
      double r1 = number();
      expect(')');
      return Coefficient::radial_blend(c0, c1, r0, r1);
    }
    if (match_word("min")) {
      expect('(');
      Coefficient a = expr();
      expect(',');
      Coefficient b = expr();
      expect(')');
      return Coefficient::minimum(a, b);
    }
    if (match_word("max")) {
      expect('(');
      Coefficient a = expr();
      expect(',');
      Coefficient b = expr();
      expect(')');
      return Coefficient::maximum(a, b);
    }
    if (eat('(')) {
      Coefficient v = expr();
      expect(')');
      return v;
    }
    return Coefficient::constant(number());
  }
};

std::string node_to_string(const Coefficient::Node& n) {
  using Op = Coefficient::Node::Op;
  char buf[128];
  switch (n.op) {
    case Op::constant:
      std::snprintf(buf, sizeof buf, "%.17g", n.c0);
      return buf;
    case Op::add:
      return node_to_string(*n.lhs) + " + " + node_to_string(*n.rhs);
    case Op::mul:
      return "(" + node_to_string(*n.lhs) + ") * (" + node_to_string(*n.rhs) + ")";
    case Op::min:
      return "min(" + node_to_string(*n.lhs) + ", " + node_to_string(*n.rhs) + ")";
    case Op::max:
      return "max(" + node_to_string(*n.lhs) + ", " + node_to_string(*n.rhs) + ")";
    case Op::blend:
      std::snprintf(buf, sizeof buf, "blend(%.17g, %.17g, %.17g, %.17g)", n.c0,
                    n.c1, n.r_lo, n.r_hi);
      return buf;
  }
  return "";
}

}  // namespace

Coefficient Coefficient::parse(const std::string& text) {
  Parser p{text};
  Coefficient v = p.expr();
  p.skip();
  if (p.pos != text.size())
    throw config_error("coefficient parse error: trailing input in '" + text + "'");
  return v;
}

std::string Coefficient::to_string() const { return node_to_string(*node_); }

// ------------------------------------------------------------- Marginal1D ---

Marginal1D Marginal1D::poly(double eps) {
  if (!(eps > 0.0)) throw config_error("polynomial marginal needs eps > 0");
  Marginal1D m;
  m.kind_ = Kind::poly;
  m.eps_ = eps;
  m.monotone_ = true;
  m.sup_radius_ = 0.0;
  m.log_sup_ = 0.0;
  m.unnorm_mass_ = 2.0 / eps;
  return m;
}

Marginal1D Marginal1D::log_corrected(double alpha, double eps) {
  Marginal1D m;
  m.kind_ = Kind::log_corrected;
  m.eps_ = eps;
  m.alpha_ = alpha;
  m.build_table();
  return m;
}

double Marginal1D::log_factor(double t) const {
  const double a = std::abs(t);
  if (kind_ == Kind::poly) return -(1.0 + eps_) * std::log1p(a);
  return -(1.0 + alpha_) * std::log1p(a) -
         eps_ * std::log(std::log(M_E + a));
}

void Marginal1D::build_table() {
  // Shape scan: the factor is unimodal in |t|; find the maximum and whether
  // it sits at 0 (monotone case).
  auto f = [this](double t) { return log_factor(t); };
  double best_r = 0.0, best = f(0.0);
  monotone_ = true;
  double prev = best;
  for (int k = 1; k <= 2048; ++k) {
    const double r = std::pow(10.0, -3.0 + 15.0 * k / 2048.0);
    const double v = f(r);
    if (v > prev + 1e-14) monotone_ = false;
    if (v > best) {
      best = v;
      best_r = r;
    }
    prev = v;
  }
  if (!monotone_ && best_r > 0.0) {
    // golden refinement around the scanned maximum
    double lo = best_r / 1.02, hi = best_r * 1.02;
    for (int it = 0; it < 60; ++it) {
      double m1 = lo + 0.382 * (hi - lo), m2 = lo + 0.618 * (hi - lo);
      if (f(m1) < f(m2)) lo = m1; else hi = m2;
    }
    best_r = 0.5 * (lo + hi);
    best = f(best_r);
  }
  sup_radius_ = monotone_ ? 0.0 : best_r;
  log_sup_ = monotone_ ? f(0.0) : best;

  // One-sided upper tails T(r) = \int_r^inf f by backward accumulation over
  // geometric knots; beyond the last knot the power envelope with the log
  // factor frozen seeds the recursion (mass there is ~1e-30 of the total).
  const double r_top = 1e30;
  const int per_decade = 8;
  const int decades = 33;  // 1e-3 .. 1e30
  knot_r_.clear();
  knot_tail_.clear();
  knot_r_.push_back(0.0);
  for (int k = 0; k <= decades * per_decade; ++k)
    knot_r_.push_back(std::pow(10.0, -3.0 + static_cast<double>(k) / per_decade));
  const std::size_t n = knot_r_.size();
  knot_tail_.assign(n, 0.0);
  auto fv = [this](double t) { return std::exp(log_factor(t)); };
  double tail = fv(r_top) * (1.0 + r_top) / alpha_;
  knot_tail_[n - 1] = tail;
  for (std::size_t i = n - 1; i-- > 0;) {
    tail += integrate_geometric(fv, std::max(knot_r_[i], 1e-18), knot_r_[i + 1], 16, 16);
    if (knot_r_[i] == 0.0)
      tail += integrate_gl(fv, 0.0, 1e-18, 8);
    knot_tail_[i] = tail;
  }
  unnorm_mass_ = 2.0 * knot_tail_[0];
}

double Marginal1D::unnorm_mass() const { return unnorm_mass_; }
double Marginal1D::log_normalizer() const { return -std::log(unnorm_mass_); }

double Marginal1D::tail(double u) const {
  u = std::abs(u);
  if (kind_ == Kind::poly) return std::pow(1.0 + u, -eps_);
  // table lookup with log-log interpolation between knots
  if (u <= knot_r_[1]) {
    // near 0: interpolate linearly against the density value
    double t0 = knot_tail_[0];
    return std::min(1.0, 2.0 * (t0 - u * std::exp(log_factor(0.5 * u))) / unnorm_mass_);
  }
  auto it = std::upper_bound(knot_r_.begin(), knot_r_.end(), u);
  if (it == knot_r_.end())
    return 2.0 * knot_tail_.back() * std::pow(u / knot_r_.back(), -alpha_) / unnorm_mass_;
  std::size_t hi = static_cast<std::size_t>(it - knot_r_.begin());
  std::size_t lo = hi - 1;
  const double lr0 = std::log(knot_r_[lo]), lr1 = std::log(knot_r_[hi]);
  const double lt0 = std::log(knot_tail_[lo]), lt1 = std::log(knot_tail_[hi]);
  const double w = (std::log(u) - lr0) / (lr1 - lr0);
  return 2.0 * std::exp(lt0 + w * (lt1 - lt0)) / unnorm_mass_;
}

double Marginal1D::cdf(double t) const {
  if (kind_ == Kind::poly) {
    const double half_tail = 0.5 * std::pow(1.0 + std::abs(t), -eps_);
    return t >= 0.0 ? 1.0 - half_tail : half_tail;
  }
  const double half_tail = 0.5 * tail(std::abs(t));
  return t >= 0.0 ? 1.0 - half_tail : half_tail;
}

double Marginal1D::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw numeric_error("quantile argument outside (0,1)");
  const bool upper = u >= 0.5;
  const double half_tail = upper ? (1.0 - u) : u;  // = 0.5*tail(|t|)
  double r;
  if (kind_ == Kind::poly) {
    r = std::pow(2.0 * half_tail, -1.0 / eps_) - 1.0;
  } else {
    // invert tail(r) = 2*half_tail by bisection on log radius
    const double target = 2.0 * half_tail;
    if (tail(0.0) <= target) {
      r = 0.0;
    } else {
      double lo = 1e-12, hi = knot_r_.back();
      if (tail(hi) > target) {
        // extreme quantile beyond the table: power extrapolation
        r = hi * std::pow(tail(hi) / target, 1.0 / alpha_);
        return upper ? r : -r;
      }
      for (int it = 0; it < 200; ++it) {
        double mid = std::sqrt(lo * hi);
        if (tail(mid) > target) lo = mid; else hi = mid;
        if (hi / lo < 1.0 + 1e-14) break;
      }
      r = std::sqrt(lo * hi);
    }
  }
  r = std::max(r, 0.0);
  return upper ? r : -r;
}

double Marginal1D::log_sup_beyond(double s) const {
  s = std::abs(s);
  if (s <= sup_radius_) return log_sup_;
  return log_factor(s);
}

// -------------------------------------------------------------- Potential ---

struct Potential::Impl {
  Family family = Family::custom;
  int dim = 1;
  double alpha_hint = 1.0;
  std::vector<double> eps;
  std::vector<Marginal1D> marginals;
  std::vector<Coefficient> coeffs;
  std::function<double(std::span<const double>)> custom_log_unnorm;
  double custom_log_sup = 0.0;
  std::optional<double> support_radius;
  std::optional<double> declared_normalizer;

  mutable std::once_flag norm_once;
  mutable double log_norm = 0.0;

  double log_unnorm(std::span<const double> x) const {
    switch (family) {
      case Family::product_polynomial:
      case Family::product_log_corrected: {
        double acc = 0.0;
        for (int i = 0; i < dim; ++i) acc += marginals[i].log_factor(x[i]);
        return acc;
      }
      case Family::variable_order: {
        double acc = 0.0;
        for (int i = 0; i < dim; ++i)
          acc += -(1.0 + coeffs[i](x)) * std::log1p(std::abs(x[i]));
        return acc;
      }
      case Family::custom:
        if (support_radius) {
          for (int i = 0; i < dim; ++i)
            if (std::abs(x[i]) > *support_radius)
              return -std::numeric_limits<double>::infinity();
        }
        return custom_log_unnorm(x);
    }
    return 0.0;
  }

  double compute_log_normalizer() const;
};

namespace {

// Deterministic Halton points in (0,1)^d, d <= 3.
double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

}  // namespace

double Potential::Impl::compute_log_normalizer() const {
  switch (family) {
    case Family::product_polynomial:
    case Family::product_log_corrected: {
      double acc = 0.0;
      for (const auto& m : marginals) acc += m.log_normalizer();
      return acc;
    }
    case Family::variable_order: {
      // Importance sampling against the product-polynomial proposal with the
      // declared lower bounds: the weight (1+|x_i|)^{-(a_i(x)-lb_i)} is in
      // (0,1], so the estimator is bounded. Deterministic Halton nodes.
      std::vector<Marginal1D> prop;
      double log_prop_mass = 0.0;
      for (const auto& c : coeffs) {
        const double lb = c.lower_bound();
        if (!(lb > 0.0))
          throw config_error("variable-order coefficients must have inf a_i > 0");
        prop.push_back(Marginal1D::poly(lb));
        log_prop_mass += std::log(prop.back().unnorm_mass());
      }
      static const int bases[3] = {2, 3, 5};
      const std::uint64_t n = 1 << 17;
      std::vector<double> x(dim);
      double acc = 0.0;
      for (std::uint64_t k = 1; k <= n; ++k) {
        double log_prop = 0.0;
        for (int i = 0; i < dim; ++i) {
          x[i] = prop[i].quantile(halton(k, bases[i]));
          log_prop += prop[i].log_factor(x[i]);
        }
        acc += std::exp(log_unnorm(x) - log_prop);
      }
      const double mean_weight = acc / static_cast<double>(n);
      // \int rho = mean_weight * \int prop
      return -(std::log(mean_weight) + log_prop_mass);
    }
    case Family::custom: {
      if (declared_normalizer) return std::log(*declared_normalizer);
      if (!support_radius)
        throw numeric_error(
            "custom potential without support radius or declared normalizer "
            "cannot be normalized");
      const double r = *support_radius;
      if (dim > 3) throw numeric_error("custom normalization restricted to d <= 3");
      // Tensor Gauss-Legendre over the support box, two refinement levels.
      auto integrate = [&](int per_axis) {
        const GaussLegendre& rule = gauss_legendre(per_axis);
        std::vector<double> x(dim);
        double acc = 0.0;
        std::vector<int> idx(dim, 0);
        const std::size_t total = static_cast<std::size_t>(
            std::pow(static_cast<double>(per_axis), dim));
        for (std::size_t flat = 0; flat < total; ++flat) {
          std::size_t rem = flat;
          double w = 1.0;
          for (int i = 0; i < dim; ++i) {
            int j = static_cast<int>(rem % per_axis);
            rem /= per_axis;
            x[i] = r * rule.nodes[j];
            w *= r * rule.weights[j];
          }
          acc += w * std::exp(log_unnorm(x));
        }
        return acc;
      };
      const double coarse = integrate(32);
      const double fine = integrate(48);
      if (std::abs(fine - coarse) > 1e-6 * std::abs(fine) + 1e-300)
        throw numeric_error("custom normalization quadrature did not converge",
                            coarse, fine);
      return -std::log(fine);
    }
  }
  return 0.0;
}

Potential Potential::product_polynomial(std::vector<double> eps) {
  if (eps.empty()) throw config_error("empty epsilon list");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::product_polynomial;
  impl->dim = static_cast<int>(eps.size());
  impl->eps = eps;
  for (double e : eps) impl->marginals.push_back(Marginal1D::poly(e));
  return Potential(std::move(impl));
}

Potential Potential::product_log_corrected(double alpha, std::vector<double> eps) {
  if (eps.empty()) throw config_error("empty epsilon list");
  StableIndex check(alpha);
  auto impl = std::make_shared<Impl>();
  impl->family = Family::product_log_corrected;
  impl->dim = static_cast<int>(eps.size());
  impl->eps = eps;
  impl->alpha_hint = alpha;
  for (double e : eps)
    impl->marginals.push_back(Marginal1D::log_corrected(alpha, e));
  return Potential(std::move(impl));
}

Potential Potential::variable_order(std::vector<Coefficient> coeffs) {
  if (coeffs.empty()) throw config_error("empty coefficient list");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::variable_order;
  impl->dim = static_cast<int>(coeffs.size());
  impl->coeffs = std::move(coeffs);
  for (const auto& c : impl->coeffs)
    if (!(c.lower_bound() > 0.0))
      throw config_error("variable-order coefficients must have inf a_i > 0");
  return Potential(std::move(impl));
}

Potential Potential::custom(int dim,
                            std::function<double(std::span<const double>)> log_unnorm,
                            double log_sup_unnorm,
                            std::optional<double> support_radius,
                            std::optional<double> declared_normalizer) {
  auto impl = std::make_shared<Impl>();
  impl->family = Family::custom;
  impl->dim = dim;
  impl->custom_log_unnorm = std::move(log_unnorm);
  impl->custom_log_sup = log_sup_unnorm;
  impl->support_radius = support_radius;
  impl->declared_normalizer = declared_normalizer;
  return Potential(std::move(impl));
}

Potential Potential::uniform_box(int dim, double r) {
  const double log_density = -static_cast<double>(dim) * std::log(2.0 * r);
  return custom(
      dim, [log_density](std::span<const double>) { return log_density; },
      log_density, r, 1.0);
}

Potential::Family Potential::family() const { return impl_->family; }
int Potential::dim() const { return impl_->dim; }
double Potential::alpha_hint() const { return impl_->alpha_hint; }

double Potential::log_unnorm(std::span<const double> x) const {
  return impl_->log_unnorm(x);
}

double Potential::log_normalizer() const {
  std::call_once(impl_->norm_once,
                 [this] { impl_->log_norm = impl_->compute_log_normalizer(); });
  return impl_->log_norm;
}

double Potential::normalizer() const { return std::exp(log_normalizer()); }

double Potential::log_density(std::span<const double> x) const {
  return log_normalizer() + impl_->log_unnorm(x) - offset_;
}

double Potential::log_sup_density() const {
  switch (impl_->family) {
    case Family::product_polynomial:
    case Family::product_log_corrected: {
      double acc = log_normalizer() - offset_;
      for (const auto& m : impl_->marginals) acc += m.log_sup();
      return acc;
    }
    case Family::variable_order:
      // each factor is bounded by 1 (its value at x_i = 0)
      return log_normalizer() - offset_;
    case Family::custom:
      return log_normalizer() + impl_->custom_log_sup - offset_;
  }
  return 0.0;
}

bool Potential::product() const {
  return impl_->family == Family::product_polynomial ||
         impl_->family == Family::product_log_corrected;
}

bool Potential::product_monotone() const {
  if (!product()) return false;
  for (const auto& m : impl_->marginals)
    if (!m.monotone()) return false;
  return true;
}

const Marginal1D& Potential::marginal(int i) const {
  if (!product()) throw numeric_error("marginal() requires a product family");
  return impl_->marginals.at(static_cast<std::size_t>(i));
}

const Coefficient& Potential::coefficient(int i) const {
  if (impl_->family != Family::variable_order)
    throw numeric_error("coefficient() requires a variable-order family");
  return impl_->coeffs.at(static_cast<std::size_t>(i));
}

const std::vector<double>& Potential::epsilons() const { return impl_->eps; }

std::optional<double> Potential::support_radius() const {
  return impl_->support_radius;
}

Potential Potential::with_offset(double c) const {
  Potential copy = *this;
  copy.offset_ += c;
  return copy;
}

double Potential::offset() const { return offset_; }

Potential::Density Potential::eval_density(std::span<const double> x) const {
  for (double xi : x)
    if (!std::isfinite(xi)) throw numeric_error("eval_density at non-finite point");
  Density d;
  d.log_unnorm_density = impl_->log_unnorm(x) - offset_;
  d.v = -log_density(x);
  d.unnorm_density = std::exp(d.log_unnorm_density);
  d.saturated = std::abs(d.log_unnorm_density) > 700.0;
  return d;
}

}  // namespace axistable
