#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "axistable/forms.hpp"
#include "axistable/generator.hpp"
#include "axistable/rng.hpp"

using namespace axistable;

namespace {
const StableIndex kAlpha1{1.0};

TestFunction random_bounded(int dim, RngStream& rng) {
  std::vector<TensorTerm> terms;
  for (int t = 0; t < 1 + rng.uniform_index(2); ++t) {
    TensorTerm term;
    term.coeff = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < dim; ++i) {
      Atom1D a;
      if (rng.uniform_index(2) == 0)
        a = {Atom1D::Kind::bump, rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0)};
      else
        a = {Atom1D::Kind::gauss, rng.uniform(-2.0, 2.0), rng.uniform(0.5, 1.5)};
      term.atoms.push_back(a);
    }
    terms.push_back(term);
  }
  return TestFunction(dim, terms);
}
}  // namespace

TEST_CASE("phi: values and Holder certificate") {
  std::vector<double> origin{0.0, 0.0};
  CHECK(phi_lyapunov(origin, 0.5) == doctest::Approx(1.0));
  std::vector<double> ones{1.0, 1.0};
  CHECK(phi_lyapunov(ones, 0.5) == doctest::Approx(3.0));

  RngStream rng(7);
  const double gamma = 0.5;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x{rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0)};
    std::vector<double> y{rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0)};
    double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
    if (dist <= 1.0) continue;
    CHECK(std::abs(phi_lyapunov(x, gamma) - phi_lyapunov(y, gamma)) <=
          2.0 * std::pow(dist, gamma) + 1e-12);
  }
}

TEST_CASE("generator on constants is exactly zero") {
  auto pot = Potential::product_polynomial({2.0});
  auto c = TestFunction::constant(1, 5.0);
  std::vector<double> x{2.0};
  CHECK(apply_generator(pot, kAlpha1, c, x) == 0.0);
}

TEST_CASE("generator of phi at the origin: positive, finite, oracle-stable") {
  auto pot = Potential::product_polynomial({2.0});
  std::vector<double> x{0.0};
  const double v = apply_generator_phi(pot, kAlpha1, 0.5, x);
  CHECK(v > 0.0);
  CHECK(std::isfinite(v));
  GeneratorSpec halved;
  halved.per_decade *= 2;
  const double oracle = apply_generator_phi(pot, kAlpha1, 0.5, x, halved);
  CHECK(std::abs(v - oracle) <= 1e-6 * std::abs(oracle));
}

TEST_CASE("paper bound on bounded functions") {
  auto pot = Potential::product_polynomial({2.0});
  RngStream rng(11);
  // two-valued-ish bounded g
  auto g = TestFunction::coordinate_atom(1, 0, {Atom1D::Kind::step, 0.3, 0.7});
  for (double xv : {0.0, 1.5, -4.0, 20.0}) {
    std::vector<double> x{xv};
    const double lg = apply_generator(pot, kAlpha1, g, x);
    const double m = std::exp(pot.log_sup_density() + pot.potential_value(x));
    const double bound = (2.0 * 1.0 / 1.0) * (1.0 + m) * g.sup_bound();
    CHECK(std::abs(lg) <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("integration by parts against the truncated bilinear form") {
  RngStream rng(13);
  QuadratureSpec qs;
  qs.target_rel_tol = 1e-4;
  for (int rep = 0; rep < 4; ++rep) {
    const int dim = rep < 2 ? 1 : 2;
    auto pot = dim == 1 ? Potential::product_polynomial({2.0})
                        : Potential::product_polynomial({1.5, 2.0});
    auto f = random_bounded(dim, rng);
    auto g = random_bounded(dim, rng);
    const double rhs = bilinear_form(pot, kAlpha1, f, g, qs, Truncation::above_one);
    auto breaks = std::vector<std::vector<double>>();
    const OuterRule rule = build_outer_rule(pot, qs);
    const double lhs = -rule.expect([&](std::span<const double> x) {
      return f(x) * apply_generator(pot, kAlpha1, g, x);
    });
    CHECK(lhs == doctest::Approx(rhs).epsilon(5e-3));
  }
}

TEST_CASE("key drift-energy inequality of the proof") {
  // mu(f^2 (-L phi)/phi) <= D_{>1}(f,f) for random bounded f
  auto pot = Potential::product_polynomial({1.5, 2.0});
  RngStream rng(17);
  QuadratureSpec qs;
  qs.target_rel_tol = 1e-4;
  const double gamma = 0.5;
  for (int rep = 0; rep < 3; ++rep) {
    auto f = random_bounded(2, rng);
    const OuterRule rule = build_outer_rule(pot, qs);
    const double lhs = rule.expect([&](std::span<const double> x) {
      const double v = f(x);
      return v * v * (-apply_generator_phi(pot, kAlpha1, gamma, x)) /
             phi_lyapunov(x, gamma);
    });
    const double d = dirichlet_form(pot, kAlpha1, f, qs, Truncation::above_one);
    CHECK(lhs <= d + 5e-3 * (std::abs(d) + 1.0));
  }
}

TEST_CASE("drift ratios are invariant under a constant tilt of V") {
  auto pot = Potential::product_polynomial({2.0});
  auto tilted = pot.with_offset(1.0);
  for (double xv : {1.0, 3.0, 17.0}) {
    std::vector<double> x{xv};
    const double a = apply_generator_phi(pot, kAlpha1, 0.5, x);
    const double b = apply_generator_phi(tilted, kAlpha1, 0.5, x);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    const double la = std::exp(log_lambda(pot, kAlpha1, x));
    const double lb = std::exp(log_lambda(tilted, kAlpha1, x));
    CHECK(la == doctest::Approx(lb).epsilon(1e-10));
  }
}

TEST_CASE("drift verification passes in the supercritical regime (d=1)") {
  auto pot = Potential::product_polynomial({2.0});
  CriteriaOptions copts;
  copts.ladder_span = 1e5;
  auto profile = build_criteria_profile(pot, kAlpha1, 0.5, copts);
  DriftOptions opts;
  opts.steps = 10;
  auto rep = drift_verify(pot, kAlpha1, 0.5, profile, opts);
  CHECK(rep.pass);
  CHECK(rep.c1 > 0.0);
  CHECK(rep.r0 < 1e3);
  // every sampled ratio beyond r0 is <= -c1 by construction
  for (std::size_t k = 0; k < rep.radii.size(); ++k)
    if (rep.radii[k] >= rep.r0)
      CHECK(rep.worst_ratio[k] <= -rep.c1 * (1.0 - 1e-12));
}

TEST_CASE("drift verification refuses when the liminf hypothesis fails") {
  auto pot = Potential::product_polynomial({0.5});
  CriteriaOptions copts;
  copts.ladder_span = 1e5;
  auto profile = build_criteria_profile(pot, kAlpha1, 0.4, copts);
  CHECK_THROWS_AS(drift_verify(pot, kAlpha1, 0.4, profile), gate_error);
}
