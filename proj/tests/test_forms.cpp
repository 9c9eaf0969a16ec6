#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "axistable/forms.hpp"
#include "axistable/rng.hpp"

using namespace axistable;

namespace {

const StableIndex kAlpha1{1.0};

QuadratureSpec fast_spec() {
  QuadratureSpec s;
  s.target_rel_tol = 1e-4;
  s.inner_per_decade = 6;
  s.inner_order = 10;
  return s;
}

Atom1D bump(double center, double scale) {
  return {Atom1D::Kind::bump, center, scale};
}
Atom1D gauss(double center, double scale) {
  return {Atom1D::Kind::gauss, center, scale};
}
Atom1D tent(double center, double scale) {
  return {Atom1D::Kind::tent, center, scale};
}

TestFunction random_fn(int dim, RngStream& rng) {
  std::vector<TensorTerm> terms;
  const int nterms = 1 + rng.uniform_index(2);
  for (int t = 0; t < nterms; ++t) {
    TensorTerm term;
    term.coeff = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < dim; ++i) {
      Atom1D a;
      switch (rng.uniform_index(3)) {
        case 0: a = bump(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0)); break;
        case 1: a = gauss(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 1.5)); break;
        default: a = tent(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0)); break;
      }
      term.atoms.push_back(a);
    }
    terms.push_back(term);
  }
  return TestFunction(dim, terms);
}

}  // namespace

TEST_CASE("constant functions have exactly zero energy") {
  for (int dim : {1, 2}) {
    auto pot = dim == 1 ? Potential::product_polynomial({2.0})
                        : Potential::product_polynomial({1.5, 2.0});
    auto f = TestFunction::constant(dim, 3.0);
    CHECK(dirichlet_form(pot, kAlpha1, f, fast_spec()) == 0.0);
    CHECK(dirichlet_form(pot, kAlpha1, f, fast_spec(), Truncation::above_one) == 0.0);
  }
}

TEST_CASE("Monte Carlo oracle agrees with the quadrature (d=1)") {
  auto pot = Potential::product_polynomial({2.0});
  auto f = TestFunction::coordinate_atom(1, 0, bump(0.0, 1.0));
  const double quad = dirichlet_form(pot, kAlpha1, f);

  // proposal: |z| ~ z^{1-a} on (0,1], |z|^{-1-a} beyond; importance-weight the
  // exact integrand. 1e6 samples, compare within 3 standard errors.
  const double alpha = 1.0;
  const double mass_in = 2.0 / (2.0 - alpha);
  const double mass_out = 2.0 / alpha;
  const double mass = mass_in + mass_out;
  RngStream rng(99);
  const int n = 1000000;
  double acc = 0.0, acc2 = 0.0;
  std::vector<double> x(1);
  for (int k = 0; k < n; ++k) {
    x[0] = pot.marginal(0).quantile(rng.uniform());
    double z;
    if (rng.uniform() < mass_in / mass)
      z = std::pow(rng.uniform(), 1.0 / (2.0 - alpha));
    else
      z = std::pow(rng.uniform(), -1.0 / alpha);
    z *= rng.sign();
    const double q = std::min(std::pow(std::abs(z), 1.0 - alpha),
                              std::pow(std::abs(z), -1.0 - alpha)) /
                     mass;
    const double df = f.eval_shifted(x, 0, z) - f(x);
    const double v = 0.5 * df * df * std::pow(std::abs(z), -1.0 - alpha) / q;
    acc += v;
    acc2 += v * v;
  }
  const double mc = acc / n;
  const double se = std::sqrt((acc2 / n - mc * mc) / n);
  CHECK(std::abs(quad - mc) <= 3.0 * se + 1e-12);
}

TEST_CASE("truncated energy never exceeds the full energy") {
  RngStream rng(3);
  // an inequality with a genuine margin: a loose tolerance keeps the d=2
  // cases at the first refinement level
  QuadratureSpec s = fast_spec();
  s.target_rel_tol = 5e-4;
  for (int rep = 0; rep < 12; ++rep) {
    const int dim = rep % 3 == 2 ? 2 : 1;
    auto pot = dim == 1 ? Potential::product_polynomial({2.0})
                        : Potential::product_polynomial({1.5, 2.0});
    auto f = random_fn(dim, rng);
    const double full = dirichlet_form(pot, kAlpha1, f, s);
    const double trunc = dirichlet_form(pot, kAlpha1, f, s, Truncation::above_one);
    CHECK(full >= 0.0);
    CHECK(trunc <= full * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("bilinear form: constants, symmetry, Cauchy-Schwarz, diagonal") {
  RngStream rng(5);
  auto pot = Potential::product_polynomial({2.0});
  auto c = TestFunction::constant(1, 4.0);
  auto f = random_fn(1, rng);
  auto g = random_fn(1, rng);

  CHECK(bilinear_form(pot, kAlpha1, f, c, fast_spec()) == 0.0);
  const double fg = bilinear_form(pot, kAlpha1, f, g, fast_spec());
  const double gf = bilinear_form(pot, kAlpha1, g, f, fast_spec());
  CHECK(fg == doctest::Approx(gf).epsilon(1e-6));

  const double ff = dirichlet_form(pot, kAlpha1, f, fast_spec());
  const double gg = dirichlet_form(pot, kAlpha1, g, fast_spec());
  CHECK(fg * fg <= ff * gg * (1.0 + 1e-6) + 1e-15);
  CHECK(bilinear_form(pot, kAlpha1, f, f, fast_spec()) ==
        doctest::Approx(ff).epsilon(1e-9));
}

TEST_CASE("moments: constants, sign witness, bound") {
  auto pot = Potential::product_polynomial({2.0});
  auto c = TestFunction::constant(1, 2.5);
  auto mc = variance_and_mean(pot, c);
  CHECK(mc.mean == doctest::Approx(2.5));
  CHECK(mc.variance == doctest::Approx(0.0));

  // smoothed sign under a symmetric measure: mean 0, variance ~ 1
  auto s = TestFunction::coordinate_atom(1, 0, {Atom1D::Kind::step, 0.0, 1e-3});
  auto ms = variance_and_mean(pot, s);
  CHECK(std::abs(ms.mean) < 1e-9);
  CHECK(ms.variance == doctest::Approx(1.0).epsilon(3e-3));

  RngStream rng(8);
  auto f = random_fn(1, rng);
  auto mf = variance_and_mean(pot, f);
  const OuterRule rule = build_outer_rule(pot, QuadratureSpec{});
  const double f2 = rule.expect([&](std::span<const double> x) {
    const double v = f(x);
    return v * v;
  });
  CHECK(mf.variance <= f2 + 1e-12);
}

TEST_CASE("entropy: constants, homogeneity, two-valued closed form") {
  auto pot = Potential::product_polynomial({2.0});
  auto c = TestFunction::constant(1, 3.0);
  // outer truncation keeps total weight at 1 - O(1e-8), leaving that much
  // residual entropy on constants
  CHECK(std::abs(entropy_functional(pot, c)) < 1e-6);

  RngStream rng(13);
  auto f0 = random_fn(1, rng);
  auto f = f0.scaled(0.4 / (f0.sup_bound() + 1e-9)).plus_constant(1.0);
  REQUIRE(f.positive());
  const double e1 = entropy_functional(pot, f);
  const double e2 = entropy_functional(pot, f.scaled(2.0));
  CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-8));

  // two-valued: values a on (0,inf), b on (-inf,0), thin smoothing strip
  const double a = 2.0, b = 0.5;
  auto stepf = TestFunction::coordinate_atom(1, 0, {Atom1D::Kind::step, 0.0, 1e-4},
                                             0.5 * (a - b))
                   .plus_constant(0.5 * (a + b));
  REQUIRE(stepf.positive());
  const double m = 0.5 * (a + b);
  const double expected =
      0.5 * a * std::log(a) + 0.5 * b * std::log(b) - m * std::log(m);
  CHECK(entropy_functional(pot, stepf) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("quadrature consistency under refinement of the spec") {
  RngStream rng(21);
  auto pot = Potential::product_polynomial({2.0});
  for (int rep = 0; rep < 6; ++rep) {
    auto f = random_fn(1, rng);
    QuadratureSpec s0;
    const double v0 = dirichlet_form(pot, kAlpha1, f, s0);
    QuadratureSpec s1 = s0;
    s1.delta_inner *= 0.5;
    s1.inner_per_decade *= 2;
    const double v1 = dirichlet_form(pot, kAlpha1, f, s1);
    CHECK(std::abs(v1 - v0) <=
          2.0 * s0.target_rel_tol * std::max({std::abs(v0), std::abs(v1), 1e-12}));
  }
}

TEST_CASE("local rate shape") {
  auto pot = Potential::product_polynomial({2.0});
  // saturation: constant in t once t exceeds the cap
  const double b1 = log_local_super_beta(pot, kAlpha1, 1.0, 1e7, 1.0);
  const double b2 = log_local_super_beta(pot, kAlpha1, 1.0, 1e9, 1.0);
  CHECK(b1 == doctest::Approx(b2));
  // small-t slope is -d/alpha
  const double s1 = log_local_super_beta(pot, kAlpha1, 1.0, 1e-6, 1.0);
  const double s2 = log_local_super_beta(pot, kAlpha1, 1.0, 1e-5, 1.0);
  CHECK((s1 - s2) / std::log(10.0) == doctest::Approx(1.0).epsilon(1e-9));

  // unit-density box (half-width 1/2, so e^V = 1 inside): the extrema drop
  // out entirely and beta = c3 (t ^ r^alpha)^{-d/alpha}
  auto box = Potential::uniform_box(1, 0.5);
  CHECK(local_super_beta(box, kAlpha1, 0.2, 0.05, 1.0) ==
        doctest::Approx(std::pow(0.05, -1.0)));
  CHECK(local_super_beta(box, kAlpha1, 0.2, 100.0, 1.0) ==
        doctest::Approx(std::pow(0.2, -1.0)));
}

TEST_CASE("residuals: vacuous constants and satisfied cases") {
  auto pot = Potential::product_polynomial({2.0});
  auto c = TestFunction::constant(1, 1.0);
  ResidualInput in;
  in.kind = ResidualInput::Kind::poincare;
  auto r = inequality_residual(in, pot, kAlpha1, c, fast_spec());
  CHECK(r.vacuous);

  RngStream rng(31);
  auto f = random_fn(1, rng);
  auto rp = inequality_residual(in, pot, kAlpha1, f, fast_spec());
  CHECK(rp.minimal_constant > 0.0);
  in.constant = rp.minimal_constant * 1.01;
  auto rp2 = inequality_residual(in, pot, kAlpha1, f, fast_spec());
  CHECK(rp2.satisfied);
}

TEST_CASE("entropy residual at 1+eps f recovers the poincare residual") {
  auto pot = Potential::product_polynomial({1.0});
  RngStream rng(41);
  auto f0 = random_fn(1, rng);
  auto f = f0.scaled(0.5 / (f0.sup_bound() + 1e-9));

  ResidualInput pin;
  pin.kind = ResidualInput::Kind::poincare;
  const double poincare_min =
      inequality_residual(pin, pot, kAlpha1, f, fast_spec()).minimal_constant;

  auto ratio_at = [&](double eps) {
    auto g = f.scaled(eps).plus_constant(1.0);
    ResidualInput ein;
    ein.kind = ResidualInput::Kind::entropy;
    return inequality_residual(ein, pot, kAlpha1, g, fast_spec()).minimal_constant;
  };
  // Richardson extrapolation of Ent/D(f,log f) to eps -> 0; the limit is
  // Var/(2 D), half the poincare constant
  const double m = 2.0 * ratio_at(0.025) - ratio_at(0.05);
  CHECK(2.0 * m == doctest::Approx(poincare_min).epsilon(0.05));
}

TEST_CASE("zero energy exactly characterizes constants on the atom library") {
  auto pot = Potential::product_polynomial({2.0});
  QuadratureSpec s = fast_spec();
  // every nonconstant atom kind carries strictly positive energy
  for (Atom1D::Kind kind : {Atom1D::Kind::bump, Atom1D::Kind::gauss,
                            Atom1D::Kind::tent, Atom1D::Kind::step}) {
    auto f = TestFunction::coordinate_atom(1, 0, {kind, 0.3, 1.2});
    CHECK(dirichlet_form(pot, kAlpha1, f, s) > 1e-6);
  }
  CHECK(dirichlet_form(pot, kAlpha1, TestFunction::constant(1, 7.0), s) == 0.0);
}

TEST_CASE("weak residual witness grows without ceiling in the failing regime") {
  auto pot = Potential::product_polynomial({0.5});
  QuadratureSpec s = fast_spec();
  const double r = 1e-4;
  std::vector<double> etas;
  for (int idx : {2, 4, 6}) {
    auto g = TestFunction::coordinate_atom(1, 0,
                                           {Atom1D::Kind::bump, 0.0,
                                            std::pow(2.0, idx)});
    ResidualInput in;
    in.kind = ResidualInput::Kind::weak;
    in.r = r;
    auto res = inequality_residual(in, pot, kAlpha1, g, s);
    etas.push_back(res.minimal_constant);
  }
  // the minimal weak constant climbs as the plateau widens
  CHECK(etas[1] > etas[0] * 1.5);
  CHECK(etas[2] > etas[1] * 1.5);
}
