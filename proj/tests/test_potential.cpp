#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "axistable/potential.hpp"
#include "axistable/quadrature.hpp"
#include "axistable/rng.hpp"

using namespace axistable;

TEST_CASE("eval_density closed forms") {
  auto pot = Potential::product_polynomial({1.5, 2.0});
  std::vector<double> origin{0.0, 0.0};
  auto d0 = pot.eval_density(origin);
  CHECK(d0.unnorm_density == doctest::Approx(1.0));

  std::vector<double> ones{1.0, 1.0};
  auto d1 = pot.eval_density(ones);
  CHECK(d1.unnorm_density ==
        doctest::Approx(std::pow(2.0, -2.5) * std::pow(2.0, -3.0)).epsilon(1e-12));
  CHECK(!d1.saturated);

  auto logc = Potential::product_log_corrected(1.0, {0.0});
  std::vector<double> z{0.0};
  CHECK(logc.eval_density(z).unnorm_density == doctest::Approx(1.0));

  // extreme point: saturated flag with the log value retained
  auto steep = Potential::product_polynomial({200.0});
  std::vector<double> far{1e300};
  auto ds = steep.eval_density(far);
  CHECK(ds.saturated);
  CHECK(ds.log_unnorm_density == doctest::Approx(-201.0 * std::log1p(1e300)));
}

TEST_CASE("normalizer closed forms and quadrature consistency") {
  CHECK(Potential::product_polynomial({1.5}).normalizer() == doctest::Approx(0.75));
  CHECK(Potential::product_polynomial({1.5, 2.0}).normalizer() ==
        doctest::Approx(0.75 * 1.0));
  CHECK(Potential::uniform_box(1, 3.0).normalizer() == doctest::Approx(1.0));

  // log-corrected: C * \int e^{-V} = 1 within quadrature tolerance
  auto logc = Potential::product_log_corrected(1.0, {1.0});
  auto f = [&](double t) {
    std::vector<double> x{t};
    return std::exp(logc.log_unnorm(x));
  };
  const double mass = 2.0 * integrate_halfline(f, 1.0);
  CHECK(logc.normalizer() * mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("declared sup bound dominates sampled evaluations") {
  RngStream rng(5);
  for (auto pot : {Potential::product_polynomial({0.7, 2.2}),
                   Potential::product_log_corrected(1.2, {-1.0, 0.5})}) {
    const double bound = pot.log_sup_density();
    for (int k = 0; k < 500; ++k) {
      std::vector<double> x{std::tan(rng.uniform(-1.5, 1.5)) * 10.0,
                            std::tan(rng.uniform(-1.5, 1.5)) * 10.0};
      CHECK(pot.log_density(x) <= bound + 1e-12);
    }
  }
}

TEST_CASE("marginal cdf/quantile/tail closed forms") {
  auto m = Marginal1D::poly(2.0);
  CHECK(m.unnorm_mass() == doctest::Approx(1.0));
  CHECK(m.tail(3.0) == doctest::Approx(std::pow(4.0, -2.0)));
  CHECK(m.cdf(0.0) == doctest::Approx(0.5));
  for (double u : {0.02, 0.3, 0.5001, 0.77, 0.995})
    CHECK(m.cdf(m.quantile(u)) == doctest::Approx(u).epsilon(1e-10));

  auto lc = Marginal1D::log_corrected(1.0, 1.0);
  CHECK(lc.monotone());
  for (double u : {0.05, 0.4, 0.6, 0.9, 0.999})
    CHECK(lc.cdf(lc.quantile(u)) == doctest::Approx(u).epsilon(1e-6));
  // tail is a genuine survival function
  CHECK(lc.tail(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lc.tail(10.0) > lc.tail(100.0));

  // strongly negative log exponent: the factor peaks away from zero
  auto hump = Marginal1D::log_corrected(0.5, -8.0);
  CHECK(!hump.monotone());
  CHECK(hump.sup_radius() > 0.0);
  CHECK(hump.log_sup() >= hump.log_factor(0.0));
  CHECK(hump.log_sup_beyond(hump.sup_radius() * 4.0) ==
        doctest::Approx(hump.log_factor(hump.sup_radius() * 4.0)));
}

TEST_CASE("coefficient grammar: parse, eval, bounds") {
  auto c = Coefficient::parse("blend(2, 3, 10, 20)");
  std::vector<double> near{1.0}, mid{15.0}, far{50.0};
  CHECK(c(near) == doctest::Approx(2.0));
  CHECK(c(far) == doctest::Approx(3.0));
  CHECK(c(mid) > 2.0);
  CHECK(c(mid) < 3.0);
  CHECK(c.lower_bound() == doctest::Approx(2.0));
  CHECK(c.upper_bound() == doctest::Approx(3.0));

  auto expr = Coefficient::parse("min(2 + 0.5, max(1, blend(2,3,5,9)))");
  CHECK(expr(near) == doctest::Approx(2.0));
  CHECK(expr(far) == doctest::Approx(2.5));
  CHECK_THROWS_AS(Coefficient::parse("blend(1,2,3"), config_error);

  // round trip through to_string
  auto again = Coefficient::parse(c.to_string());
  CHECK(again(mid) == doctest::Approx(c(mid)));
}

TEST_CASE("variable-order potential evaluates and normalizes") {
  auto pot = Potential::variable_order(
      {Coefficient::parse("blend(2, 3, 10, 20)"), Coefficient::constant(2.5)});
  std::vector<double> x{1.0, 1.0};
  // inside the blend's inner radius the exponent is the near constant
  CHECK(pot.log_unnorm(x) ==
        doctest::Approx(-(1.0 + 2.0) * std::log(2.0) - 3.5 * std::log(2.0)));
  const double c = pot.normalizer();
  CHECK(c > 0.0);
  // degenerate constant coefficients reduce to the product-polynomial constant
  auto degen = Potential::variable_order(
      {Coefficient::constant(1.5), Coefficient::constant(2.0)});
  CHECK(degen.normalizer() == doctest::Approx(0.75).epsilon(2e-3));
}

TEST_CASE("offset tilt shifts V uniformly") {
  auto pot = Potential::product_polynomial({2.0});
  auto tilted = pot.with_offset(1.0);
  std::vector<double> x{3.0};
  CHECK(tilted.log_density(x) == doctest::Approx(pot.log_density(x) - 1.0));
  CHECK(tilted.log_sup_density() == doctest::Approx(pot.log_sup_density() - 1.0));
}
