#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "axistable/quadrature.hpp"

using namespace axistable;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  // order-n rule is exact through degree 2n-1
  auto cubic = [](double x) { return 3.0 * x * x * x - x * x + 2.0; };
  // antiderivative 3x^4/4 - x^3/3 + 2x over [-1, 2]
  CHECK(integrate_gl(cubic, -1.0, 2.0, 4) == doctest::Approx(14.25));
  auto flat = [](double) { return 1.0; };
  CHECK(integrate_gl(flat, 0.0, 5.0, 2) == doctest::Approx(5.0));
}

TEST_CASE("geometric panels handle power integrands") {
  // \int_a^b t^{-1.5} dt
  auto f = [](double t) { return std::pow(t, -1.5); };
  const double a = 1e-6, b = 1e4;
  const double exact = 2.0 * (1.0 / std::sqrt(a) - 1.0 / std::sqrt(b));
  CHECK(integrate_geometric(f, a, b, 8, 16) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("half-line integrator reproduces heavy-tail masses") {
  // \int_0^inf (1+t)^{-(1+eps)} dt = 1/eps
  for (double eps : {0.5, 1.0, 2.0}) {
    auto f = [eps](double t) { return std::pow(1.0 + t, -(1.0 + eps)); };
    CHECK(integrate_halfline(f, eps) == doctest::Approx(1.0 / eps).epsilon(1e-10));
  }
  // integrable singularity at 0: \int_0^inf t^{-1/2} e^{-t} dt = sqrt(pi);
  // panels start at 1e-14, so the truncated head costs ~2e-7
  auto g = [](double t) { return std::exp(-t) / std::sqrt(t); };
  CHECK(integrate_halfline(g, 1.0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-6));
}

TEST_CASE("monotone table generalized inverse") {
  MonotoneTable t;
  t.x = {1.0, 2.0, 4.0, 8.0};
  t.y = {0.5, 0.5, 1.5, 3.0};
  CHECK(t.generalized_inverse(0.4) == 0.0);     // already satisfied at entry
  CHECK(t.generalized_inverse(0.5) == 0.0);
  CHECK(t.generalized_inverse(1.0) == 4.0);     // first x with y >= 1
  CHECK(t.generalized_inverse(3.0) == 8.0);
  CHECK(std::isinf(t.generalized_inverse(3.5)));
  CHECK(t.value_at_floor(5.0) == 1.5);
  CHECK(t.value_at_floor(0.5) == 0.5);  // clamps below the first knot
}
