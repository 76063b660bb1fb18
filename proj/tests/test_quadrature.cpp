#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "crm/errors.hpp"
#include "crm/quadrature.hpp"

using namespace crm;

namespace {

// theta^(a-1) (1-theta)^(b-1) on (0,1).
IntegrandSpec beta_kernel(double a, double b) {
  IntegrandSpec s;
  s.domain = WeightDomain::UnitInterval;
  s.log_integrand = [a, b](const WeightPoint& p) {
    return (a - 1.0) * p.log_theta + (b - 1.0) * p.log1m_theta;
  };
  return s;
}

// theta^(a-1) e^(-b theta) on (0,inf).
IntegrandSpec gamma_kernel(double a, double b) {
  IntegrandSpec s;
  s.domain = WeightDomain::PositiveReal;
  s.log_integrand = [a, b](const WeightPoint& p) { return (a - 1.0) * p.log_theta - b * p.theta; };
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("integrate examples") {
  CHECK(rel(integrate(beta_kernel(0.5, 0.5)).value(), std::numbers::pi) < 1e-10);

  IntegrandSpec exp2;
  exp2.domain = WeightDomain::PositiveReal;
  exp2.log_integrand = [](const WeightPoint& p) { return -2.0 * p.theta; };
  CHECK(rel(integrate(exp2).value(), 0.5) < 1e-10);

  IntegrandSpec steep;
  steep.domain = WeightDomain::UnitInterval;
  steep.log_integrand = [](const WeightPoint& p) { return -1.5 * p.log_theta; };
  CHECK_THROWS_AS(integrate(steep), DivergenceError);
}

TEST_CASE("log-divergent endpoints are flagged") {
  CHECK_THROWS_AS(integrate(beta_kernel(0.0, 2.0)), DivergenceError);
  CHECK_THROWS_AS(integrate(beta_kernel(2.0, 0.0)), DivergenceError);
  CHECK_THROWS_AS(integrate(gamma_kernel(0.0, 1.0)), DivergenceError);
  CHECK_THROWS_AS(integrate(gamma_kernel(2.0, 0.0)), DivergenceError);
}

TEST_CASE("validation corpus: 30 Beta and Gamma integrals") {
  const double beta_cases[][2] = {{0.5, 0.5}, {1, 1},     {2, 3},     {0.05, 1},   {1, 0.05},
                                  {0.01, 2},  {0.3, 7.5}, {12, 0.4},  {50, 60},    {0.9, 0.1},
                                  {3.5, 3.5}, {0.2, 200}, {150, 0.7}, {1e-3, 1.0}, {5, 1e-2}};
  for (const auto& c : beta_cases) {
    CAPTURE(c[0]);
    CAPTURE(c[1]);
    const double truth = boost::math::beta(c[0], c[1]);
    CHECK(rel(integrate(beta_kernel(c[0], c[1])).value(), truth) < 1e-8);
  }
  const double gamma_cases[][2] = {{0.5, 1},   {1, 1},    {2, 3},     {0.05, 1}, {0.01, 0.5},
                                   {7.5, 0.2}, {30, 4},   {0.3, 50},  {100, 10}, {1e-3, 2},
                                   {0.9, 1e-2}, {2.5, 1e3}, {400, 1}, {0.7, 7}, {12, 0.01}};
  for (const auto& c : gamma_cases) {
    CAPTURE(c[0]);
    CAPTURE(c[1]);
    const double log_truth = std::lgamma(c[0]) - c[0] * std::log(c[1]);
    CHECK(std::abs(integrate(gamma_kernel(c[0], c[1])).log_value - log_truth) < 1e-8);
  }
}

TEST_CASE("declared lower order is checked against the evaluator") {
  // Ten integrands whose declared order near zero is wrong.
  const double actual[] = {-1.5, -1.2, -0.5, 0.0, 0.5, 1.0, 2.0, -1.9, -0.99, 3.0};
  for (double s : actual) {
    CAPTURE(s);
    IntegrandSpec spec = gamma_kernel(s + 1.0, 1.0);
    spec.lower_order = s + 0.3;
    CHECK_THROWS_AS(integrate(spec), SingularityMismatch);
    spec.lower_order = s;
    if (s > -1.0) CHECK_NOTHROW(integrate(spec));
  }
  CHECK(measure_lower_order(gamma_kernel(-0.4, 1.0)) == doctest::Approx(-1.4).epsilon(1e-6));
}

TEST_CASE("inverse CDF table matches the regularized incomplete beta") {
  const double a = 0.3, b = 4.0;
  const InverseCdfTable table(beta_kernel(a, b));
  CHECK(table.log_normalizer() == doctest::Approx(std::log(boost::math::beta(a, b))).epsilon(1e-10));
  for (double u : {1e-9, 1e-4, 0.01, 0.25, 0.5, 0.75, 0.99, 1 - 1e-9}) {
    CAPTURE(u);
    const double q = table.quantile(u).theta;
    CHECK(boost::math::ibeta(a, b, q) == doctest::Approx(u).epsilon(1e-8));
    CHECK(table.cdf(q) == doctest::Approx(u).epsilon(1e-8));
  }
  CHECK_THROWS_AS(table.quantile(0.0), DomainError);
}

TEST_CASE("inverse CDF table on (0,inf)") {
  const InverseCdfTable table(gamma_kernel(0.05, 3.0));
  for (double u : {1e-6, 0.1, 0.5, 0.9, 0.999999}) {
    CAPTURE(u);
    const double q = table.quantile(u).theta;
    CHECK(boost::math::gamma_p(0.05, 3.0 * q) == doctest::Approx(u).epsilon(1e-8));
  }
}

TEST_CASE("integrands that blow up at the far end are declared divergent") {
  // exp(+theta) reaches ~1e300 on the scan grid before overflowing.
  CHECK_THROWS_AS(integrate(gamma_kernel(0.5, -1.0)), DivergenceError);
  CHECK_THROWS_AS(integrate(gamma_kernel(-1.5, -0.5)), DivergenceError);
}
