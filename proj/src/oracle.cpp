#include "crm/oracle.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "crm/errors.hpp"
#include "crm/quadrature.hpp"

namespace crm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_history_likelihood(const ExpCrmLikelihood& lik,
                              const std::vector<std::uint64_t>& history, const WeightPoint& p) {
  double s = 0.0;
  for (std::uint64_t c : history) s += lik.log_pmf(c, p);
  return s;
}

}  // namespace

double oracle_log_B(const ExpCrmLikelihood& likelihood, double xi, double lambda) {
  return log_partition_B_numeric(likelihood, xi, lambda);
}

double oracle_rate_M(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t x) {
  if (!prior.likelihood.in_support(x)) return 0.0;
  IntegrandSpec spec;
  spec.domain = prior.likelihood.domain;
  const double before = static_cast<double>(m) - 1.0;
  spec.log_integrand = [&prior, before, x](const WeightPoint& p) {
    const auto& lik = prior.likelihood;
    const double stay = before == 0.0 ? 0.0 : before * lik.log_pmf(0, p);
    return log_weight_rate_density(prior, p) + stay + lik.log_pmf(x, p);
  };
  return integrate(spec).value();
}

double oracle_predictive(const ExpCrmPrior& prior, const std::vector<std::uint64_t>& history,
                         std::uint64_t x) {
  if (history.empty()) throw DomainError("predictive oracle needs a nonempty history");
  if (!prior.likelihood.in_support(x)) return 0.0;
  IntegrandSpec den;
  den.domain = prior.likelihood.domain;
  den.log_integrand = [&prior, &history](const WeightPoint& p) {
    return log_weight_rate_density(prior, p) +
           log_history_likelihood(prior.likelihood, history, p);
  };
  IntegrandSpec num = den;
  num.log_integrand = [&prior, &history, x](const WeightPoint& p) {
    return log_weight_rate_density(prior, p) +
           log_history_likelihood(prior.likelihood, history, p) + prior.likelihood.log_pmf(x, p);
  };
  return std::exp(integrate(num).log_value - integrate(den).log_value);
}

double oracle_total_rate(const ExpCrmPrior& prior, std::uint64_t m) {
  IntegrandSpec spec;
  spec.domain = prior.likelihood.domain;
  const double before = static_cast<double>(m) - 1.0;
  spec.log_integrand = [&prior, before](const WeightPoint& p) {
    const double log_l0 = prior.likelihood.log_pmf(0, p);
    if (log_l0 >= 0.0) return -kInf;
    const double stay = before == 0.0 ? 0.0 : before * log_l0;
    return log_weight_rate_density(prior, p) + stay + std::log(-std::expm1(log_l0));
  };
  return integrate(spec).value();
}

AssumptionReport check_assumptions(const ExpCrmPrior& prior) {
  AssumptionReport out;
  const auto& lik = prior.likelihood;

  out.a0.id = "A0";
  out.a0.statistic = static_cast<double>(prior.fixed_atoms.size());
  out.a0.pass = true;
  {
    std::set<Location> seen;
    std::ostringstream why;
    for (std::size_t k = 0; k < prior.fixed_atoms.size(); ++k) {
      const auto& f = prior.fixed_atoms[k];
      if (!seen.insert(f.location).second) {
        out.a0.pass = false;
        why << "fixed atom " << k << " repeats a location; ";
      }
      try {
        oracle_log_B(lik, f.xi, f.lambda);
      } catch (const DivergenceError& e) {
        out.a0.pass = false;
        why << "fixed atom " << k << " has an improper density (" << e.what() << "); ";
      }
    }
    out.a0.detail = out.a0.pass ? std::to_string(prior.fixed_atoms.size()) + " fixed atoms, all proper"
                                : why.str();
  }

  out.a1.id = "A1";
  IntegrandSpec nu;
  nu.domain = lik.domain;
  nu.log_integrand = [&prior](const WeightPoint& p) { return log_weight_rate_density(prior, p); };
  if (!(prior.mass > 0.0) || !std::isfinite(prior.mass)) {
    out.a1.pass = false;
    out.a1.detail = "mass must be positive and finite";
  } else {
    try {
      const double total = integrate(nu).value();
      out.a1.pass = false;
      out.a1.statistic = total;
      std::ostringstream d;
      d << "ordinary weight rate has finite total mass " << total;
      out.a1.detail = d.str();
    } catch (const DivergenceError& e) {
      out.a1.pass = true;
      out.a1.statistic = kInf;
      out.a1.detail = std::string("infinite total mass: ") + e.what();
    }
  }

  out.a2.id = "A2";
  if (!(prior.mass > 0.0) || !std::isfinite(prior.mass)) {
    out.a2.pass = false;
    out.a2.detail = "mass must be positive and finite";
  } else {
    try {
      const double rate = oracle_total_rate(prior, 1);
      out.a2.pass = std::isfinite(rate);
      out.a2.statistic = rate;
      std::ostringstream d;
      d << "expected nonzero observation atoms per data point " << rate;
      out.a2.detail = d.str();
    } catch (const DivergenceError& e) {
      out.a2.pass = false;
      out.a2.statistic = kInf;
      out.a2.detail = std::string("expected number of observed atoms is infinite: ") + e.what();
    }
  }
  return out;
}

}  // namespace crm
