#include "crm/exp_family.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "crm/errors.hpp"

namespace crm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_domain(const ExpCrmLikelihood& lik, double theta) {
  if (!lik.in_domain(theta)) {
    std::ostringstream msg;
    msg << "weight " << theta << " outside the " << lik.id << " weight domain "
        << to_string(lik.domain);
    throw DomainError(msg.str());
  }
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

bool ExpCrmLikelihood::in_domain(double theta) const {
  if (!(theta > 0.0) || !std::isfinite(theta)) return false;
  if (domain == WeightDomain::UnitInterval) return theta < 1.0 || (closed_at_one && theta == 1.0);
  return true;
}

double ExpCrmLikelihood::log_pmf(std::uint64_t x, const WeightPoint& p) const {
  if (!in_support(x)) return -kInf;
  if (direct_log_pmf) return direct_log_pmf(x, p);
  const double lh = log_base(x);
  if (lh == -kInf) return -kInf;
  const double phi = suff_stat(x);
  const double eta_phi = phi == 0.0 ? 0.0 : nat_param(p) * phi;
  return lh + eta_phi - log_partition(p);
}

double ExpCrmLikelihood::log_kernel(double xi, double lambda, const WeightPoint& p) const {
  const double a = xi == 0.0 ? 0.0 : xi * nat_param(p);
  const double b = lambda == 0.0 ? 0.0 : lambda * log_partition(p);
  return a - b;
}

double pmf(const ExpCrmLikelihood& likelihood, std::uint64_t x, double theta) {
  require_domain(likelihood, theta);
  return std::exp(likelihood.log_pmf(x, WeightPoint::at(theta)));
}

std::uint64_t sample_count(const ExpCrmLikelihood& likelihood, double theta, Rng& rng) {
  require_domain(likelihood, theta);
  if (likelihood.sampler) return likelihood.sampler(theta, rng);
  const WeightPoint p = WeightPoint::at(theta);
  const double u = rng.uniform_open();
  double cum = 0.0;
  for (std::uint64_t x = 0; x < 100'000'000; ++x) {
    if (!likelihood.in_support(x)) return x - 1;
    cum += std::exp(likelihood.log_pmf(x, p));
    if (cum >= u) return x;
  }
  throw DomainError("inverse-CDF count sampling did not terminate for " + likelihood.id);
}

IntegrandSpec kernel_integrand(const ExpCrmLikelihood& likelihood, double xi, double lambda) {
  IntegrandSpec spec;
  spec.domain = likelihood.domain;
  spec.log_integrand = [lik = likelihood, xi, lambda](const WeightPoint& p) {
    return lik.log_kernel(xi, lambda, p);
  };
  return spec;
}

double log_partition_B_numeric(const ExpCrmLikelihood& likelihood, double xi, double lambda) {
  try {
    return integrate(kernel_integrand(likelihood, xi, lambda)).log_value;
  } catch (const DivergenceError& e) {
    std::ostringstream msg;
    msg << likelihood.id << " conjugate kernel is improper at (xi=" << xi << ", lambda=" << lambda
        << "): " << e.what();
    throw DivergenceError(msg.str());
  }
}

double log_partition_B(const ExpCrmLikelihood& likelihood, double xi, double lambda) {
  if (!likelihood.analytic_log_partition_b) return log_partition_B_numeric(likelihood, xi, lambda);
  if (!likelihood.proper(xi, lambda)) {
    std::ostringstream msg;
    msg << likelihood.id << " conjugate kernel is improper at (xi=" << xi << ", lambda=" << lambda
        << ")";
    throw DivergenceError(msg.str());
  }
  return likelihood.analytic_log_partition_b(xi, lambda);
}

double log_weight_rate_density(const ExpCrmPrior& prior, const WeightPoint& p) {
  return std::log(prior.mass) + prior.likelihood.log_kernel(prior.xi, prior.lambda, p);
}

double weight_rate_density(const ExpCrmPrior& prior, double theta) {
  if (theta != 0.0) require_domain(prior.likelihood, theta);
  return std::exp(log_weight_rate_density(prior, WeightPoint::at(theta)));
}

double log_fixed_atom_density(const ExpCrmLikelihood& likelihood, double xi, double lambda,
                              const WeightPoint& p) {
  return likelihood.log_kernel(xi, lambda, p) - log_partition_B(likelihood, xi, lambda);
}

double fixed_atom_density(const ExpCrmLikelihood& likelihood, double xi, double lambda,
                          double theta) {
  if (theta != 0.0) require_domain(likelihood, theta);
  return std::exp(log_fixed_atom_density(likelihood, xi, lambda, WeightPoint::at(theta)));
}

WeightSampler::WeightSampler(const ExpCrmLikelihood& likelihood, double xi, double lambda)
    : domain_(likelihood.domain), closed_at_one_(likelihood.closed_at_one) {
  if (likelihood.conjugate_law) {
    if (likelihood.proper && !likelihood.proper(xi, lambda)) {
      throw DivergenceError("cannot sample an improper weight law for " + likelihood.id);
    }
    law_ = likelihood.conjugate_law(xi, lambda);
  } else {
    table_ = std::make_shared<const InverseCdfTable>(kernel_integrand(likelihood, xi, lambda));
  }
}

double WeightSampler::operator()(Rng& rng) const {
  const double below_one = std::nextafter(1.0, 0.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double theta = 0.0;
    if (!law_) {
      theta = table_->quantile(rng.uniform_open()).theta;
    } else {
      switch (law_->kind) {
        case ConjugateLaw::Kind::Gamma:
          theta = std::exp(rng.log_gamma_variate(law_->a)) / law_->b;
          break;
        case ConjugateLaw::Kind::Beta: {
          const double ga = rng.log_gamma_variate(law_->a);
          const double gb = rng.log_gamma_variate(law_->b);
          theta = std::exp(ga - log_add_exp(ga, gb));
          break;
        }
        case ConjugateLaw::Kind::BetaPrime:
          theta = std::exp(rng.log_gamma_variate(law_->a) - rng.log_gamma_variate(law_->b));
          break;
      }
    }
    if (domain_ == WeightDomain::UnitInterval && theta >= 1.0) {
      theta = closed_at_one_ ? 1.0 : below_one;
    }
    if (theta > 0.0 && std::isfinite(theta)) return theta;
  }
  throw RngFault("weight draw underflowed repeatedly");
}

}  // namespace crm
