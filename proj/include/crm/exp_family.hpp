#pragma once

// Exponential-CRM building blocks. A likelihood is an exponential family pmf
//   l(x | theta) = h(x) exp{ eta(theta) phi(x) - A(theta) },  x = 0, 1, 2, ...
// and its conjugate prior family has kernel exp{ xi eta(theta) - lambda A(theta) }
// with log normalizer B(xi, lambda). Ordinary weight rate measures are
// gamma * kernel; fixed atoms are kernel / exp B.
//
// All families in the catalog have a scalar natural parameter, so xi is a scalar.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crm/core.hpp"
#include "crm/quadrature.hpp"
#include "crm/weight.hpp"

namespace crm {

/// Closed-form member of the conjugate family, used for fast sampling.
struct ConjugateLaw {
  enum class Kind { Gamma, Beta, BetaPrime };
  Kind kind = Kind::Gamma;
  double a = 1.0;  // shape (Gamma) / first shape (Beta, BetaPrime)
  double b = 1.0;  // rate (Gamma) / second shape (Beta, BetaPrime)

  bool operator==(const ConjugateLaw&) const = default;
};

struct ExpCrmLikelihood {
  std::string id;
  WeightDomain domain = WeightDomain::PositiveReal;
  /// Whether theta = 1 belongs to a UnitInterval domain (Bernoulli).
  bool closed_at_one = false;
  /// Largest x with h(x) > 0, if finite.
  std::optional<std::uint64_t> support_bound;

  std::function<double(std::uint64_t)> log_base;            // log h(x)
  std::function<double(std::uint64_t)> suff_stat;           // phi(x)
  std::function<double(const WeightPoint&)> nat_param;      // eta(theta)
  std::function<double(const WeightPoint&)> log_partition;  // A(theta)

  // Optional closed forms. Empty functions fall back to numerics.
  std::function<double(double, double)> analytic_log_partition_b;  // B(xi, lambda)
  std::function<bool(double, double)> proper;  // where exp B < inf; required with analytic B
  std::function<ConjugateLaw(double, double)> conjugate_law;
  /// log l(x|theta), for boundary weights where eta and A are infinite.
  std::function<double(std::uint64_t, const WeightPoint&)> direct_log_pmf;
  std::function<std::uint64_t(double, Rng&)> sampler;
  /// Upper bound on sum_{x > cap} h(x) exp B(xi + phi(x), lambda); +inf when
  /// the family cannot certify it at these parameters.
  std::function<double(double xi, double lambda, std::uint64_t cap)> count_tail_bound;

  bool in_domain(double theta) const;
  bool in_support(std::uint64_t x) const {
    return !support_bound || x <= *support_bound;
  }
  /// Unchecked log pmf (theta assumed in domain).
  double log_pmf(std::uint64_t x, const WeightPoint& p) const;
  /// xi * eta(theta) - lambda * A(theta).
  double log_kernel(double xi, double lambda, const WeightPoint& p) const;
};

/// Throws DomainError when theta is outside the weight domain.
double pmf(const ExpCrmLikelihood& likelihood, std::uint64_t x, double theta);

/// Draw x ~ l(. | theta). Uses the family sampler or inverse-CDF over the pmf.
std::uint64_t sample_count(const ExpCrmLikelihood& likelihood, double theta, Rng& rng);

/// Analytic B when the family provides one, quadrature otherwise. Throws
/// DivergenceError for improper (xi, lambda).
double log_partition_B(const ExpCrmLikelihood& likelihood, double xi, double lambda);

/// B by quadrature of the kernel; always available.
double log_partition_B_numeric(const ExpCrmLikelihood& likelihood, double xi, double lambda);

/// Integrand of exp B(xi, lambda) as a quadrature spec.
IntegrandSpec kernel_integrand(const ExpCrmLikelihood& likelihood, double xi, double lambda);

struct FixedAtomParams {
  Location location;
  double xi = 0.0;
  double lambda = 0.0;

  bool operator==(const FixedAtomParams&) const = default;
};

/// Exponential CRM conjugate to `likelihood`: ordinary weight rate
/// mass * exp{xi eta - lambda A} and fixed atoms with densities
/// exp{xi_k eta - lambda_k A - B(xi_k, lambda_k)}.
struct ExpCrmPrior {
  ExpCrmLikelihood likelihood;
  double mass = 1.0;
  double xi = 0.0;
  double lambda = 0.0;
  std::vector<FixedAtomParams> fixed_atoms;
};

double weight_rate_density(const ExpCrmPrior& prior, double theta);
double log_weight_rate_density(const ExpCrmPrior& prior, const WeightPoint& p);

double fixed_atom_density(const ExpCrmLikelihood& likelihood, double xi, double lambda,
                          double theta);
double log_fixed_atom_density(const ExpCrmLikelihood& likelihood, double xi, double lambda,
                              const WeightPoint& p);

/// Draws from the normalized conjugate-family density with parameters
/// (xi, lambda): closed-form Gamma/Beta/BetaPrime when the family names one,
/// tabulated inverse CDF otherwise.
class WeightSampler {
 public:
  WeightSampler(const ExpCrmLikelihood& likelihood, double xi, double lambda);

  double operator()(Rng& rng) const;
  bool uses_closed_form() const { return law_.has_value(); }

 private:
  WeightDomain domain_;
  bool closed_at_one_;
  std::optional<ConjugateLaw> law_;
  std::shared_ptr<const InverseCdfTable> table_;
};

}  // namespace crm
