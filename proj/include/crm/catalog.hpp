#pragma once

// The four worked prior/likelihood pairs:
//   poisson               <-> gamma_process       nu = gamma theta^xi e^{-lambda theta}
//   bernoulli             <-> beta_process        nu = gamma theta^xi (1-theta)^{lambda-xi}
//   odds_bernoulli        <-> beta_prime_process  nu = gamma theta^xi (1+theta)^{-lambda}
//   negative_binomial(r)  <-> beta_process        nu = gamma theta^xi (1-theta)^{r lambda}

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crm/exp_family.hpp"

namespace crm {

ExpCrmLikelihood poisson_likelihood();
ExpCrmLikelihood bernoulli_likelihood();
ExpCrmLikelihood odds_bernoulli_likelihood();
/// pmf Gamma(x+r)/(x! Gamma(r)) theta^x (1-theta)^r, r > 0 fixed.
ExpCrmLikelihood negative_binomial_likelihood(double r);

/// "negative_binomial(r)" with r in shortest round-trip form.
std::string negative_binomial_id(double r);
/// r of a "negative_binomial(r)" id; nullopt for other ids. Throws ParseError
/// on a malformed or nonpositive r.
std::optional<double> negative_binomial_r(std::string_view likelihood_id);

/// Outcome of a hyperparameter check. Each violation names the assumption
/// (A0, A1, A2) or the measure condition it breaks.
struct Validation {
  bool ok = true;
  std::vector<std::string> violations;

  std::string reason() const;
};

struct CatalogEntry {
  std::string likelihood_id;
  std::string prior_id;
  ExpCrmLikelihood likelihood;
  /// Human-readable region, e.g. "xi in (-2,-1]".
  std::vector<std::string> constraints;
  std::function<Validation(double mass, double xi, double lambda,
                           std::span<const FixedAtomParams> fixed)>
      validate;
  /// Closed-form M_{m,x}, written out per family (independent of the B path).
  std::function<double(const ExpCrmPrior&, std::uint64_t m, std::uint64_t x)> analytic_rate;
  /// Closed-form predictive pmf at a seen location, given sum of past counts
  /// and the index n of the point being drawn.
  std::function<double(const ExpCrmPrior&, double past_sum, std::uint64_t n, std::uint64_t x)>
      analytic_predictive;
};

/// "poisson", "bernoulli", "odds_bernoulli", "negative_binomial(r)".
/// Throws ParseError on unknown ids or r <= 0.
CatalogEntry catalog_entry(std::string_view likelihood_id);

/// Entry pairing a prior id with a likelihood id; throws ParseError when the
/// prior is not the conjugate of that likelihood.
CatalogEntry catalog_entry(std::string_view prior_id, std::string_view likelihood_id);

/// All entries, with negative_binomial instantiated at `nb_r` for listing.
std::vector<CatalogEntry> catalog_entries(double nb_r = 1.0);

Validation hyperparam_valid(const CatalogEntry& entry, double mass, double xi, double lambda,
                            std::span<const FixedAtomParams> fixed = {});

// Beta-process native parameterization (mass gamma, discount alpha,
// concentration theta) with fixed-atom Beta(rho, sigma) weights.

struct BetaProcessParams {
  double mass = 1.0;
  double discount = 0.0;
  double concentration = 1.0;

  bool operator==(const BetaProcessParams&) const = default;
};

struct ExpCrmHyper {
  double mass = 1.0;
  double xi = 0.0;
  double lambda = 0.0;

  bool operator==(const ExpCrmHyper&) const = default;
};

/// Native ranges: mass > 0, discount in [0,1), concentration > -discount.
Validation beta_process_params_valid(const BetaProcessParams& p);

/// Bernoulli pairing: xi = -discount - 1, lambda = concentration - 2, which
/// makes gamma theta^xi (1-theta)^{lambda-xi} equal the native kernel
/// gamma theta^{-alpha-1} (1-theta)^{theta+alpha-1}. Throws InvalidModel when
/// the native ranges fail.
ExpCrmHyper map_bp_params(const BetaProcessParams& p);
BetaProcessParams unmap_bp_params(const ExpCrmHyper& h);

/// Negative-binomial pairing: xi = -discount - 1, lambda = (concentration + discount - 1) / r.
ExpCrmHyper map_bp_params_nb(const BetaProcessParams& p, double r);
BetaProcessParams unmap_bp_params_nb(const ExpCrmHyper& h, double r);

/// Fixed-atom Beta(rho, sigma) <-> (xi_fix, lambda_fix).
FixedAtomParams beta_fixed_atom(Location loc, double rho, double sigma);
FixedAtomParams beta_fixed_atom_nb(Location loc, double rho, double sigma, double r);
std::pair<double, double> beta_fixed_atom_shapes(const FixedAtomParams& a);
std::pair<double, double> beta_fixed_atom_shapes_nb(const FixedAtomParams& a, double r);

}  // namespace crm
