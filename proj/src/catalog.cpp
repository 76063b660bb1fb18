#include "crm/catalog.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "crm/errors.hpp"

namespace crm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_factorial(std::uint64_t x) { return std::lgamma(static_cast<double>(x) + 1.0); }

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Shared fixed-atom checks; each family passes its properness predicate.
void check_fixed_atoms(std::span<const FixedAtomParams> fixed,
                       const std::function<bool(double, double)>& proper,
                       const std::string& region, Validation& v) {
  std::set<Location> seen;
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    if (!seen.insert(fixed[k].location).second) {
      v.ok = false;
      v.violations.push_back("A0: fixed atom " + std::to_string(k) + " repeats a location");
    }
    if (!proper(fixed[k].xi, fixed[k].lambda)) {
      v.ok = false;
      v.violations.push_back("A0: fixed atom " + std::to_string(k) + " (xi=" + fmt(fixed[k].xi) +
                             ", lambda=" + fmt(fixed[k].lambda) + ") is improper; needs " + region);
    }
  }
}

void check_mass(double mass, Validation& v) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    v.ok = false;
    v.violations.push_back("rate measure: mass gamma > 0 needed, got " + fmt(mass));
  }
}

void fail(Validation& v, std::string what) {
  v.ok = false;
  v.violations.push_back(std::move(what));
}

}  // namespace

std::string Validation::reason() const {
  std::string out;
  for (const auto& s : violations) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

std::string negative_binomial_id(double r) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, r);
  return "negative_binomial(" + std::string(buf, res.ptr) + ")";
}

std::optional<double> negative_binomial_r(std::string_view id) {
  constexpr std::string_view prefix = "negative_binomial(";
  if (id.substr(0, prefix.size()) != prefix) return std::nullopt;
  if (id.size() <= prefix.size() + 1 || id.back() != ')') {
    throw ParseError("malformed likelihood id '" + std::string(id) + "'");
  }
  const std::string_view body = id.substr(prefix.size(), id.size() - prefix.size() - 1);
  double r = 0.0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), r);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size()) {
    throw ParseError("negative_binomial needs a numeric r, got '" + std::string(body) + "'");
  }
  if (!(r > 0.0) || !std::isfinite(r)) throw ParseError("negative_binomial r must be positive");
  return r;
}

ExpCrmLikelihood poisson_likelihood() {
  ExpCrmLikelihood lik;
  lik.id = "poisson";
  lik.domain = WeightDomain::PositiveReal;
  lik.log_base = [](std::uint64_t x) { return -log_factorial(x); };
  lik.suff_stat = [](std::uint64_t x) { return static_cast<double>(x); };
  lik.nat_param = [](const WeightPoint& p) { return p.log_theta; };
  lik.log_partition = [](const WeightPoint& p) { return p.theta; };
  lik.analytic_log_partition_b = [](double xi, double lambda) {
    return std::lgamma(xi + 1.0) - (xi + 1.0) * std::log(lambda);
  };
  lik.proper = [](double xi, double lambda) { return xi > -1.0 && lambda > 0.0; };
  lik.conjugate_law = [](double xi, double lambda) {
    return ConjugateLaw{ConjugateLaw::Kind::Gamma, xi + 1.0, lambda};
  };
  lik.sampler = [](double theta, Rng& rng) { return rng.poisson(theta); };
  // Term ratio T_{x+1}/T_x = (xi + x + 1) / ((x + 1) lambda) is bounded by q
  // for x > cap, so the tail is at most T_{cap+1} / (1 - q).
  lik.count_tail_bound = [](double xi, double lambda, std::uint64_t cap) {
    const double x1 = static_cast<double>(cap) + 1.0;
    const double q = std::max(1.0, (xi + x1 + 1.0) / (x1 + 1.0)) / lambda;
    if (!(q < 1.0) || !(xi + x1 + 1.0 > 0.0)) return kInf;
    const double log_t = -std::lgamma(x1 + 1.0) + std::lgamma(xi + x1 + 1.0) -
                         (xi + x1 + 1.0) * std::log(lambda);
    return std::exp(log_t) / (1.0 - q);
  };
  return lik;
}

ExpCrmLikelihood bernoulli_likelihood() {
  ExpCrmLikelihood lik;
  lik.id = "bernoulli";
  lik.domain = WeightDomain::UnitInterval;
  lik.closed_at_one = true;
  lik.support_bound = 1;
  lik.log_base = [](std::uint64_t x) { return x <= 1 ? 0.0 : -kInf; };
  lik.suff_stat = [](std::uint64_t x) { return static_cast<double>(x); };
  lik.nat_param = [](const WeightPoint& p) { return p.log_theta - p.log1m_theta; };
  lik.log_partition = [](const WeightPoint& p) { return -p.log1m_theta; };
  lik.direct_log_pmf = [](std::uint64_t x, const WeightPoint& p) {
    if (x == 1) return p.log_theta;
    if (x == 0) return p.log1m_theta;
    return -kInf;
  };
  lik.analytic_log_partition_b = [](double xi, double lambda) {
    return std::lgamma(xi + 1.0) + std::lgamma(lambda - xi + 1.0) - std::lgamma(lambda + 2.0);
  };
  lik.proper = [](double xi, double lambda) { return xi > -1.0 && lambda - xi > -1.0; };
  lik.conjugate_law = [](double xi, double lambda) {
    return ConjugateLaw{ConjugateLaw::Kind::Beta, xi + 1.0, lambda - xi + 1.0};
  };
  lik.sampler = [](double theta, Rng& rng) -> std::uint64_t {
    return rng.uniform_open() < theta ? 1 : 0;
  };
  return lik;
}

ExpCrmLikelihood odds_bernoulli_likelihood() {
  ExpCrmLikelihood lik;
  lik.id = "odds_bernoulli";
  lik.domain = WeightDomain::PositiveReal;
  lik.support_bound = 1;
  lik.log_base = [](std::uint64_t x) { return x <= 1 ? 0.0 : -kInf; };
  lik.suff_stat = [](std::uint64_t x) { return static_cast<double>(x); };
  lik.nat_param = [](const WeightPoint& p) { return p.log_theta; };
  lik.log_partition = [](const WeightPoint& p) { return std::log1p(p.theta); };
  lik.analytic_log_partition_b = [](double xi, double lambda) {
    return std::lgamma(xi + 1.0) + std::lgamma(lambda - xi - 1.0) - std::lgamma(lambda);
  };
  lik.proper = [](double xi, double lambda) { return xi > -1.0 && lambda - xi - 1.0 > 0.0; };
  lik.conjugate_law = [](double xi, double lambda) {
    return ConjugateLaw{ConjugateLaw::Kind::BetaPrime, xi + 1.0, lambda - xi - 1.0};
  };
  lik.sampler = [](double theta, Rng& rng) -> std::uint64_t {
    return rng.uniform_open() * (1.0 + theta) < theta ? 1 : 0;
  };
  return lik;
}

ExpCrmLikelihood negative_binomial_likelihood(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ParseError("negative binomial r must be positive");
  ExpCrmLikelihood lik;
  lik.id = negative_binomial_id(r);
  lik.domain = WeightDomain::UnitInterval;
  const double lg_r = std::lgamma(r);
  lik.log_base = [r, lg_r](std::uint64_t x) {
    return std::lgamma(static_cast<double>(x) + r) - log_factorial(x) - lg_r;
  };
  lik.suff_stat = [](std::uint64_t x) { return static_cast<double>(x); };
  lik.nat_param = [](const WeightPoint& p) { return p.log_theta; };
  lik.log_partition = [r](const WeightPoint& p) { return -r * p.log1m_theta; };
  lik.analytic_log_partition_b = [r](double xi, double lambda) {
    return log_beta_fn(xi + 1.0, r * lambda + 1.0);
  };
  lik.proper = [r](double xi, double lambda) { return xi > -1.0 && r * lambda > -1.0; };
  lik.conjugate_law = [r](double xi, double lambda) {
    return ConjugateLaw{ConjugateLaw::Kind::Beta, xi + 1.0, r * lambda + 1.0};
  };
  // Gamma-Poisson mixture: NB(r, theta) has mean r theta / (1 - theta).
  lik.sampler = [r](double theta, Rng& rng) {
    const double log_rate = rng.log_gamma_variate(r) + std::log(theta) - std::log1p(-theta);
    return rng.poisson(std::exp(log_rate));
  };
  return lik;
}

namespace {

CatalogEntry gamma_poisson_entry() {
  CatalogEntry e;
  e.likelihood_id = "poisson";
  e.prior_id = "gamma_process";
  e.likelihood = poisson_likelihood();
  e.constraints = {"gamma > 0", "xi in (-2,-1]", "lambda > 0",
                   "fixed atoms: xi_fix > -1, lambda_fix > 0"};
  auto proper = e.likelihood.proper;
  e.validate = [proper](double mass, double xi, double lambda,
                        std::span<const FixedAtomParams> fixed) {
    Validation v;
    check_mass(mass, v);
    if (!(xi + 1.0 <= 0.0 || lambda <= 0.0)) {
      fail(v, "A1: infinite ordinary mass needs xi <= -1 (or lambda <= 0), got xi=" + fmt(xi));
    }
    if (!(lambda > 0.0)) fail(v, "A2: lambda > 0 needed, got lambda=" + fmt(lambda));
    if (!(xi + 2.0 > 0.0)) fail(v, "A2: xi > -2 needed, got xi=" + fmt(xi));
    check_fixed_atoms(fixed, proper, "xi_fix > -1, lambda_fix > 0", v);
    return v;
  };
  e.analytic_rate = [](const ExpCrmPrior& p, std::uint64_t m, std::uint64_t x) {
    const double xd = static_cast<double>(x);
    const double log_m = std::log(p.mass) - log_factorial(x) + std::lgamma(p.xi + xd + 1.0) -
                         (p.xi + xd + 1.0) * std::log(p.lambda + static_cast<double>(m));
    return std::exp(log_m);
  };
  // NB(x | xi + S + 1, 1/(lambda + n)) with pmf Gamma(a+x)/(x! Gamma(a)) p^x (1-p)^a.
  e.analytic_predictive = [](const ExpCrmPrior& p, double past_sum, std::uint64_t n,
                             std::uint64_t x) {
    const double a = p.xi + past_sum + 1.0;
    const double nd = static_cast<double>(n);
    const double xd = static_cast<double>(x);
    const double log_p = -std::log(p.lambda + nd);
    const double log_q = std::log(p.lambda + nd - 1.0) - std::log(p.lambda + nd);
    return std::exp(std::lgamma(a + xd) - log_factorial(x) - std::lgamma(a) + xd * log_p +
                    a * log_q);
  };
  return e;
}

CatalogEntry beta_bernoulli_entry() {
  CatalogEntry e;
  e.likelihood_id = "bernoulli";
  e.prior_id = "beta_process";
  e.likelihood = bernoulli_likelihood();
  e.constraints = {"gamma > 0", "xi in (-2,-1]", "lambda > xi - 1",
                   "fixed atoms: xi_fix > -1, lambda_fix > xi_fix - 1",
                   "native: discount in [0,1), concentration > -discount"};
  auto proper = e.likelihood.proper;
  e.validate = [proper](double mass, double xi, double lambda,
                        std::span<const FixedAtomParams> fixed) {
    Validation v;
    check_mass(mass, v);
    // theta^xi (1-theta)^{lambda-xi} has infinite mass iff an exponent is <= -1.
    if (!(xi + 1.0 <= 0.0 || lambda - xi + 1.0 <= 0.0)) {
      fail(v, "A1: infinite ordinary mass needs xi <= -1, got xi=" + fmt(xi));
    }
    if (!(xi + 2.0 > 0.0)) fail(v, "A2: xi > -2 needed, got xi=" + fmt(xi));
    if (!(lambda - xi + 1.0 > 0.0)) {
      fail(v, "A2: lambda > xi - 1 needed, got lambda=" + fmt(lambda));
    }
    check_fixed_atoms(fixed, proper, "xi_fix > -1, lambda_fix > xi_fix - 1", v);
    return v;
  };
  e.analytic_rate = [](const ExpCrmPrior& p, std::uint64_t m, std::uint64_t x) {
    if (x > 1) return 0.0;
    const double w = static_cast<double>(x);
    const double md = static_cast<double>(m);
    return p.mass * std::exp(std::lgamma(p.xi + w + 1.0) +
                             std::lgamma(p.lambda - p.xi + md - w + 1.0) -
                             std::lgamma(p.lambda + md + 2.0));
  };
  e.analytic_predictive = [](const ExpCrmPrior& p, double past_sum, std::uint64_t n,
                             std::uint64_t x) {
    if (x > 1) return 0.0;
    const double q = (p.xi + past_sum + 1.0) / (p.lambda + static_cast<double>(n) + 1.0);
    return x == 1 ? q : 1.0 - q;
  };
  return e;
}

CatalogEntry beta_prime_odds_entry() {
  CatalogEntry e;
  e.likelihood_id = "odds_bernoulli";
  e.prior_id = "beta_prime_process";
  e.likelihood = odds_bernoulli_likelihood();
  e.constraints = {"gamma > 0", "xi in (-2,-1]", "lambda > xi + 1",
                   "fixed atoms: xi_fix > -1, lambda_fix > xi_fix + 1"};
  auto proper = e.likelihood.proper;
  e.validate = [proper](double mass, double xi, double lambda,
                        std::span<const FixedAtomParams> fixed) {
    Validation v;
    check_mass(mass, v);
    if (!(xi + 1.0 <= 0.0 || lambda - xi - 1.0 <= 0.0)) {
      fail(v, "A1: infinite ordinary mass needs xi <= -1, got xi=" + fmt(xi));
    }
    if (!(xi + 2.0 > 0.0)) fail(v, "A2: xi > -2 needed, got xi=" + fmt(xi));
    if (!(lambda - xi - 1.0 > 0.0)) {
      fail(v, "A2: lambda > xi + 1 needed, got lambda=" + fmt(lambda));
    }
    check_fixed_atoms(fixed, proper, "xi_fix > -1, lambda_fix > xi_fix + 1", v);
    return v;
  };
  e.analytic_rate = [](const ExpCrmPrior& p, std::uint64_t m, std::uint64_t x) {
    if (x > 1) return 0.0;
    const double w = static_cast<double>(x);
    const double lm = p.lambda + static_cast<double>(m);
    return p.mass * std::exp(std::lgamma(p.xi + w + 1.0) + std::lgamma(lm - p.xi - w - 1.0) -
                             std::lgamma(lm));
  };
  e.analytic_predictive = [](const ExpCrmPrior& p, double past_sum, std::uint64_t n,
                             std::uint64_t x) {
    if (x > 1) return 0.0;
    const double q = (p.xi + past_sum + 1.0) / (p.lambda + static_cast<double>(n) - 1.0);
    return x == 1 ? q : 1.0 - q;
  };
  return e;
}

CatalogEntry beta_nb_entry(double r) {
  CatalogEntry e;
  e.likelihood = negative_binomial_likelihood(r);
  e.likelihood_id = e.likelihood.id;
  e.prior_id = "beta_process";
  e.constraints = {"gamma > 0", "xi in (-2,-1]", "r * lambda > -1",
                   "fixed atoms: xi_fix > -1, r * lambda_fix > -1",
                   "native: discount in [0,1), concentration > -discount"};
  auto proper = e.likelihood.proper;
  e.validate = [proper, r](double mass, double xi, double lambda,
                           std::span<const FixedAtomParams> fixed) {
    Validation v;
    check_mass(mass, v);
    if (!(xi + 1.0 <= 0.0 || r * lambda + 1.0 <= 0.0)) {
      fail(v, "A1: infinite ordinary mass needs xi <= -1, got xi=" + fmt(xi));
    }
    if (!(xi + 2.0 > 0.0)) fail(v, "A2: xi > -2 needed, got xi=" + fmt(xi));
    if (!(r * lambda + 1.0 > 0.0)) {
      fail(v, "A2: r * lambda > -1 needed, got lambda=" + fmt(lambda));
    }
    check_fixed_atoms(fixed, proper, "xi_fix > -1, r * lambda_fix > -1", v);
    return v;
  };
  e.analytic_rate = [r](const ExpCrmPrior& p, std::uint64_t m, std::uint64_t x) {
    const double xd = static_cast<double>(x);
    const double log_h = std::lgamma(xd + r) - log_factorial(x) - std::lgamma(r);
    return p.mass * std::exp(log_h + log_beta_fn(p.xi + xd + 1.0,
                                                 r * (p.lambda + static_cast<double>(m)) + 1.0));
  };
  // Beta-negative-binomial: h(x) Beta(a + x, b + r) / Beta(a, b).
  e.analytic_predictive = [r](const ExpCrmPrior& p, double past_sum, std::uint64_t n,
                              std::uint64_t x) {
    const double xd = static_cast<double>(x);
    const double a = p.xi + past_sum + 1.0;
    const double b = r * (p.lambda + static_cast<double>(n) - 1.0) + 1.0;
    const double log_h = std::lgamma(xd + r) - log_factorial(x) - std::lgamma(r);
    return std::exp(log_h + log_beta_fn(a + xd, b + r) - log_beta_fn(a, b));
  };
  return e;
}

}  // namespace

CatalogEntry catalog_entry(std::string_view likelihood_id) {
  if (likelihood_id == "poisson") return gamma_poisson_entry();
  if (likelihood_id == "bernoulli") return beta_bernoulli_entry();
  if (likelihood_id == "odds_bernoulli") return beta_prime_odds_entry();
  if (const auto r = negative_binomial_r(likelihood_id)) return beta_nb_entry(*r);
  throw ParseError("unknown likelihood id '" + std::string(likelihood_id) + "'");
}

CatalogEntry catalog_entry(std::string_view prior_id, std::string_view likelihood_id) {
  CatalogEntry e = catalog_entry(likelihood_id);
  if (e.prior_id != prior_id) {
    throw ParseError("prior '" + std::string(prior_id) + "' is not the conjugate prior of '" +
                     std::string(likelihood_id) + "' (expected '" + e.prior_id + "')");
  }
  return e;
}

std::vector<CatalogEntry> catalog_entries(double nb_r) {
  return {gamma_poisson_entry(), beta_bernoulli_entry(), beta_prime_odds_entry(),
          beta_nb_entry(nb_r)};
}

Validation hyperparam_valid(const CatalogEntry& entry, double mass, double xi, double lambda,
                            std::span<const FixedAtomParams> fixed) {
  return entry.validate(mass, xi, lambda, fixed);
}

Validation beta_process_params_valid(const BetaProcessParams& p) {
  Validation v;
  check_mass(p.mass, v);
  if (!(p.discount >= 0.0 && p.discount < 1.0)) {
    fail(v, "discount in [0,1) needed, got " + fmt(p.discount));
  }
  if (!(p.concentration > -p.discount)) {
    fail(v, "concentration > -discount needed, got " + fmt(p.concentration));
  }
  return v;
}

ExpCrmHyper map_bp_params(const BetaProcessParams& p) {
  if (const auto v = beta_process_params_valid(p); !v.ok) throw InvalidModel(v.reason());
  return {p.mass, -p.discount - 1.0, p.concentration - 2.0};
}

BetaProcessParams unmap_bp_params(const ExpCrmHyper& h) {
  return {h.mass, -h.xi - 1.0, h.lambda + 2.0};
}

ExpCrmHyper map_bp_params_nb(const BetaProcessParams& p, double r) {
  if (const auto v = beta_process_params_valid(p); !v.ok) throw InvalidModel(v.reason());
  return {p.mass, -p.discount - 1.0, (p.concentration + p.discount - 1.0) / r};
}

BetaProcessParams unmap_bp_params_nb(const ExpCrmHyper& h, double r) {
  const double discount = -h.xi - 1.0;
  return {h.mass, discount, r * h.lambda - discount + 1.0};
}

FixedAtomParams beta_fixed_atom(Location loc, double rho, double sigma) {
  if (!(rho > 0.0 && sigma > 0.0)) throw InvalidModel("Beta(rho, sigma) needs rho, sigma > 0");
  return {loc, rho - 1.0, sigma + rho - 2.0};
}

FixedAtomParams beta_fixed_atom_nb(Location loc, double rho, double sigma, double r) {
  if (!(rho > 0.0 && sigma > 0.0)) throw InvalidModel("Beta(rho, sigma) needs rho, sigma > 0");
  return {loc, rho - 1.0, (sigma - 1.0) / r};
}

std::pair<double, double> beta_fixed_atom_shapes(const FixedAtomParams& a) {
  return {a.xi + 1.0, a.lambda - a.xi + 1.0};
}

std::pair<double, double> beta_fixed_atom_shapes_nb(const FixedAtomParams& a, double r) {
  return {a.xi + 1.0, r * a.lambda + 1.0};
}

}  // namespace crm
