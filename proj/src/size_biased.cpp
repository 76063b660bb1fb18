#include "crm/size_biased.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "crm/errors.hpp"
#include "crm/quadrature.hpp"

namespace crm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t effective_cap(const ExpCrmLikelihood& lik, std::uint64_t xmax) {
  return lik.support_bound ? std::min(xmax, *lik.support_bound) : xmax;
}

// nu(theta) l(0|theta)^{m-1} (1 - l(0|theta)); holds `prior` by reference.
IntegrandSpec round_rate_integrand(const ExpCrmPrior& prior, std::uint64_t m) {
  IntegrandSpec spec;
  spec.domain = prior.likelihood.domain;
  const double rounds_before = static_cast<double>(m) - 1.0;
  spec.log_integrand = [&prior, rounds_before](const WeightPoint& p) {
    const double log_l0 = prior.likelihood.log_pmf(0, p);
    if (log_l0 >= 0.0) return -kInf;
    const double stay = rounds_before == 0.0 ? 0.0 : rounds_before * log_l0;
    return log_weight_rate_density(prior, p) + stay + std::log(-std::expm1(log_l0));
  };
  return spec;
}

}  // namespace

void SizeBiasedConfig::validate() const {
  if (rounds < 1) throw InvalidModel("size-biased truncation needs at least one round");
  if (xmax < 1) throw InvalidModel("size-biased truncation needs a count cap of at least 1");
  if (!(tail_eps > 0.0)) throw InvalidModel("tail bound must be positive");
}

std::pair<double, double> weight_dist_params(const ExpCrmPrior& prior, std::uint64_t m,
                                             std::uint64_t x) {
  const auto& lik = prior.likelihood;
  const double rounds_before = static_cast<double>(m) - 1.0;
  return {prior.xi + rounds_before * lik.suff_stat(0) + lik.suff_stat(x),
          prior.lambda + static_cast<double>(m)};
}

double log_rate_M(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t x) {
  if (m < 1) throw DomainError("size-biased rounds start at m = 1");
  const auto& lik = prior.likelihood;
  if (!lik.in_support(x)) return -kInf;
  const double log_hx = lik.log_base(x);
  if (log_hx == -kInf) return -kInf;
  double log_h0_part = 0.0;
  if (m > 1) {
    const double log_h0 = lik.log_base(0);
    if (log_h0 == -kInf) return -kInf;
    log_h0_part = (static_cast<double>(m) - 1.0) * log_h0;
  }
  const auto [xi, lambda] = weight_dist_params(prior, m, x);
  double log_b = 0.0;
  try {
    log_b = log_partition_B(lik, xi, lambda);
  } catch (const DivergenceError&) {
    return kInf;
  }
  return std::log(prior.mass) + log_h0_part + log_hx + log_b;
}

double rate_M(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t x) {
  return std::exp(log_rate_M(prior, m, x));
}

double total_round_rate(const ExpCrmPrior& prior, std::uint64_t m) {
  return integrate(round_rate_integrand(prior, m)).value();
}

double tail_mass(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t xmax) {
  const auto& lik = prior.likelihood;
  if (lik.support_bound && *lik.support_bound <= xmax) return 0.0;
  if (lik.count_tail_bound) {
    const double log_h0 = m > 1 ? lik.log_base(0) : 0.0;
    const double rounds_before = static_cast<double>(m) - 1.0;
    const double bound = lik.count_tail_bound(prior.xi + rounds_before * lik.suff_stat(0),
                                              prior.lambda + static_cast<double>(m), xmax);
    if (std::isfinite(bound)) {
      return prior.mass * std::exp(rounds_before * log_h0) * bound;
    }
  }
  const QuadratureResult total = integrate(round_rate_integrand(prior, m));
  double partial = 0.0;
  for (std::uint64_t x = 1; x <= xmax; ++x) partial += rate_M(prior, m, x);
  const double t = total.value();
  return std::max(0.0, t - partial) + t * std::max(total.rel_error, 1e-13);
}

SizeBiasedSampler::SizeBiasedSampler(ExpCrmPrior prior, SizeBiasedConfig cfg)
    : prior_(std::move(prior)) {
  cfg.validate();
  truncation_.kind = Truncation::Kind::SizeBiased;
  truncation_.rounds = cfg.rounds;
  truncation_.count_cap = cfg.xmax;
  truncation_.tail_bound = cfg.tail_eps;

  const auto& lik = prior_.likelihood;
  const std::uint64_t cap = effective_cap(lik, cfg.xmax);
  for (std::uint64_t m = 1; m <= cfg.rounds; ++m) {
    const double tail = tail_mass(prior_, m, cfg.xmax);
    if (!(tail <= cfg.tail_eps)) {
      std::ostringstream msg;
      msg << "round " << m << " tail mass above count cap " << cfg.xmax << " is " << tail
          << ", above the bound " << cfg.tail_eps;
      throw TailBoundError(msg.str());
    }
    truncation_.tail_certificate = std::max(truncation_.tail_certificate, tail);
    for (std::uint64_t x = 1; x <= cap; ++x) {
      const double rate = rate_M(prior_, m, x);
      if (!(rate > 0.0)) continue;
      if (!std::isfinite(rate)) throw InvalidModel("infinite size-biased rate at x >= 1");
      const auto [xi, lambda] = weight_dist_params(prior_, m, x);
      total_ += rate;
      cells_.push_back({m, x, rate, xi, lambda});
      cumulative_.push_back(total_);
    }
  }
}

TraitMeasure SizeBiasedSampler::operator()(Rng& rng, std::vector<std::size_t>* cell_of_atom) const {
  TraitMeasure out;
  out.truncation = truncation_;
  std::set<Location> used;
  for (const auto& f : prior_.fixed_atoms) used.insert(f.location);
  for (const auto& f : prior_.fixed_atoms) {
    const WeightSampler draw(prior_.likelihood, f.xi, f.lambda);
    out.fixed_atoms.emplace_back(draw(rng), f.location);
  }

  const std::uint64_t count = rng.poisson(total_);
  std::vector<std::size_t> picks;
  picks.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double u = rng.uniform_open() * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    picks.push_back(static_cast<std::size_t>(it - cumulative_.begin()));
  }
  std::sort(picks.begin(), picks.end());
  if (cell_of_atom) *cell_of_atom = picks;

  out.ordinary_atoms.reserve(picks.size());
  for (std::size_t i = 0; i < picks.size();) {
    const Cell& cell = cells_[picks[i]];
    const WeightSampler draw(prior_.likelihood, cell.xi, cell.lambda);
    for (; i < picks.size() && &cells_[picks[i]] == &cell; ++i) {
      const double w = draw(rng);
      out.ordinary_atoms.emplace_back(w, fresh_location(rng, used));
    }
  }
  return out;
}

TraitMeasure sample_size_biased(const ExpCrmPrior& prior, const SizeBiasedConfig& cfg, Rng& rng) {
  return SizeBiasedSampler(prior, cfg)(rng);
}

}  // namespace crm
