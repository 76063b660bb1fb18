#include "crm/marginal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "crm/errors.hpp"

namespace crm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t effective_cap(const ExpCrmLikelihood& lik, std::uint64_t xmax) {
  return lik.support_bound ? std::min(xmax, *lik.support_bound) : xmax;
}

}  // namespace

MarginalState::MarginalState(const ExpCrmPrior& prior) {
  for (const auto& f : prior.fixed_atoms) {
    locations_[f.location] = LocationHistory{f.xi, f.lambda, 0, {}};
  }
}

std::vector<std::uint64_t> MarginalState::history(Location loc) const {
  const auto it = locations_.find(loc);
  if (it == locations_.end()) return std::vector<std::uint64_t>(n_, 0);
  std::vector<std::uint64_t> dense(n_, 0);
  for (const auto& [index, count] : it->second.nonzero) dense[index - 1] = count;
  return dense;
}

double predictive_pmf(const ExpCrmLikelihood& likelihood, double xi, double lambda,
                      std::uint64_t x) {
  if (!likelihood.in_support(x)) return 0.0;
  const double log_h = likelihood.log_base(x);
  if (log_h == -kInf) return 0.0;
  const double log_p = log_h +
                       log_partition_B(likelihood, xi + likelihood.suff_stat(x), lambda + 1.0) -
                       log_partition_B(likelihood, xi, lambda);
  return std::exp(log_p);
}

double predictive_pmf(const ExpCrmPrior& prior, const std::vector<std::uint64_t>& history,
                      std::uint64_t x) {
  if (history.empty()) {
    throw DomainError("predictive pmf needs a nonempty history; new locations follow M_{n,x}");
  }
  double stat = 0.0;
  for (std::uint64_t c : history) stat += prior.likelihood.suff_stat(c);
  return predictive_pmf(prior.likelihood, prior.xi + stat,
                        prior.lambda + static_cast<double>(history.size()), x);
}

double new_atom_rate(const ExpCrmPrior& prior, std::uint64_t n, std::uint64_t x) {
  return rate_M(prior, n, x);
}

MarginalStream::MarginalStream(ExpCrmPrior prior, MarginalConfig cfg, Rng rng)
    : prior_(std::move(prior)), cfg_(cfg), rng_(rng), state_(prior_) {
  if (cfg_.xmax < 1) throw InvalidModel("marginal count cap must be at least 1");
  if (!(cfg_.tail_eps > 0.0)) throw InvalidModel("tail bound must be positive");
  for (const auto& f : prior_.fixed_atoms) used_.insert(f.location);
}

// Inverse CDF over x = 0, 1, ...; exact up to the point where the remaining
// mass underflows.
std::uint64_t MarginalStream::draw_predictive(const LocationHistory& h) {
  const auto& lik = prior_.likelihood;
  const double log_b = log_partition_B(lik, h.xi, h.lambda);
  const double u = rng_.uniform_open();
  double cum = 0.0;
  double peak = 0.0;
  for (std::uint64_t x = 0;; ++x) {
    if (!lik.in_support(x)) return x - 1;
    const double log_h = lik.log_base(x);
    double p = 0.0;
    if (log_h != -kInf) {
      p = std::exp(log_h + log_partition_B(lik, h.xi + lik.suff_stat(x), h.lambda + 1.0) - log_b);
    }
    cum += p;
    if (cum >= u) return x;
    peak = std::max(peak, p);
    // Past the mode with nothing left to add: rounding kept cum just below u.
    if (x > 0 && p < 1e-300 * peak + 1e-320 && cum > 0.5) return x;
    if (x > 100'000'000) throw RngFault("predictive inverse CDF did not terminate");
  }
}

ObservationMeasure MarginalStream::next() {
  const auto& lik = prior_.likelihood;
  const std::uint64_t n = state_.n_ + 1;

  const double tail = tail_mass(prior_, n, cfg_.xmax);
  if (!(tail <= cfg_.tail_eps)) {
    std::ostringstream msg;
    msg << "data point " << n << ": new-atom tail mass above count cap " << cfg_.xmax << " is "
        << tail << ", above the bound " << cfg_.tail_eps;
    throw TailBoundError(msg.str());
  }
  certificate_ = std::max(certificate_, tail);

  std::vector<CountAtom> atoms;
  for (auto& [loc, h] : state_.locations_) {
    const std::uint64_t x = draw_predictive(h);
    h.xi += lik.suff_stat(x);
    h.lambda += 1.0;
    if (x > 0) {
      h.nonzero.emplace_back(n, x);
      atoms.push_back({x, loc});
    }
  }

  last_new_ = 0;
  const std::uint64_t cap = effective_cap(lik, cfg_.xmax);
  for (std::uint64_t x = 1; x <= cap; ++x) {
    const double rate = new_atom_rate(prior_, n, x);
    if (!(rate > 0.0)) continue;
    const std::uint64_t k = rng_.poisson(rate);
    if (k == 0) continue;
    const auto [xi, lambda] = weight_dist_params(prior_, n, x);
    for (std::uint64_t j = 0; j < k; ++j) {
      const Location loc = fresh_location(rng_, used_);
      state_.locations_[loc] = LocationHistory{xi, lambda, n, {{n, x}}};
      atoms.push_back({x, loc});
      ++last_new_;
    }
  }

  state_.n_ = n;
  return ObservationMeasure(std::move(atoms));
}

std::vector<ObservationMeasure> sample_marginal(const ExpCrmPrior& prior, std::uint64_t n_points,
                                                const MarginalConfig& cfg, Rng& rng) {
  MarginalStream stream(prior, cfg, rng);
  std::vector<ObservationMeasure> out;
  out.reserve(n_points);
  for (std::uint64_t i = 0; i < n_points; ++i) out.push_back(stream.next());
  rng = stream.rng();
  return out;
}

}  // namespace crm
