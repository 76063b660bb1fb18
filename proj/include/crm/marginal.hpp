#pragma once

// Sequential marginal process for an exponential CRM with the prior
// integrated out. Data point n revisits every seen location with the
// predictive pmf
//   h(x) exp{ B(xi_k + phi(x), lambda_k + 1) - B(xi_k, lambda_k) }
// where (xi_k, lambda_k) is that location's current posterior state, and adds
// Poisson(M_{n,x}) new locations with count x for each x = 1..X_max.
// Prior fixed atoms are seen from the start with their own (xi_fix, lambda_fix).

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "crm/core.hpp"
#include "crm/exp_family.hpp"
#include "crm/size_biased.hpp"

namespace crm {

struct MarginalConfig {
  std::uint64_t xmax = 30;
  double tail_eps = 1e-8;
};

/// Posterior state of one seen location together with its sparse history.
struct LocationHistory {
  double xi = 0.0;
  double lambda = 0.0;
  /// Data index at which the location first appeared; 0 for prior fixed atoms.
  std::uint64_t born = 0;
  /// (data index, count) for every nonzero count, ascending in index.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> nonzero;
};

class MarginalState {
 public:
  explicit MarginalState(const ExpCrmPrior& prior);

  std::uint64_t n() const { return n_; }
  const std::map<Location, LocationHistory>& locations() const { return locations_; }
  /// Dense history c_1..c_n of a location, zeros included.
  std::vector<std::uint64_t> history(Location loc) const;

 private:
  friend class MarginalStream;
  std::uint64_t n_ = 0;
  std::map<Location, LocationHistory> locations_;
};

/// h(x) exp{B(xi + phi(x), lambda + 1) - B(xi, lambda)}: the predictive pmf at a
/// seen location whose current posterior parameters are (xi, lambda).
double predictive_pmf(const ExpCrmLikelihood& likelihood, double xi, double lambda,
                      std::uint64_t x);

/// Predictive pmf for data point n at an ordinary-born location with counts
/// c_1..c_{n-1}; throws DomainError on an empty history.
double predictive_pmf(const ExpCrmPrior& prior, const std::vector<std::uint64_t>& history,
                      std::uint64_t x);

/// Rate of new locations with count x at data point n; the size-biased M_{n,x}.
double new_atom_rate(const ExpCrmPrior& prior, std::uint64_t n, std::uint64_t x);

/// Unbounded generator of X_1, X_2, ...; one next() is one step of the marginal
/// construction.
class MarginalStream {
 public:
  MarginalStream(ExpCrmPrior prior, MarginalConfig cfg, Rng rng);

  ObservationMeasure next();
  /// Number of new locations created by the last next().
  std::size_t last_new() const { return last_new_; }
  const MarginalState& state() const { return state_; }
  const Rng& rng() const { return rng_; }
  /// Largest certified tail sum_{x > X_max} M_{n,x} seen so far.
  double tail_certificate() const { return certificate_; }

 private:
  std::uint64_t draw_predictive(const LocationHistory& h);

  ExpCrmPrior prior_;
  MarginalConfig cfg_;
  Rng rng_;
  MarginalState state_;
  std::set<Location> used_;
  double certificate_ = 0.0;
  std::size_t last_new_ = 0;
};

std::vector<ObservationMeasure> sample_marginal(const ExpCrmPrior& prior, std::uint64_t n_points,
                                                const MarginalConfig& cfg, Rng& rng);

}  // namespace crm
