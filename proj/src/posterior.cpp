#include "crm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "crm/errors.hpp"

namespace crm {

namespace {

bool close(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

bool in_catalog(const std::string& id) {
  try {
    catalog_entry(id);
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace

ExpCrmPrior auto_conjugate(const ExpCrmLikelihood& likelihood, double mass, double xi,
                           double lambda, std::vector<FixedAtomParams> fixed_atoms) {
  if (in_catalog(likelihood.id)) {
    const Validation v = catalog_entry(likelihood.id).validate(mass, xi, lambda, fixed_atoms);
    if (!v.ok) throw InvalidModel(v.reason());
  } else {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidModel("mass gamma must be positive");
    std::set<Location> seen;
    for (const auto& f : fixed_atoms) {
      if (!seen.insert(f.location).second) throw InvalidModel("A0: repeated fixed-atom location");
      try {
        log_partition_B(likelihood, f.xi, f.lambda);
      } catch (const DivergenceError& e) {
        throw InvalidModel(std::string("A0: improper fixed atom: ") + e.what());
      }
    }
  }
  return ExpCrmPrior{likelihood, mass, xi, lambda, std::move(fixed_atoms)};
}

PosteriorCrm posterior_update(const ExpCrmPrior& prior,
                              std::span<const ObservationMeasure> observations) {
  const auto& lik = prior.likelihood;
  for (const auto& obs : observations) {
    for (const auto& a : obs.atoms()) {
      if (!lik.in_support(a.count) || lik.log_base(a.count) == -std::numeric_limits<double>::infinity()) {
        throw InvalidObservation("count " + std::to_string(a.count) + " at location " +
                                 std::to_string(a.location.value) + " has zero probability under " +
                                 lik.id);
      }
    }
  }
  if (observations.empty()) return prior;

  const double n_obs = static_cast<double>(observations.size());
  PosteriorCrm post = prior;

  std::set<Location> prior_locations;
  for (auto& f : post.fixed_atoms) {
    prior_locations.insert(f.location);
    double stat = 0.0;
    for (const auto& obs : observations) stat += lik.suff_stat(count_at(obs, f.location));
    f.xi += stat;
    f.lambda += n_obs;
  }

  for (const Location& loc : merge_locations(observations)) {
    if (prior_locations.count(loc)) continue;
    double stat = 0.0;
    for (const auto& obs : observations) stat += lik.suff_stat(count_at(obs, loc));
    post.fixed_atoms.push_back({loc, prior.xi + stat, prior.lambda + n_obs});
  }

  post.mass = prior.mass * std::exp(n_obs * lik.log_base(0));
  post.xi = prior.xi + n_obs * lik.suff_stat(0);
  post.lambda = prior.lambda + n_obs;
  return post;
}

bool same_hyperparameters(const ExpCrmPrior& a, const ExpCrmPrior& b, double tol) {
  if (a.likelihood.id != b.likelihood.id) return false;
  if (!close(a.mass, b.mass, tol) || !close(a.xi, b.xi, tol) || !close(a.lambda, b.lambda, tol)) {
    return false;
  }
  if (a.fixed_atoms.size() != b.fixed_atoms.size()) return false;
  std::map<Location, const FixedAtomParams*> by_location;
  for (const auto& f : a.fixed_atoms) by_location[f.location] = &f;
  for (const auto& f : b.fixed_atoms) {
    auto it = by_location.find(f.location);
    if (it == by_location.end()) return false;
    if (!close(it->second->xi, f.xi, tol) || !close(it->second->lambda, f.lambda, tol)) {
      return false;
    }
  }
  return true;
}

bool iterated_equals_batch(const ExpCrmPrior& prior,
                           std::span<const ObservationMeasure> observations) {
  PosteriorCrm step = prior;
  for (const auto& obs : observations) {
    step = posterior_update(step, std::span<const ObservationMeasure>(&obs, 1));
  }
  return same_hyperparameters(step, posterior_update(prior, observations));
}

double posterior_fixed_atom_density(const PosteriorCrm& posterior, std::size_t index,
                                    double theta) {
  if (index >= posterior.fixed_atoms.size()) {
    throw DomainError("fixed atom index " + std::to_string(index) + " out of range");
  }
  const auto& f = posterior.fixed_atoms[index];
  return fixed_atom_density(posterior.likelihood, f.xi, f.lambda, theta);
}

}  // namespace crm
