#pragma once

// Conjugate prior construction and exact posterior updates for exponential
// CRMs. A posterior is again an exponential CRM: a rescaled ordinary
// component plus fixed atoms at every prior fixed location and every
// location seen in the data.

#include <span>
#include <vector>

#include "crm/catalog.hpp"
#include "crm/core.hpp"
#include "crm/exp_family.hpp"

namespace crm {

using PosteriorCrm = ExpCrmPrior;

/// Builds the conjugate exponential CRM for `likelihood`. Catalog families are
/// checked against their A0/A1/A2 region; other families only get the generic
/// checks (positive mass, distinct proper fixed atoms). Throws InvalidModel.
ExpCrmPrior auto_conjugate(const ExpCrmLikelihood& likelihood, double mass, double xi,
                           double lambda, std::vector<FixedAtomParams> fixed_atoms = {});

/// Batch posterior given N observations. Prior fixed atoms keep their order;
/// new fixed atoms follow, sorted by location. Throws InvalidObservation when a
/// count lies outside the likelihood support.
PosteriorCrm posterior_update(const ExpCrmPrior& prior,
                              std::span<const ObservationMeasure> observations);

/// Hyperparameter equality up to fixed-atom order: exact on locations,
/// relative `tol` on reals.
bool same_hyperparameters(const ExpCrmPrior& a, const ExpCrmPrior& b, double tol = 1e-12);

/// Whether one-at-a-time updates reproduce the batch update.
bool iterated_equals_batch(const ExpCrmPrior& prior,
                           std::span<const ObservationMeasure> observations);

/// Normalized density of fixed atom `index` at theta.
double posterior_fixed_atom_density(const PosteriorCrm& posterior, std::size_t index,
                                    double theta);

}  // namespace crm
