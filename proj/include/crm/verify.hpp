#pragma once

// Verification suites run by `crmtool verify`: assumption checks, analytic
// formulas against the quadrature oracle, and the marginal versus
// size-biased-plus-likelihood equivalence.

#include <cstdint>
#include <map>
#include <vector>

#include "crm/catalog.hpp"
#include "crm/marginal.hpp"
#include "crm/size_biased.hpp"
#include "crm/stats.hpp"

namespace crm {

std::vector<TestReport> assumption_suite(const ExpCrmPrior& prior);

/// B, M_{m,x} and predictive pmfs of `prior` against quadrature, at m, x in
/// 1..3 and a few histories.
std::vector<TestReport> oracle_suite(const CatalogEntry& entry, const ExpCrmPrior& prior,
                                     double tol = 1e-8);

/// Per data point n, counts of the joint cell (atoms in X_n, total count of X_n).
using JointCounts = std::vector<std::map<std::int64_t, std::uint64_t>>;

std::int64_t joint_key(std::uint64_t atoms, std::uint64_t total);

/// Replicate r uses stream r of `seed`.
JointCounts marginal_joint_counts(const ExpCrmPrior& prior, std::uint64_t n_points,
                                  std::uint64_t reps, const MarginalConfig& cfg,
                                  std::uint64_t seed);

/// Draws a truncated prior, then n_points likelihood draws at every atom.
/// Replicate r uses stream 2^32 + r of `seed`.
JointCounts size_biased_joint_counts(const ExpCrmPrior& prior, std::uint64_t n_points,
                                     std::uint64_t reps, const SizeBiasedConfig& cfg,
                                     std::uint64_t seed);

struct EquivalenceConfig {
  std::uint64_t n_points = 3;
  std::uint64_t reps = 20000;
  SizeBiasedConfig size_biased{20000, 30, 1e-8};
  MarginalConfig marginal{30, 1e-8};
  std::uint64_t seed = 0;
  double alpha = 0.01;
};

/// One two-sample chi-square report per data point.
std::vector<TestReport> equivalence_suite(const ExpCrmPrior& prior, const EquivalenceConfig& cfg);

}  // namespace crm
