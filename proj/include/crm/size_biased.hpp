#pragma once

// Size-biased representation of an exponential CRM. Atoms are grouped by the
// first round m at which a hypothetical likelihood draw is nonzero and by the
// count x observed there. The number of atoms in cell (m, x) is
// Poisson(M_{m,x}) with
//   M_{m,x} = gamma h(0)^{m-1} h(x) exp B(xi + (m-1) phi(0) + phi(x), lambda + m)
// and their weights are iid from the conjugate law with those parameters.

#include <cstdint>
#include <utility>
#include <vector>

#include "crm/core.hpp"
#include "crm/exp_family.hpp"

namespace crm {

struct SizeBiasedConfig {
  std::uint64_t rounds = 50;   // M_max
  std::uint64_t xmax = 30;     // X_max
  double tail_eps = 1e-8;      // bound on sum_{x > X_max} M_{m,x} for every m

  /// Throws InvalidModel unless rounds >= 1, xmax >= 1 and tail_eps > 0.
  void validate() const;
};

/// log M_{m,x}; -inf when h(x) = 0 and +inf when the weight law is improper
/// (only possible at x = 0).
double log_rate_M(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t x);
double rate_M(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t x);

/// (xi + (m-1) phi(0) + phi(x), lambda + m).
std::pair<double, double> weight_dist_params(const ExpCrmPrior& prior, std::uint64_t m,
                                             std::uint64_t x);

/// sum_{x >= 1} M_{m,x} = int nu(dtheta) l(0|theta)^{m-1} (1 - l(0|theta)), by quadrature.
double total_round_rate(const ExpCrmPrior& prior, std::uint64_t m);

/// Certified upper bound on sum_{x > xmax} M_{m,x}: exactly 0 beyond a bounded
/// support, the family's analytic bound when it has one, otherwise the
/// quadrature total minus the partial sum plus the quadrature error.
double tail_mass(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t xmax);

/// Precomputed cell rates for repeated draws from one model.
///
/// Draws are made by superposition: the total atom count is Poisson(sum of
/// cell rates) and each atom picks its cell with probability proportional to
/// the cell rate. This has the same law as independent Poisson(M_{m,x}) counts
/// per cell but costs O(atoms) instead of O(M_max X_max) per draw. Atoms are
/// emitted with m ascending, then x ascending.
class SizeBiasedSampler {
 public:
  struct Cell {
    std::uint64_t m = 0;
    std::uint64_t x = 0;
    double rate = 0.0;
    double xi = 0.0;
    double lambda = 0.0;
  };

  /// Throws TailBoundError when some round's tail exceeds cfg.tail_eps.
  SizeBiasedSampler(ExpCrmPrior prior, SizeBiasedConfig cfg);

  /// When `cell_of_atom` is given it receives, per ordinary atom, the index
  /// into cells() of the (m, x) cell that produced it.
  TraitMeasure operator()(Rng& rng, std::vector<std::size_t>* cell_of_atom = nullptr) const;

  const std::vector<Cell>& cells() const { return cells_; }
  /// Sum of all retained cell rates.
  double expected_atoms() const { return total_; }
  const Truncation& truncation() const { return truncation_; }
  const ExpCrmPrior& prior() const { return prior_; }

 private:
  ExpCrmPrior prior_;
  std::vector<Cell> cells_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
  Truncation truncation_;
};

TraitMeasure sample_size_biased(const ExpCrmPrior& prior, const SizeBiasedConfig& cfg, Rng& rng);

}  // namespace crm
