#pragma once

// Quadrature oracle for every closed form, and numeric checks of the model
// assumptions:
//   A0  finitely many fixed atoms, each with a proper weight density
//   A1  the ordinary weight rate measure has infinite total mass
//   A2  the expected number of nonzero observation atoms is finite,
//       i.e. int nu(dtheta) (1 - l(0|theta)) < inf
// The oracle touches the likelihood only through pmf evaluations, never
// through B or a catalog closed form.

#include <cstdint>
#include <vector>

#include "crm/exp_family.hpp"
#include "crm/stats.hpp"

namespace crm {

/// B(xi, lambda) by quadrature.
double oracle_log_B(const ExpCrmLikelihood& likelihood, double xi, double lambda);

/// int nu(dtheta) l(0|theta)^{m-1} l(x|theta).
double oracle_rate_M(const ExpCrmPrior& prior, std::uint64_t m, std::uint64_t x);

/// int nu prod_i l(c_i|.) l(x|.) / int nu prod_i l(c_i|.) for an ordinary-born
/// location with counts c_1..c_{n-1}.
double oracle_predictive(const ExpCrmPrior& prior, const std::vector<std::uint64_t>& history,
                         std::uint64_t x);

/// sum_{x >= 1} int nu(dtheta) l(x|theta), summed as int nu (1 - l(0|.)).
double oracle_total_rate(const ExpCrmPrior& prior, std::uint64_t m);

struct AssumptionReport {
  TestReport a0;
  TestReport a1;
  TestReport a2;

  bool all_pass() const { return a0.pass && a1.pass && a2.pass; }
};

AssumptionReport check_assumptions(const ExpCrmPrior& prior);

}  // namespace crm
