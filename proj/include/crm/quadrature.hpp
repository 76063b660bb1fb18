#pragma once

// Numerical integration of nonnegative functions of a CRM weight over (0,1)
// or (0,inf), with integrable power-law endpoint singularities. This is the
// independent oracle for every closed form in the library.
//
// The integral is taken over y in R with theta = exp(y) on (0,inf) and
// theta = logistic(y) on (0,1). An endpoint behaviour theta^s becomes
// exp((s+1) y) in y, so integrability at an endpoint is exactly "the
// integrand decays exponentially in y there". The y-line is scanned on a
// grid, the significant window is integrated with adaptive Gauss-Kronrod,
// and the two tails beyond the window are added from their exponential
// asymptotics.

#include <functional>
#include <optional>
#include <vector>

#include "crm/weight.hpp"

namespace crm {

struct IntegrandSpec {
  /// log of the (nonnegative) integrand; -inf where it vanishes.
  std::function<double(const WeightPoint&)> log_integrand;
  WeightDomain domain = WeightDomain::PositiveReal;
  /// Declared power-law order s of the integrand near theta = 0 (f ~ theta^s).
  /// When set, it is checked against a log-log slope estimate.
  std::optional<double> lower_order;
};

struct QuadratureResult {
  double log_value = 0.0;
  /// Estimated relative error of exp(log_value).
  double rel_error = 0.0;

  double value() const;
};

/// Throws DivergenceError when an endpoint does not decay (divergence
/// suspected), SingularityMismatch when lower_order disagrees with the
/// measured slope by more than 0.05.
QuadratureResult integrate(const IntegrandSpec& spec, double rel_tol = 1e-11);

/// Log-log slope of the integrand over theta in [1e-12, 1e-9]; NaN if the
/// integrand vanishes there.
double measure_lower_order(const IntegrandSpec& spec);

/// Inverse CDF of the normalized integrand, tabulated once and inverted per
/// draw with a safeguarded Newton iteration on the exact quadrature CDF.
class InverseCdfTable {
 public:
  explicit InverseCdfTable(IntegrandSpec spec);

  /// Weight with CDF value u, u in (0,1).
  WeightPoint quantile(double u) const;
  /// Normalized CDF at theta (used by tests).
  double cdf(double theta) const;
  double log_normalizer() const { return log_max_ + std::log(total_); }

 private:
  double log_g(double y) const;
  double segment_mass(double a, double b) const;
  WeightPoint point(double y) const;
  double y_of(double theta) const;

  IntegrandSpec spec_;
  double log_max_ = 0.0;
  double lower_rate_ = 0.0;  // exponential decay rate of the lower tail in y
  double upper_rate_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> cumulative_;  // mass up to edges_[i], including lower tail
  double total_ = 0.0;
};

}  // namespace crm
