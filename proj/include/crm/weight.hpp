#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace crm {

/// Support of a CRM atom weight.
enum class WeightDomain {
  UnitInterval,  // (0,1), optionally closed at 1
  PositiveReal,  // (0,inf)
};

std::string to_string(WeightDomain domain);

/// A weight value carried together with log(theta) and log(1 - theta), so
/// kernels like theta^a (1-theta)^b stay accurate at both ends of (0,1).
struct WeightPoint {
  double theta = 0.0;
  double log_theta = -std::numeric_limits<double>::infinity();
  /// log(1 - theta); NaN when theta > 1.
  double log1m_theta = 0.0;

  static WeightPoint at(double theta) {
    WeightPoint p;
    p.theta = theta;
    p.log_theta = std::log(theta);
    p.log1m_theta = theta <= 1.0 ? std::log1p(-theta) : std::numeric_limits<double>::quiet_NaN();
    return p;
  }

  /// theta = exp(y).
  static WeightPoint from_log(double y) {
    WeightPoint p;
    p.theta = std::exp(y);
    p.log_theta = y;
    p.log1m_theta = y < 0.0 ? std::log(-std::expm1(y)) : std::numeric_limits<double>::quiet_NaN();
    return p;
  }

  /// theta = 1 / (1 + exp(-y)).
  static WeightPoint from_logit(double y) {
    WeightPoint p;
    p.log_theta = -softplus(-y);
    p.log1m_theta = -softplus(y);
    p.theta = std::exp(p.log_theta);
    return p;
  }

  /// log(1 + exp(z)) without overflow.
  static double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
};

}  // namespace crm
