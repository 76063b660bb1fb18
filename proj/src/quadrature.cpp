#include "crm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crm/errors.hpp"

namespace crm {

std::string to_string(WeightDomain domain) {
  return domain == WeightDomain::UnitInterval ? "(0,1)" : "(0,inf)";
}

namespace {

constexpr double kGridLimit = 700.0;
constexpr double kGridStep = 0.5;
// Window keeps everything within exp(-60) of the peak.
constexpr double kCutoff = 60.0;
// An endpoint whose log-integrand slope in y is below this does not decay.
constexpr double kMinDecay = 1e-7;
constexpr double kInf = std::numeric_limits<double>::infinity();

using GaussKronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

WeightPoint map_point(WeightDomain domain, double y) {
  return domain == WeightDomain::PositiveReal ? WeightPoint::from_log(y)
                                              : WeightPoint::from_logit(y);
}

double log_jacobian(const WeightPoint& p, WeightDomain domain) {
  return domain == WeightDomain::PositiveReal ? p.log_theta : p.log_theta + p.log1m_theta;
}

double mapped_log(const IntegrandSpec& spec, double y) {
  const WeightPoint p = map_point(spec.domain, y);
  const double lf = spec.log_integrand(p);
  if (std::isnan(lf)) {
    std::ostringstream msg;
    msg << "integrand evaluated to NaN at theta=" << p.theta;
    throw DomainError(msg.str());
  }
  if (lf == kInf) throw DivergenceError("integrand is infinite at an interior point");
  return lf + log_jacobian(p, spec.domain);
}

/// Significant part of the y-line, with exponential tails outside it.
struct Window {
  bool empty = false;
  double log_max = -kInf;
  double lower = 0.0;
  double upper = 0.0;
  double width = 1.0;  // integration segment width
  double lower_tail = 0.0;  // relative to exp(log_max)
  double upper_tail = 0.0;
  double lower_rate = 0.0;  // decay rate of the lower tail (> 0)
  double upper_rate = 0.0;  // decay rate of the upper tail (> 0)
};

void check_declared_order(const IntegrandSpec& spec) {
  if (!spec.lower_order) return;
  const double measured = measure_lower_order(spec);
  if (std::isnan(measured)) return;
  if (std::abs(measured - *spec.lower_order) > 0.05) {
    std::ostringstream msg;
    msg << "declared lower-endpoint order " << *spec.lower_order
        << " disagrees with measured slope " << measured;
    throw SingularityMismatch(msg.str());
  }
}

Window scan(const IntegrandSpec& spec) {
  check_declared_order(spec);
  const auto n = static_cast<std::size_t>(2.0 * kGridLimit / kGridStep) + 1;
  std::vector<double> ys(n), vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = -kGridLimit + kGridStep * static_cast<double>(i);
    vals[i] = mapped_log(spec, ys[i]);
  }
  const auto peak_it = std::max_element(vals.begin(), vals.end());
  Window w;
  if (*peak_it == -kInf) {
    w.empty = true;
    return w;
  }
  const auto ipeak = static_cast<std::size_t>(peak_it - vals.begin());
  const double grid_max = *peak_it;

  std::size_t ia = 0;
  while (ia < ipeak && vals[ia] <= grid_max - kCutoff) ++ia;
  std::size_t ib = n - 1;
  while (ib > ipeak && vals[ib] <= grid_max - kCutoff) --ib;

  // Refine the peak so the integrand stays O(1) and narrow peaks set the
  // segment width.
  double lo = ys[ipeak] - kGridStep, hi = ys[ipeak] + kGridStep;
  lo = std::max(lo, -kGridLimit);
  hi = std::min(hi, kGridLimit);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double gc = mapped_log(spec, c), gd = mapped_log(spec, d);
  for (int it = 0; it < 80 && hi - lo > 1e-9; ++it) {
    if (gc >= gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - phi * (hi - lo);
      gc = mapped_log(spec, c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + phi * (hi - lo);
      gd = mapped_log(spec, d);
    }
  }
  const double ypk = 0.5 * (lo + hi);
  const double gpk = mapped_log(spec, ypk);
  w.log_max = std::max({grid_max, gpk});
  {
    const double h = 1e-3;
    const double curv =
        -(mapped_log(spec, ypk + h) - 2.0 * gpk + mapped_log(spec, ypk - h)) / (h * h);
    const double sigma = curv > 0.0 && std::isfinite(curv) ? 1.0 / std::sqrt(curv) : 1.0;
    w.width = std::clamp(sigma, 1e-3, 1.0);
  }

  const double M = w.log_max;
  if (ia == 0) {
    const double rate = (vals[2] - vals[0]) / (2.0 * kGridStep);
    if (!(rate > kMinDecay)) {
      throw DivergenceError("integrand does not decay at theta -> 0 (divergence suspected)");
    }
    w.lower = ys[0];
    w.lower_rate = rate;
    w.lower_tail = std::exp(vals[0] - M) / rate;
  } else {
    w.lower = ys[ia - 1];
    const double rate = (vals[ia] - vals[ia - 1]) / kGridStep;
    w.lower_rate = rate > kMinDecay && std::isfinite(rate) ? rate : 1.0;
    w.lower_tail = vals[ia - 1] == -kInf ? 0.0 : std::exp(vals[ia - 1] - M) / w.lower_rate;
  }
  if (ib == n - 1) {
    const double rate = (vals[n - 3] - vals[n - 1]) / (2.0 * kGridStep);
    if (!(rate > kMinDecay)) {
      const char* end = spec.domain == WeightDomain::PositiveReal ? "theta -> inf" : "theta -> 1";
      throw DivergenceError(std::string("integrand does not decay at ") + end +
                            " (divergence suspected)");
    }
    w.upper = ys[n - 1];
    w.upper_rate = rate;
    w.upper_tail = std::exp(vals[n - 1] - M) / rate;
  } else {
    w.upper = ys[ib + 1];
    const double rate = (vals[ib] - vals[ib + 1]) / kGridStep;
    w.upper_rate = rate > kMinDecay && std::isfinite(rate) ? rate : 1.0;
    w.upper_tail = vals[ib + 1] == -kInf ? 0.0 : std::exp(vals[ib + 1] - M) / w.upper_rate;
  }
  return w;
}

}  // namespace

double QuadratureResult::value() const { return std::exp(log_value); }

double measure_lower_order(const IntegrandSpec& spec) {
  const double a = spec.log_integrand(WeightPoint::at(1e-12));
  const double b = spec.log_integrand(WeightPoint::at(1e-9));
  if (!std::isfinite(a) || !std::isfinite(b)) return std::numeric_limits<double>::quiet_NaN();
  return (b - a) / std::log(1e3);
}

QuadratureResult integrate(const IntegrandSpec& spec, double rel_tol) {
  const Window w = scan(spec);
  if (w.empty) return {-kInf, 0.0};
  const double M = w.log_max;
  auto f = [&](double y) {
    const double v = mapped_log(spec, y) - M;
    return v == -kInf ? 0.0 : std::exp(v);
  };
  const double span = w.upper - w.lower;
  const auto pieces = static_cast<std::size_t>(std::clamp(std::ceil(span / w.width), 1.0, 20000.0));
  const double step = span / static_cast<double>(pieces);
  double sum = 0.0, err = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) {
    const double a = w.lower + step * static_cast<double>(i);
    const double b = i + 1 == pieces ? w.upper : a + step;
    double e = 0.0;
    // Tighter per-piece targets only add round-off to the error estimate.
    sum += GaussKronrod::integrate(f, a, b, 15, std::max(rel_tol * 0.1, 1e-10), &e);
    err += e;
  }
  const double total = sum + w.lower_tail + w.upper_tail;
  if (!(total > 0.0)) return {-kInf, 0.0};
  QuadratureResult r;
  r.log_value = M + std::log(total);
  r.rel_error = err / total;
  if (r.rel_error > rel_tol * 100.0) {
    std::ostringstream msg;
    msg << "quadrature did not converge (relative error " << r.rel_error << ")";
    throw DivergenceError(msg.str());
  }
  return r;
}

InverseCdfTable::InverseCdfTable(IntegrandSpec spec) : spec_(std::move(spec)) {
  const Window w = scan(spec_);
  if (w.empty) throw DomainError("cannot sample from an identically zero density");
  log_max_ = w.log_max;
  lower_rate_ = w.lower_rate;
  upper_rate_ = w.upper_rate;
  const double span = w.upper - w.lower;
  const double width = std::min(w.width, 0.25);
  const auto pieces = static_cast<std::size_t>(std::clamp(std::ceil(span / width), 1.0, 40000.0));
  const double step = span / static_cast<double>(pieces);
  edges_.resize(pieces + 1);
  cumulative_.resize(pieces + 1);
  edges_[0] = w.lower;
  cumulative_[0] = w.lower_tail;
  for (std::size_t i = 0; i < pieces; ++i) {
    edges_[i + 1] = i + 1 == pieces ? w.upper : w.lower + step * static_cast<double>(i + 1);
    auto f = [&](double y) {
      const double v = log_g(y);
      return v == -kInf ? 0.0 : std::exp(v);
    };
    cumulative_[i + 1] = cumulative_[i] + GaussKronrod::integrate(f, edges_[i], edges_[i + 1], 10, 1e-14);
  }
  total_ = cumulative_.back() + w.upper_tail;
}

double InverseCdfTable::log_g(double y) const { return mapped_log(spec_, y) - log_max_; }

WeightPoint InverseCdfTable::point(double y) const { return map_point(spec_.domain, y); }

double InverseCdfTable::segment_mass(double a, double b) const {
  auto f = [&](double y) {
    const double v = log_g(y);
    return v == -kInf ? 0.0 : std::exp(v);
  };
  return GaussKronrod::integrate(f, a, b, 0, 0.0);
}

double InverseCdfTable::y_of(double theta) const {
  const WeightPoint p = WeightPoint::at(theta);
  return spec_.domain == WeightDomain::PositiveReal ? p.log_theta : p.log_theta - p.log1m_theta;
}

double InverseCdfTable::cdf(double theta) const {
  const double y = y_of(theta);
  const double lower_tail = cumulative_.front();
  if (y <= edges_.front()) {
    return lower_tail * std::exp(lower_rate_ * (y - edges_.front())) / total_;
  }
  if (y >= edges_.back()) {
    const double upper_tail = total_ - cumulative_.back();
    return (total_ - upper_tail * std::exp(-upper_rate_ * (y - edges_.back()))) / total_;
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), y);
  const auto i = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return (cumulative_[i] + segment_mass(edges_[i], y)) / total_;
}

WeightPoint InverseCdfTable::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  const double t = u * total_;
  const double lower_tail = cumulative_.front();
  if (t < lower_tail) {
    return point(edges_.front() + std::log(t / lower_tail) / lower_rate_);
  }
  if (t >= cumulative_.back()) {
    const double upper_tail = total_ - cumulative_.back();
    const double beyond = total_ - t;
    if (upper_tail <= 0.0) return point(edges_.back());
    return point(edges_.back() - std::log(std::max(beyond, 1e-300) / upper_tail) / upper_rate_);
  }
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), t);
  const auto i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double target = t - cumulative_[i];
  double lo = edges_[i], hi = edges_[i + 1];
  double y = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double resid = segment_mass(edges_[i], y) - target;
    if (resid > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double dens = std::exp(log_g(y));
    double next = dens > 0.0 ? y - resid / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-12 * (1.0 + std::abs(y)) || hi - lo <= 1e-12 * (1.0 + std::abs(y))) {
      y = next;
      break;
    }
    y = next;
  }
  return point(y);
}

}  // namespace crm
