#include "crm/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crm/errors.hpp"

namespace crm {

namespace {

// Kolmogorov distribution upper tail Q_KS(lambda).
double kolmogorov_sf(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double chi_square_sf(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

std::vector<double> poisson_pmf_table(double mean, std::uint64_t kmax) {
  std::vector<double> out(kmax + 1);
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    const double kd = static_cast<double>(k);
    out[k] = mean == 0.0 ? (k == 0 ? 1.0 : 0.0)
                         : std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
  }
  return out;
}

TestReport compare_values(std::string id, double analytic, double oracle, double tol) {
  TestReport r;
  r.id = std::move(id);
  r.statistic = analytic;
  const double scale = std::max(std::abs(analytic), std::abs(oracle));
  const double err = analytic == oracle ? 0.0 : std::abs(analytic - oracle) / scale;
  r.rel_error = err;
  r.threshold = tol;
  r.pass = err <= tol;
  std::ostringstream d;
  d.precision(17);
  d << "analytic=" << analytic << " oracle=" << oracle;
  r.detail = d.str();
  return r;
}

TestReport chi_square_gof(const std::vector<std::uint64_t>& observed,
                          const std::vector<double>& expected, double alpha) {
  if (expected.size() < 2) throw StatisticError("chi-square needs at least two categories");
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(),
                                                           std::uint64_t{0}));
  if (total <= 0.0) throw StatisticError("chi-square needs a nonempty sample");

  const std::size_t k = expected.size();
  std::vector<double> obs(k, 0.0);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs[std::min(i, k - 1)] += static_cast<double>(observed[i]);
  }
  std::vector<double> exp(expected.begin(), expected.end());
  const double head = std::accumulate(exp.begin(), exp.end() - 1, 0.0);
  exp.back() = std::max(0.0, 1.0 - head);
  for (double& e : exp) e *= total;

  // Merge from the right so the sparse tail pools into one bin.
  std::vector<double> mo, me;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = k; i-- > 0;) {
    acc_o += obs[i];
    acc_e += exp[i];
    if (acc_e >= 5.0) {
      mo.push_back(acc_o);
      me.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (me.empty()) throw StatisticError("chi-square: fewer than two bins with expected count >= 5");
    mo.back() += acc_o;
    me.back() += acc_e;
  }
  if (me.size() < 2) throw StatisticError("chi-square: fewer than two bins with expected count >= 5");

  double stat = 0.0;
  for (std::size_t i = 0; i < me.size(); ++i) {
    const double d = mo[i] - me[i];
    stat += d * d / me[i];
  }
  TestReport r;
  r.id = "chi_square_gof";
  r.statistic = stat;
  r.dof = static_cast<double>(me.size() - 1);
  r.p_value = chi_square_sf(stat, r.dof);
  r.threshold = alpha;
  r.pass = *r.p_value > alpha;
  r.replicates = static_cast<std::uint64_t>(total);
  r.detail = "bins=" + std::to_string(me.size());
  return r;
}

TestReport chi_square_two_sample(const std::map<std::int64_t, std::uint64_t>& a,
                                 const std::map<std::int64_t, std::uint64_t>& b, double alpha) {
  std::map<std::int64_t, std::pair<double, double>> joint;
  for (const auto& [key, c] : a) joint[key].first += static_cast<double>(c);
  for (const auto& [key, c] : b) joint[key].second += static_cast<double>(c);
  double na = 0.0, nb = 0.0;
  for (const auto& [key, c] : joint) {
    na += c.first;
    nb += c.second;
  }
  if (na <= 0.0 || nb <= 0.0) throw StatisticError("two-sample chi-square needs two nonempty samples");
  const double n = na + nb;

  // Pool consecutive keys until the smaller expected cell reaches 5.
  const double min_share = std::min(na, nb) / n;
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& [key, c] : joint) {
    acc.first += c.first;
    acc.second += c.second;
    if ((acc.first + acc.second) * min_share >= 5.0) {
      bins.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (bins.empty()) throw StatisticError("two-sample chi-square: too few observations");
    bins.back().first += acc.first;
    bins.back().second += acc.second;
  }
  if (bins.size() < 2) {
    TestReport r;
    r.id = "chi_square_two_sample";
    r.p_value = 1.0;
    r.threshold = alpha;
    r.pass = true;
    r.replicates = static_cast<std::uint64_t>(std::min(na, nb));
    r.detail = "bins=1 (samples indistinguishable at this resolution)";
    return r;
  }

  double stat = 0.0;
  for (const auto& [oa, ob] : bins) {
    const double tot = oa + ob;
    const double ea = tot * na / n;
    const double eb = tot * nb / n;
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  TestReport r;
  r.id = "chi_square_two_sample";
  r.statistic = stat;
  r.p_value = chi_square_sf(stat, static_cast<double>(bins.size() - 1));
  r.threshold = alpha;
  r.pass = *r.p_value > alpha;
  r.replicates = static_cast<std::uint64_t>(std::min(na, nb));
  r.detail = "bins=" + std::to_string(bins.size());
  return r;
}

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.size() < 100 || b.size() < 100) throw StatisticError("KS test needs samples of size >= 100");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  TestReport r;
  r.id = "ks_two_sample";
  r.statistic = d;
  r.p_value = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
  r.threshold = alpha;
  r.pass = *r.p_value > alpha;
  r.replicates = static_cast<std::uint64_t>(std::min(na, nb));
  return r;
}

}  // namespace crm
