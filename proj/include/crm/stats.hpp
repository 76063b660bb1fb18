#pragma once

// Goodness-of-fit and two-sample tests used to check the samplers, with
// structured reports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crm {

struct TestReport {
  std::string id;
  double statistic = 0.0;
  /// Set for statistical tests.
  std::optional<double> p_value;
  /// Set for oracle comparisons.
  std::optional<double> rel_error;
  /// p_value > threshold, or rel_error <= threshold.
  double threshold = 0.0;
  /// Degrees of freedom of chi-square tests after bin merging.
  double dof = 0.0;
  bool pass = false;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::string detail;
};

/// Report for an oracle comparison; passes when |a - b| <= tol * max(|a|, |b|).
TestReport compare_values(std::string id, double analytic, double oracle, double tol);

/// Pearson chi-square of observed counts (index = category) against expected
/// probabilities. Categories beyond expected.size() are pooled with the last
/// one, which is taken to carry the remaining mass 1 - sum(expected[0..k-2]).
/// Adjacent categories are merged from the right until every expected count
/// is at least 5. Throws StatisticError if fewer than two bins remain.
TestReport chi_square_gof(const std::vector<std::uint64_t>& observed,
                          const std::vector<double>& expected, double alpha = 0.01);

/// Two-sample chi-square homogeneity test on paired bin counts keyed by an
/// arbitrary category; sparse bins (pooled expected count < 5 in either row)
/// are merged, in key order, into their neighbours.
TestReport chi_square_two_sample(const std::map<std::int64_t, std::uint64_t>& a,
                                 const std::map<std::int64_t, std::uint64_t>& b,
                                 double alpha = 0.01);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution (Stephens' small-sample correction). Throws StatisticError on
/// samples smaller than 100.
TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

/// Poisson pmf table 0..kmax.
std::vector<double> poisson_pmf_table(double mean, std::uint64_t kmax);

}  // namespace crm
