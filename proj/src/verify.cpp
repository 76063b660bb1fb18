#include "crm/verify.hpp"

#include <cmath>
#include <sstream>

#include "crm/oracle.hpp"

namespace crm {

namespace {

constexpr std::uint64_t kSizeBiasedStreamBase = std::uint64_t{1} << 32;

std::string history_text(const std::vector<std::uint64_t>& h) {
  std::ostringstream s;
  s << "[";
  for (std::size_t i = 0; i < h.size(); ++i) s << (i ? "," : "") << h[i];
  s << "]";
  return s.str();
}

}  // namespace

std::vector<TestReport> assumption_suite(const ExpCrmPrior& prior) {
  const AssumptionReport r = check_assumptions(prior);
  return {r.a0, r.a1, r.a2};
}

std::vector<TestReport> oracle_suite(const CatalogEntry& entry, const ExpCrmPrior& prior,
                                     double tol) {
  std::vector<TestReport> out;
  const auto& lik = prior.likelihood;
  for (std::uint64_t m = 1; m <= 3; ++m) {
    for (std::uint64_t x = 1; x <= 3; ++x) {
      if (!lik.in_support(x)) continue;
      const auto [xi, lambda] = weight_dist_params(prior, m, x);
      const std::string cell = "(m=" + std::to_string(m) + ",x=" + std::to_string(x) + ")";
      out.push_back(compare_values("B" + cell, log_partition_B(lik, xi, lambda),
                                   oracle_log_B(lik, xi, lambda), tol));
      const double oracle = oracle_rate_M(prior, m, x);
      out.push_back(compare_values("M" + cell, rate_M(prior, m, x), oracle, tol));
      if (entry.analytic_rate) {
        out.push_back(compare_values("M_closed_form" + cell, entry.analytic_rate(prior, m, x),
                                     oracle, tol));
      }
    }
  }
  const std::vector<std::vector<std::uint64_t>> histories = {{1}, {1, 0}, {0, 1, 1}, {2, 0, 1}};
  for (const auto& h : histories) {
    bool ok = true;
    for (auto c : h) ok = ok && lik.in_support(c);
    if (!ok) continue;
    double past = 0.0;
    for (auto c : h) past += lik.suff_stat(c);
    for (std::uint64_t x = 0; x <= 2; ++x) {
      if (!lik.in_support(x)) continue;
      const std::string id = "predictive(h=" + history_text(h) + ",x=" + std::to_string(x) + ")";
      const double oracle = oracle_predictive(prior, h, x);
      out.push_back(compare_values(id, predictive_pmf(prior, h, x), oracle, tol));
      if (entry.analytic_predictive) {
        out.push_back(compare_values(id + "_closed_form",
                                     entry.analytic_predictive(prior, past, h.size() + 1, x),
                                     oracle, tol));
      }
    }
  }
  for (std::size_t k = 0; k < prior.fixed_atoms.size(); ++k) {
    const auto& f = prior.fixed_atoms[k];
    out.push_back(compare_values("B(fixed " + std::to_string(k) + ")",
                                 log_partition_B(lik, f.xi, f.lambda),
                                 oracle_log_B(lik, f.xi, f.lambda), tol));
  }
  return out;
}

std::int64_t joint_key(std::uint64_t atoms, std::uint64_t total) {
  return static_cast<std::int64_t>(atoms) * 1'000'000 + static_cast<std::int64_t>(total);
}

JointCounts marginal_joint_counts(const ExpCrmPrior& prior, std::uint64_t n_points,
                                  std::uint64_t reps, const MarginalConfig& cfg,
                                  std::uint64_t seed) {
  JointCounts out(n_points);
  for (std::uint64_t r = 0; r < reps; ++r) {
    MarginalStream stream(prior, cfg, Rng(seed, r));
    for (std::uint64_t n = 0; n < n_points; ++n) {
      const ObservationMeasure obs = stream.next();
      ++out[n][joint_key(obs.size(), obs.total_count())];
    }
  }
  return out;
}

JointCounts size_biased_joint_counts(const ExpCrmPrior& prior, std::uint64_t n_points,
                                     std::uint64_t reps, const SizeBiasedConfig& cfg,
                                     std::uint64_t seed) {
  const SizeBiasedSampler sampler(prior, cfg);
  const auto& lik = prior.likelihood;
  JointCounts out(n_points);
  for (std::uint64_t r = 0; r < reps; ++r) {
    Rng rng(seed, kSizeBiasedStreamBase + r);
    const TraitMeasure draw = sampler(rng);
    for (std::uint64_t n = 0; n < n_points; ++n) {
      std::uint64_t atoms = 0, total = 0;
      auto observe = [&](const Atom& a) {
        const std::uint64_t x = sample_count(lik, a.weight, rng);
        if (x > 0) {
          ++atoms;
          total += x;
        }
      };
      for (const auto& a : draw.fixed_atoms) observe(a);
      for (const auto& a : draw.ordinary_atoms) observe(a);
      ++out[n][joint_key(atoms, total)];
    }
  }
  return out;
}

std::vector<TestReport> equivalence_suite(const ExpCrmPrior& prior, const EquivalenceConfig& cfg) {
  const JointCounts marg = marginal_joint_counts(prior, cfg.n_points, cfg.reps, cfg.marginal, cfg.seed);
  const JointCounts sb =
      size_biased_joint_counts(prior, cfg.n_points, cfg.reps, cfg.size_biased, cfg.seed);
  std::vector<TestReport> out;
  for (std::uint64_t n = 0; n < cfg.n_points; ++n) {
    TestReport r = chi_square_two_sample(marg[n], sb[n], cfg.alpha);
    r.id = "equivalence(n=" + std::to_string(n + 1) + ")";
    r.seed = cfg.seed;
    r.replicates = cfg.reps;
    r.detail += "; size-biased rounds=" + std::to_string(cfg.size_biased.rounds);
    out.push_back(r);
  }
  return out;
}

}  // namespace crm
