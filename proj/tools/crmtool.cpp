// crmtool: command-line front end for the CRM library.
//
// Exit codes: 0 success, 1 validation failure (invalid model, failed
// verification, tail bound), 2 I/O or parse error.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "crm/catalog.hpp"
#include "crm/errors.hpp"
#include "crm/io.hpp"
#include "crm/marginal.hpp"
#include "crm/posterior.hpp"
#include "crm/size_biased.hpp"
#include "crm/verify.hpp"

using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIo = 2;

// Runs job(r) for r in [0, reps) on a small pool; results land at index r, so
// output order never depends on scheduling.
template <typename T, typename Job>
std::vector<T> run_replicates(std::uint64_t reps, unsigned threads, Job job) {
  std::vector<T> out(reps);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::uint64_t r = next++; r < reps; r = next++) {
      try {
        out[r] = job(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw crm::IoError("cannot write " + path);
  return out;
}

json header(const std::string& command, const crm::ModelConfig& cfg, std::uint64_t seed,
            const json& truncation) {
  return {{"header",
           {{"tool", "crmtool"},
            {"command", command},
            {"config_hash", cfg.hash},
            {"seed", seed},
            {"prior", cfg.entry.prior_id},
            {"likelihood", cfg.entry.likelihood_id},
            {"truncation", truncation}}}};
}

void write_report(const std::string& path, const json& header_record, const std::string& suite,
                  const std::vector<crm::TestReport>& reports, bool pass) {
  json list = json::array();
  for (const auto& r : reports) {
    json j = {{"id", r.id},
              {"statistic", r.statistic},
              {"threshold", r.threshold},
              {"pass", r.pass},
              {"replicates", r.replicates},
              {"seed", r.seed},
              {"detail", r.detail}};
    if (r.p_value) j["p_value"] = *r.p_value;
    if (r.rel_error) j["rel_error"] = *r.rel_error;
    list.push_back(j);
  }
  json doc = header_record;
  doc["suite"] = suite;
  doc["reports"] = list;
  doc["pass"] = pass;
  if (path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    open_out(path) << doc.dump(2) << "\n";
  }
}

struct Options {
  std::string model, data, out, summary, report, suite = "assumptions";
  std::uint64_t seed = 0, reps = 1, n = 10, rounds = 0, xmax = 0;
  bool seed_set = false;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

std::uint64_t effective_seed(const Options& o, const crm::ModelConfig& cfg) {
  return o.seed_set ? o.seed : cfg.seed;
}

int cmd_families() {
  for (const auto& e : crm::catalog_entries()) {
    const std::string lik = e.likelihood_id.rfind("negative_binomial", 0) == 0
                                ? "negative_binomial(r)"
                                : e.likelihood_id;
    std::cout << lik << " <-> " << e.prior_id << "\n";
    for (const auto& c : e.constraints) std::cout << "    " << c << "\n";
  }
  return kOk;
}

int cmd_posterior(const Options& o) {
  const crm::ModelConfig cfg = crm::load_model_config(o.model);
  const auto data = crm::load_observations(o.data);
  const crm::PosteriorCrm post = crm::posterior_update(cfg.prior, data);
  json doc = header("posterior", cfg, cfg.seed, {{"kind", "exact_finite"}});
  doc["observations"] = data.size();
  doc["posterior"] = crm::model_to_json(post, cfg.entry.prior_id);
  open_out(o.out) << doc.dump(2) << "\n";
  return kOk;
}

int cmd_sample_prior(const Options& o) {
  const crm::ModelConfig cfg = crm::load_model_config(o.model);
  crm::SizeBiasedConfig trunc = cfg.truncation;
  if (o.rounds) trunc.rounds = o.rounds;
  if (o.xmax) trunc.xmax = o.xmax;
  const std::uint64_t seed = effective_seed(o, cfg);
  const crm::SizeBiasedSampler sampler(cfg.prior, trunc);
  const auto lines = run_replicates<std::string>(o.reps, o.threads, [&](std::uint64_t r) {
    crm::Rng rng(seed, r);
    json j = crm::to_json(sampler(rng));
    j["rep"] = r;
    return j.dump();
  });
  auto out = open_out(o.out);
  out << header("sample-prior", cfg, seed, crm::to_json(sampler.truncation())).dump() << "\n";
  for (const auto& l : lines) out << l << "\n";
  return kOk;
}

int cmd_sample_marginal(const Options& o) {
  const crm::ModelConfig cfg = crm::load_model_config(o.model);
  const crm::MarginalConfig mcfg{o.xmax ? o.xmax : cfg.truncation.xmax, cfg.truncation.tail_eps};
  const std::uint64_t seed = effective_seed(o, cfg);

  // The certificate is a deterministic function of the model, so it can be
  // written before any replicate runs.
  double certificate = 0.0;
  for (std::uint64_t n = 1; n <= o.n; ++n) {
    certificate = std::max(certificate, crm::tail_mass(cfg.prior, n, mcfg.xmax));
  }
  if (!(certificate <= mcfg.tail_eps)) {
    throw crm::TailBoundError("new-atom tail mass " + std::to_string(certificate) +
                              " exceeds the bound; raise --xmax");
  }

  struct Rep {
    std::string jsonl;
    std::string csv;
  };
  const auto reps = run_replicates<Rep>(o.reps, o.threads, [&](std::uint64_t r) {
    crm::MarginalStream stream(cfg.prior, mcfg, crm::Rng(seed, r));
    Rep rep;
    for (std::uint64_t n = 1; n <= o.n; ++n) {
      const crm::ObservationMeasure obs = stream.next();
      json j = crm::to_json(obs);
      j["rep"] = r;
      j["n"] = n;
      rep.jsonl += j.dump() + "\n";
      rep.csv += std::to_string(r) + "," + std::to_string(n) + "," + std::to_string(obs.size()) +
                 "," + std::to_string(stream.last_new()) + "," +
                 std::to_string(obs.total_count()) + "\n";
    }
    return rep;
  });

  const json trunc = {{"kind", "count_cap"},
                      {"xmax", mcfg.xmax},
                      {"tail_eps", mcfg.tail_eps},
                      {"certificate", certificate}};
  const json head = header("sample-marginal", cfg, seed, trunc);
  auto out = open_out(o.out);
  out << head.dump() << "\n";
  for (const auto& rep : reps) out << rep.jsonl;
  if (!o.summary.empty()) {
    auto csv = open_out(o.summary);
    csv << "# config_hash=" << cfg.hash << " seed=" << seed << " xmax=" << mcfg.xmax
        << " certificate=" << json(certificate).dump() << "\n";
    csv << "rep,n,atoms_total,atoms_new,sum_counts\n";
    for (const auto& rep : reps) csv << rep.csv;
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  const crm::ModelConfig cfg = crm::load_model_config(o.model);
  const std::uint64_t seed = effective_seed(o, cfg);
  std::vector<crm::TestReport> reports;
  json trunc = {{"kind", "exact_finite"}};
  if (o.suite == "assumptions") {
    reports = crm::assumption_suite(cfg.prior);
  } else if (o.suite == "oracle") {
    reports = crm::oracle_suite(cfg.entry, cfg.prior);
  } else if (o.suite == "equivalence") {
    crm::EquivalenceConfig ec;
    ec.seed = seed;
    ec.reps = o.reps > 1 ? o.reps : ec.reps;
    ec.size_biased = cfg.truncation;
    if (o.rounds) ec.size_biased.rounds = o.rounds;
    if (o.xmax) ec.size_biased.xmax = o.xmax;
    ec.marginal = {ec.size_biased.xmax, ec.size_biased.tail_eps};
    reports = crm::equivalence_suite(cfg.prior, ec);
    trunc = crm::to_json(crm::SizeBiasedSampler(cfg.prior, ec.size_biased).truncation());
  } else {
    throw crm::ParseError("unknown suite '" + o.suite + "'");
  }
  bool pass = true;
  for (auto& r : reports) {
    if (r.seed == 0) r.seed = seed;
    pass = pass && r.pass;
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.id << "  " << r.detail << "\n";
  }
  write_report(o.report, header("verify", cfg, seed, trunc), o.suite, reports, pass);
  return pass ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Completely random measure models: posteriors, samplers and verification"};
  app.require_subcommand(1);
  Options o;

  auto* families = app.add_subcommand("families", "Catalog of conjugate prior/likelihood pairs");
  families->add_subcommand("list", "List catalog entries and their hyperparameter regions");
  families->require_subcommand(1);

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "Model configuration (JSON)")->required();
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed; overrides the config seed")
        ->each([&](const std::string&) { o.seed_set = true; });
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "Worker threads for replicates");
  };

  auto* posterior = app.add_subcommand("posterior", "Exact posterior given observations");
  add_model(posterior);
  posterior->add_option("--data", o.data, "Observations (JSONL)")->required();
  posterior->add_option("--out", o.out, "Posterior output (JSON)")->required();

  auto* prior = app.add_subcommand("sample-prior", "Truncated size-biased prior draws");
  add_model(prior);
  prior->add_option("--rounds", o.rounds, "Rounds M (default: config)");
  prior->add_option("--xmax", o.xmax, "Count cap X (default: config)");
  prior->add_option("--reps", o.reps, "Replicates");
  prior->add_option("--out", o.out, "Draws (JSONL)")->required();
  add_seed(prior);
  add_threads(prior);

  auto* marginal = app.add_subcommand("sample-marginal", "Marginal-process observation draws");
  add_model(marginal);
  marginal->add_option("--n", o.n, "Data points per replicate");
  marginal->add_option("--reps", o.reps, "Replicates");
  marginal->add_option("--xmax", o.xmax, "Count cap for new atoms (default: config)");
  marginal->add_option("--out", o.out, "Observations (JSONL)")->required();
  marginal->add_option("--summary", o.summary, "Per-(rep, n) summary (CSV)");
  add_seed(marginal);
  add_threads(marginal);

  auto* verify = app.add_subcommand("verify", "Assumption, oracle and equivalence checks");
  add_model(verify);
  verify->add_option("--suite", o.suite, "assumptions | oracle | equivalence")
      ->check(CLI::IsMember({"assumptions", "oracle", "equivalence"}));
  verify->add_option("--report", o.report, "Report output (JSON); stdout when omitted");
  verify->add_option("--reps", o.reps, "Replicates for the equivalence suite");
  verify->add_option("--rounds", o.rounds, "Size-biased rounds for the equivalence suite");
  verify->add_option("--xmax", o.xmax, "Count cap for the equivalence suite");
  add_seed(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIo;
  }

  try {
    if (families->parsed()) return cmd_families();
    if (posterior->parsed()) return cmd_posterior(o);
    if (prior->parsed()) return cmd_sample_prior(o);
    if (marginal->parsed()) return cmd_sample_marginal(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const crm::IoError& e) {
    std::cerr << "crmtool: " << e.what() << "\n";
    return kIo;
  } catch (const crm::ParseError& e) {
    std::cerr << "crmtool: " << e.what() << "\n";
    return kIo;
  } catch (const crm::Error& e) {
    std::cerr << "crmtool: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}
