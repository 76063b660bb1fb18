#include "crm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "crm/errors.hpp"
#include "crm/posterior.hpp"

namespace crm {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ParseError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned()) {
    throw ParseError(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

const json& array(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  return v;
}

json atoms_to_json(const std::vector<Atom>& atoms) {
  json out = json::array();
  for (const auto& a : atoms) out.push_back({{"w", a.weight}, {"loc", a.location.value}});
  return out;
}

std::vector<Atom> atoms_from_json(const json& arr) {
  std::vector<Atom> out;
  for (const auto& a : arr) out.emplace_back(number(a, "w"), Location(number(a, "loc")));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

bool is_beta_process(const std::string& prior_id) { return prior_id == "beta_process"; }

}  // namespace

json to_json(const Truncation& t) {
  if (t.kind == Truncation::Kind::ExactFinite) return {{"kind", "exact_finite"}};
  return {{"kind", "size_biased"},
          {"rounds", t.rounds},
          {"xmax", t.count_cap},
          {"tail_eps", t.tail_bound},
          {"certificate", t.tail_certificate}};
}

json to_json(const TraitMeasure& m) {
  return {{"fixed", atoms_to_json(m.fixed_atoms)},
          {"ordinary", atoms_to_json(m.ordinary_atoms)},
          {"trunc", to_json(m.truncation)}};
}

json to_json(const ObservationMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back({{"x", a.count}, {"loc", a.location.value}});
  return {{"atoms", atoms}};
}

Truncation truncation_from_json(const json& j) {
  Truncation t;
  const json& kind = field(j, "kind");
  if (kind == "exact_finite") return t;
  if (kind != "size_biased") throw ParseError("unknown truncation kind " + kind.dump());
  t.kind = Truncation::Kind::SizeBiased;
  t.rounds = count(j, "rounds");
  t.count_cap = count(j, "xmax");
  t.tail_bound = number(j, "tail_eps");
  t.tail_certificate = number(j, "certificate");
  return t;
}

TraitMeasure trait_measure_from_json(const json& j) {
  TraitMeasure m;
  m.fixed_atoms = atoms_from_json(array(j, "fixed"));
  m.ordinary_atoms = atoms_from_json(array(j, "ordinary"));
  m.truncation = truncation_from_json(field(j, "trunc"));
  m.validate();
  return m;
}

ObservationMeasure observation_from_json(const json& j) {
  std::vector<CountAtom> atoms;
  for (const auto& a : array(j, "atoms")) atoms.push_back({count(a, "x"), Location(number(a, "loc"))});
  return ObservationMeasure(std::move(atoms));
}

json model_to_json(const ExpCrmPrior& model, const std::string& prior_id) {
  json out = {{"prior", prior_id},
              {"likelihood", model.likelihood.id},
              {"mass", model.mass},
              {"xi", model.xi},
              {"lambda", model.lambda}};
  const auto nb_r = negative_binomial_r(model.likelihood.id);
  const bool nb = nb_r.has_value();
  const double r = nb_r.value_or(1.0);
  if (is_beta_process(prior_id)) {
    const BetaProcessParams bp = nb ? unmap_bp_params_nb({model.mass, model.xi, model.lambda}, r)
                                    : unmap_bp_params({model.mass, model.xi, model.lambda});
    out["discount"] = bp.discount;
    out["concentration"] = bp.concentration;
  }
  json fixed = json::array();
  for (const auto& f : model.fixed_atoms) {
    json a = {{"loc", f.location.value}, {"xi", f.xi}, {"lambda", f.lambda}};
    if (is_beta_process(prior_id)) {
      const auto [rho, sigma] = nb ? beta_fixed_atom_shapes_nb(f, r) : beta_fixed_atom_shapes(f);
      a["rho"] = rho;
      a["sigma"] = sigma;
    }
    fixed.push_back(a);
  }
  out["fixed_atoms"] = fixed;
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelConfig parse_model_config(const json& j) {
  ModelConfig cfg;
  try {
    const json& lik = field(j, "likelihood");
    std::string lik_id = field(lik, "id").get<std::string>();
    if (lik_id == "negative_binomial") {
      const double r = number(lik, "r");
      if (!(r > 0.0)) throw ParseError("negative_binomial r must be positive");
      lik_id = negative_binomial_id(r);
    }
    const json& prior = field(j, "prior");
    const std::string prior_id = field(prior, "id").get<std::string>();
    cfg.entry = catalog_entry(prior_id, lik_id);
    const auto nb_r = negative_binomial_r(lik_id);
    const bool nb = nb_r.has_value();
    const double r = nb_r.value_or(1.0);

    ExpCrmHyper hyper;
    if (is_beta_process(prior_id) && prior.contains("discount")) {
      const BetaProcessParams bp{number(prior, "mass"), number(prior, "discount"),
                                 number(prior, "concentration")};
      hyper = nb ? map_bp_params_nb(bp, r) : map_bp_params(bp);
    } else {
      hyper = {number(prior, "mass"), number(prior, "xi"), number(prior, "lambda")};
    }

    std::vector<FixedAtomParams> fixed;
    if (j.contains("fixed_atoms")) {
      for (const auto& a : array(j, "fixed_atoms")) {
        const Location loc(number(a, "loc"));
        if (is_beta_process(prior_id) && a.contains("rho")) {
          fixed.push_back(nb ? beta_fixed_atom_nb(loc, number(a, "rho"), number(a, "sigma"), r)
                             : beta_fixed_atom(loc, number(a, "rho"), number(a, "sigma")));
        } else {
          fixed.push_back({loc, number(a, "xi"), number(a, "lambda")});
        }
      }
    }

    if (j.contains("truncation")) {
      const json& t = j.at("truncation");
      if (t.contains("rounds")) cfg.truncation.rounds = count(t, "rounds");
      if (t.contains("xmax")) cfg.truncation.xmax = count(t, "xmax");
      if (t.contains("tail_eps")) cfg.truncation.tail_eps = number(t, "tail_eps");
      cfg.truncation.validate();
    }
    if (j.contains("seed")) cfg.seed = count(j, "seed");

    cfg.prior = auto_conjugate(cfg.entry.likelihood, hyper.mass, hyper.xi, hyper.lambda,
                               std::move(fixed));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model config: ") + e.what());
  } catch (const DomainError& e) {
    throw InvalidModel(e.what());
  }
  cfg.hash = fnv1a_hex(j.dump());
  return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  return parse_model_config(parse_text(read_file(path), path.string()));
}

std::vector<ObservationMeasure> load_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<ObservationMeasure> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = parse_text(line, path.string() + ":" + std::to_string(lineno));
    if (j.contains("header")) continue;
    try {
      out.push_back(observation_from_json(j));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const DomainError& e) {
      throw InvalidObservation(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace crm
