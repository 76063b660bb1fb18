#pragma once

// JSON encodings of measures and models, and the model configuration file.
//
//   TraitMeasure        {"fixed":[{"w":..,"loc":..}],"ordinary":[..],"trunc":{..}}
//   ObservationMeasure  {"atoms":[{"x":..,"loc":..}]}
//
// Doubles are written in shortest round-trip form, so decoding reproduces
// every weight bit for bit.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "crm/catalog.hpp"
#include "crm/core.hpp"
#include "crm/marginal.hpp"
#include "crm/size_biased.hpp"

namespace crm {

nlohmann::json to_json(const Truncation& t);
nlohmann::json to_json(const TraitMeasure& m);
nlohmann::json to_json(const ObservationMeasure& m);

/// Throw ParseError on missing or mistyped fields, and the domain errors of
/// the measure types on invalid values.
Truncation truncation_from_json(const nlohmann::json& j);
TraitMeasure trait_measure_from_json(const nlohmann::json& j);
ObservationMeasure observation_from_json(const nlohmann::json& j);

/// Posterior (or prior) hyperparameters; beta-process fixed atoms also carry
/// their Beta(rho, sigma) shapes.
nlohmann::json model_to_json(const ExpCrmPrior& model, const std::string& prior_id);

/// A parsed and validated model file:
///
///   {
///     "prior": {"id": "gamma_process", "mass": 1, "xi": -1, "lambda": 1},
///     "likelihood": {"id": "poisson"},
///     "fixed_atoms": [{"loc": 0.25, "xi": 0, "lambda": 1}],
///     "truncation": {"rounds": 50, "xmax": 30, "tail_eps": 1e-8},
///     "seed": 7
///   }
///
/// beta_process priors may instead give {"mass", "discount", "concentration"}
/// and fixed atoms {"loc", "rho", "sigma"}. The negative binomial likelihood is
/// {"id": "negative_binomial", "r": 2} or {"id": "negative_binomial(2)"}.
struct ModelConfig {
  CatalogEntry entry;
  ExpCrmPrior prior;
  SizeBiasedConfig truncation;
  std::uint64_t seed = 0;
  /// FNV-1a hash of the canonical (key-sorted) config JSON, as 16 hex digits.
  std::string hash;
};

/// Throws ParseError on malformed input and InvalidModel, naming the failed
/// assumption, when the hyperparameters fall outside the family's region.
ModelConfig parse_model_config(const nlohmann::json& j);
/// As above; IoError when the file cannot be read, ParseError on bad JSON.
ModelConfig load_model_config(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& bytes);

/// Non-header lines of a .jsonl file as observations. Lines with a "header"
/// key are skipped.
std::vector<ObservationMeasure> load_observations(const std::filesystem::path& path);

}  // namespace crm
