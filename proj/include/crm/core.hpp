#pragma once

// Discrete random measures, observation measures and the seeded RNG shared by
// every sampler. The location space is [0,1) with a uniform base distribution;
// locations only act as labels, so equality is exact.

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace crm {

struct Location {
  double value = 0.0;

  Location() = default;
  explicit Location(double v);

  auto operator<=>(const Location&) const = default;
};

struct Atom {
  double weight = 0.0;
  Location location;

  Atom() = default;
  Atom(double w, Location loc);

  bool operator==(const Atom&) const = default;
};

/// How a TraitMeasure was cut down from an infinite CRM draw.
struct Truncation {
  enum class Kind { ExactFinite, SizeBiased };
  Kind kind = Kind::ExactFinite;
  std::uint64_t rounds = 0;
  std::uint64_t count_cap = 0;
  double tail_bound = 0.0;
  /// Largest certified per-round tail mass actually observed.
  double tail_certificate = 0.0;

  bool operator==(const Truncation&) const = default;
};

struct TraitMeasure {
  std::vector<Atom> fixed_atoms;
  std::vector<Atom> ordinary_atoms;
  Truncation truncation;

  std::size_t size() const { return fixed_atoms.size() + ordinary_atoms.size(); }
  /// Throws InvalidModel on non-positive weights or repeated locations.
  void validate() const;

  bool operator==(const TraitMeasure&) const = default;
};

struct CountAtom {
  std::uint64_t count = 0;
  Location location;

  bool operator==(const CountAtom&) const = default;
};

/// Integer-valued measure for one data point. Zero counts are never stored.
class ObservationMeasure {
 public:
  ObservationMeasure() = default;
  /// Atoms may arrive in any order; they are stored sorted by location.
  /// Throws InvalidObservation on zero counts or duplicate locations.
  explicit ObservationMeasure(std::vector<CountAtom> atoms);

  std::span<const CountAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  std::uint64_t total_count() const;

  bool operator==(const ObservationMeasure&) const = default;

 private:
  std::vector<CountAtom> atoms_;
};

std::uint64_t count_at(const ObservationMeasure& observation, Location location);

/// Sorted, deduplicated union of all atom locations.
std::vector<Location> merge_locations(std::span<const ObservationMeasure> observations);

/// Identity of one random stream. Streams with equal (seed, stream) replay
/// identical draws.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// mt19937_64 seeded through std::seed_seq with the four 32-bit halves
/// (seed.lo, seed.hi, stream.lo, stream.hi). Replicate r of a run with seed S
/// uses stream r.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(RngState state);
  Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngState{seed, stream}) {}

  const RngState& state() const { return state_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  /// Uniform on the open interval (0,1).
  double uniform_open();
  /// Uniform on [0,1); the base distribution of atom locations.
  Location location();
  std::uint64_t poisson(double mean);
  /// log of a Gamma(shape, 1) variate; stable for tiny shapes.
  double log_gamma_variate(double shape);

 private:
  RngState state_;
  std::mt19937_64 engine_;
};

/// Uniform location not yet in `used`, which it joins. A collision is a
/// probability-zero event; 100 in a row raise RngFault.
Location fresh_location(Rng& rng, std::set<Location>& used);

}  // namespace crm
