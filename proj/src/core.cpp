#include "crm/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "crm/errors.hpp"

namespace crm {

Location::Location(double v) : value(v) {
  if (!(v >= 0.0 && v < 1.0)) {
    throw DomainError("location must lie in [0,1), got " + std::to_string(v));
  }
}

Atom::Atom(double w, Location loc) : weight(w), location(loc) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw DomainError("atom weight must be finite and strictly positive, got " + std::to_string(w));
  }
}

void TraitMeasure::validate() const {
  std::set<Location> seen;
  auto check = [&](const Atom& a) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw InvalidModel("trait measure holds a non-positive weight");
    }
    if (!seen.insert(a.location).second) {
      throw InvalidModel("trait measure holds two atoms at location " +
                         std::to_string(a.location.value));
    }
  };
  std::for_each(fixed_atoms.begin(), fixed_atoms.end(), check);
  std::for_each(ordinary_atoms.begin(), ordinary_atoms.end(), check);
}

ObservationMeasure::ObservationMeasure(std::vector<CountAtom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end(),
            [](const CountAtom& a, const CountAtom& b) { return a.location < b.location; });
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].count == 0) {
      throw InvalidObservation("observation atoms must have positive counts");
    }
    if (i > 0 && atoms_[i].location == atoms_[i - 1].location) {
      throw InvalidObservation("observation has two atoms at location " +
                               std::to_string(atoms_[i].location.value));
    }
  }
}

std::uint64_t ObservationMeasure::total_count() const {
  std::uint64_t total = 0;
  for (const auto& a : atoms_) total += a.count;
  return total;
}

std::uint64_t count_at(const ObservationMeasure& observation, Location location) {
  auto atoms = observation.atoms();
  auto it = std::lower_bound(atoms.begin(), atoms.end(), location,
                             [](const CountAtom& a, Location l) { return a.location < l; });
  if (it != atoms.end() && it->location == location) return it->count;
  return 0;
}

std::vector<Location> merge_locations(std::span<const ObservationMeasure> observations) {
  std::vector<Location> out;
  for (const auto& obs : observations) {
    for (const auto& a : obs.atoms()) out.push_back(a.location);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::mt19937_64 seeded_engine(const RngState& s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                    static_cast<std::uint32_t>(s.stream),
                    static_cast<std::uint32_t>(s.stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(RngState state) : state_(state), engine_(seeded_engine(state)) {}

double Rng::uniform_open() {
  // 53 random bits, shifted off zero.
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

Location Rng::location() {
  return Location(static_cast<double>(engine_() >> 11) * 0x1.0p-53);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError("poisson mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma shape must be positive");
  if (shape >= 1.0) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return std::log(dist(engine_));
  }
  // G(a) = G(a+1) * U^{1/a}, kept in log space so tiny shapes never round to 0.
  std::gamma_distribution<double> dist(shape + 1.0, 1.0);
  return std::log(dist(engine_)) + std::log(uniform_open()) / shape;
}

Location fresh_location(Rng& rng, std::set<Location>& used) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Location loc = rng.location();
    if (used.insert(loc).second) return loc;
  }
  throw RngFault("100 consecutive location collisions");
}

}  // namespace crm
