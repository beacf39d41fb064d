#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crudesched {

using Index = std::size_t;

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();
inline constexpr Index kMaxResidues = 64;

/// Closed interval [lo, hi].
struct Bounds {
  double lo = 0.0;
  double hi = 0.0;

  bool ordered() const { return lo <= hi; }

  /// Scale used to normalize violations of this bound pair. Degenerate
  /// intervals fall back to the magnitude of the upper bound.
  double span() const {
    const double s = hi - lo;
    if (s > 0.0 && s < kUnlimited) return s;
    const double m = hi < 0.0 ? -hi : hi;
    return (m > 1.0 && m < kUnlimited) ? m : 1.0;
  }

  bool operator==(const Bounds&) const = default;
};

/// Set of residue indices packed in a 64-bit mask.
class ResidueSet {
 public:
  constexpr ResidueSet() = default;
  constexpr explicit ResidueSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr ResidueSet all(Index count) {
    return ResidueSet(count >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1));
  }

  constexpr void insert(Index r) { bits_ |= std::uint64_t{1} << r; }
  constexpr bool contains(Index r) const { return (bits_ >> r) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr Index size() const { return static_cast<Index>(std::popcount(bits_)); }
  constexpr std::uint64_t bits() const { return bits_; }

  constexpr ResidueSet operator&(ResidueSet other) const { return ResidueSet(bits_ & other.bits_); }
  constexpr ResidueSet& operator&=(ResidueSet other) {
    bits_ &= other.bits_;
    return *this;
  }
  constexpr bool operator==(const ResidueSet&) const = default;

  std::vector<Index> members() const {
    std::vector<Index> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(static_cast<Index>(std::countr_zero(b)));
    }
    return out;
  }

 private:
  std::uint64_t bits_ = 0;
};

struct CrudeType {
  std::string name;
  std::vector<double> properties;           // [property]
  std::vector<std::vector<double>> yields;  // [cdu][product], mass fraction
  ResidueSet producible;                    // CP_c, derived from the residue specs
};

struct Parcel {
  Index crude = 0;
  double mass = 0.0;
};

struct Vessel {
  std::string name;
  Index arrival_period = 0;  // zero-based
  std::vector<Parcel> cargo;  // unloaded in listed order
  double unload_rate = kUnlimited;  // kt per period

  double total_cargo() const {
    double sum = 0.0;
    for (const auto& p : cargo) sum += p.mass;
    return sum;
  }
};

struct Tank {
  std::string name;
  Bounds capacity;              // mass bounds, kt
  std::vector<double> initial;  // [crude], kt

  double initial_total() const {
    double sum = 0.0;
    for (double m : initial) sum += m;
    return sum;
  }
};

struct CduSpec {
  std::string name;
  Bounds feed;  // kt per period
  Index max_charging_tanks = 1;
  std::vector<Bounds> property_bounds;  // [property]
  std::vector<Bounds> product_bounds;   // [product], kt per period
};

struct ResidueSpec {
  std::string name;
  std::vector<Index> allowed_crudes;  // RC_r
  Bounds inventory;
  double initial_inventory = 0.0;
  std::vector<double> consumption;  // [period]
};

/// Connection state a CDU carries into the first period.
struct InitialConnection {
  std::vector<Index> tanks;  // sorted
  std::optional<Index> mode;
};

/// Static problem description. Immutable once `finalize_instance` succeeds.
struct Instance {
  std::string name;
  Index horizon = 0;
  Index berth_count = 1;
  double changeover_cost = 1.0;
  std::vector<std::string> property_names;
  std::vector<std::string> product_names;
  Index residue_product = 0;

  std::vector<CrudeType> crudes;
  std::vector<Vessel> vessels;
  std::vector<Tank> tanks;
  std::vector<CduSpec> cdus;
  std::vector<ResidueSpec> residues;
  std::vector<std::optional<InitialConnection>> initial_connections;  // [cdu]

  Index crude_count() const { return crudes.size(); }
  Index tank_count() const { return tanks.size(); }
  Index cdu_count() const { return cdus.size(); }
  Index vessel_count() const { return vessels.size(); }
  Index residue_count() const { return residues.size(); }
  Index property_count() const { return property_names.size(); }
  Index product_count() const { return product_names.size(); }

  Index total_charging_slots() const {
    Index sum = 0;
    for (const auto& u : cdus) sum += u.max_charging_tanks;
    return sum;
  }
};

/// Raised when an instance fails validation. Carries one diagnostic per
/// failing field, each prefixed with the field path.
class InstanceError : public std::runtime_error {
 public:
  explicit InstanceError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Recomputes CP_c from the residue RC_r sets.
void derive_producible_residues(Instance& instance);

/// Every invariant violation found, empty when the instance is valid.
std::vector<std::string> validate_instance(const Instance& instance);

/// Derives CP sets, then validates. Throws InstanceError on failure.
void finalize_instance(Instance& instance);

/// CP intersection over the crudes present (mass > 0) in `contents`.
/// An empty mixture yields the full residue set.
ResidueSet mixture_residues(const Instance& instance, const double* contents);

}  // namespace crudesched
