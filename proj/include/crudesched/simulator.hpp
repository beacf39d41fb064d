#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crudesched/genome.hpp"
#include "crudesched/instance.hpp"

namespace crudesched {

/// Every constraint family the simulator scores. The first five are the
/// discrete operating rules; the rest are material-balance, capacity and
/// processing conditions wired from the nomenclature quantities.
enum class ConstraintKind : std::uint8_t {
  kReceiveSingleSource,   // a tank takes one crude from one vessel per period
  kReceiveWhileCharging,  // a tank never receives and charges in one period
  kTankCduLimit,          // at most two CDUs per tank per period
  kChargingTankLimit,     // at most MT_u charging tanks per CDU
  kBerthLimit,            // at most `berths` vessels unloading per period
  kTankOverdraw,          // charge request exceeds tank contents
  kTankLowerBound,        // charging tank ends below TL^L
  kTankUpperBound,        // tank above TL^U
  kFeedBounds,            // FU_u outside [FU^L, FU^U]
  kFeedProperty,          // blended property outside [P^L, P^U]
  kProductBounds,         // FO_{u,s} outside [FO^L, FO^U]
  kResidueCompatibility,  // no residue mode can process the blend
  kResidueInventory,      // IR_r outside [IR^L, IR^U]
  kVesselUnloaded,        // cargo left aboard at the end of the horizon
  kCount,
};

inline constexpr Index kConstraintKindCount = static_cast<Index>(ConstraintKind::kCount);

std::string_view constraint_name(ConstraintKind kind);

/// Per-family switches; all families are scored by default.
class ConstraintToggles {
 public:
  ConstraintToggles() { enabled_.set(); }

  bool enabled(ConstraintKind kind) const { return enabled_.test(static_cast<Index>(kind)); }
  ConstraintToggles& set(ConstraintKind kind, bool on) {
    enabled_.set(static_cast<Index>(kind), on);
    return *this;
  }

 private:
  std::bitset<kConstraintKindCount> enabled_;
};

struct Violation {
  ConstraintKind kind{};
  Index period = 0;
  Index entity = 0;   // tank, CDU, residue or vessel index depending on kind
  Index detail = 0;   // property or product index where relevant
  double magnitude = 0.0;   // raw, in the constraint's own units
  double normalized = 0.0;  // magnitude divided by the constraint's scale
};

/// (CVN, CV, f): count and total normalized magnitude of violations, and
/// the changeover cost.
struct Fitness {
  Index cvn = 0;
  double cv = 0.0;
  double objective = 0.0;

  bool feasible() const { return cvn == 0; }
  bool operator==(const Fitness&) const = default;
};

Fitness fitness_from(std::span<const Violation> violations, double objective);

struct UnloadFlow {
  Index vessel = 0;
  Index crude = 0;
  Index tank = 0;
  double mass = 0.0;
};

struct ChargeFlow {
  Index tank = 0;
  Index cdu = 0;
  double requested = 0.0;
  double total = 0.0;             // FT_{t,u,n}
  std::vector<double> by_crude;   // FTC_{t,c,u,n}
};

/// State of the plant at the end of one period plus the flows during it.
struct PeriodRecord {
  std::vector<double> vessel_inventory;    // [v * C + c]
  std::vector<double> tank_contents;       // [t * C + c]
  std::vector<double> tank_totals;         // [t]
  std::vector<UnloadFlow> unloads;
  std::vector<ChargeFlow> charges;
  std::vector<double> cdu_feed;            // [u]
  std::vector<double> cdu_feed_by_crude;   // [u * C + c]
  std::vector<double> feed_properties;     // [u * K + k], NaN without feed
  std::vector<double> product_outputs;     // [u * S + s]
  std::vector<std::optional<Index>> residue_mode;  // [u]
  std::vector<double> residue_production;  // [u * R + r]
  std::vector<double> residue_inventory;   // [r]
  std::vector<std::vector<Index>> connections;  // [u], sorted tanks
  std::vector<bool> changeover;            // [u]
};

struct Trajectory {
  std::vector<double> initial_vessel_inventory;  // [v * C + c]
  std::vector<double> initial_tank_contents;     // [t * C + c]
  std::vector<double> initial_residue_inventory; // [r]
  std::vector<PeriodRecord> periods;
  std::vector<Violation> violations;
  Index changeovers = 0;
};

struct Withdrawal {
  std::vector<double> by_crude;
  double drawn = 0.0;
  double shortfall = 0.0;
};

/// Draws `total_draw` from a tank so that every crude leaves in proportion
/// to its share of the tank. A draw beyond the contents is truncated to the
/// contents and the excess reported as `shortfall`.
Withdrawal proportional_withdrawal(std::span<const double> contents, double total_draw);

/// Mass-weighted mean of each crude property over the feed. nullopt when
/// the total feed is zero.
std::optional<std::vector<double>> feed_properties(std::span<const double> feed_by_crude, const Instance& instance);

/// Residue mode for a CDU given its feed: the candidate set is the CP
/// intersection over fed crudes; among candidates the residue with the least
/// headroom above its lower inventory bound is chosen, ties to the lowest
/// index. nullopt when the candidate set is empty or nothing is fed.
std::optional<Index> select_residue_mode(std::span<const double> feed_by_crude, const Instance& instance,
                                         std::span<const double> residue_inventory);

/// Discrete operating rules over decoded decisions. Each breach counts once
/// with magnitude 1.
std::vector<Violation> check_operating_constraints(const Schedule& schedule, const Instance& instance,
                                                   const ConstraintToggles& toggles = {});

/// Total CO_{u,n} over the trajectory: a CDU incurs a changeover in a period
/// when its connected tank set or residue mode differs from the previous
/// period. The first period compares against the declared initial state and
/// is free when none is declared.
Index count_changeovers(const Trajectory& trajectory, const Instance& instance);

/// Stepping interface over the plant state; `simulate` drives it period by
/// period and the initialization heuristics use it to look ahead.
class SimulationState {
 public:
  explicit SimulationState(const Instance& instance, ConstraintToggles toggles = {});

  Index period() const { return period_; }
  const Instance& instance() const { return *instance_; }

  std::span<const double> tank_contents(Index t) const {
    return {tank_contents_.data() + t * instance_->crude_count(), instance_->crude_count()};
  }
  double tank_total(Index t) const;
  double vessel_remaining(Index v) const;
  /// Crude of the next parcel to be unloaded, nullopt when the vessel is empty.
  std::optional<Index> vessel_current_crude(Index v) const;
  /// Cargo still aboard, parcel by parcel in unloading order.
  std::vector<Parcel> vessel_parcels(Index v) const;
  std::span<const double> residue_inventory() const { return residue_inventory_; }

  /// Advances one period. Violations are appended to `violations`.
  PeriodRecord step(const PeriodDecision& decision, std::vector<Violation>& violations);

  /// End-of-horizon checks (cargo left aboard).
  void finish(std::vector<Violation>& violations) const;

 private:
  const Instance* instance_;
  ConstraintToggles toggles_;
  Index period_ = 0;
  std::vector<double> vessel_inventory_;   // [v * C + c]
  std::vector<std::vector<double>> parcel_remaining_;  // [v][parcel]
  std::vector<double> tank_contents_;      // [t * C + c]
  std::vector<double> residue_inventory_;  // [r]
  std::vector<std::vector<Index>> prev_connections_;
  std::vector<std::optional<Index>> prev_mode_;
};

Trajectory simulate(const Instance& instance, const Schedule& schedule, const ConstraintToggles& toggles = {});

/// decode -> simulate -> constraint scan. Pure and reentrant.
Fitness evaluate(const Instance& instance, std::span<const double> genome, const ConstraintToggles& toggles = {});

}  // namespace crudesched
