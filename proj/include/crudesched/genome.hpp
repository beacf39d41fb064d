#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "crudesched/instance.hpp"

namespace crudesched {

/// Flat real-valued decision vector. Per period the layout is
///   [RT_{v,1}, RT_{v,2} for each vessel | RF_{v,1}, RF_{v,2} for each vessel |
///    CT slots grouped by CDU | CF slots grouped by CDU].
/// Tank slots hold a tank code: 0 is the inactive sentinel and k >= 1 names
/// tank k (one-based). Flow slots hold masses in kt.
using Genome = std::vector<double>;

class EncodingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Index genome_dimension(const Instance& instance);

/// Index arithmetic for the genome layout.
class GenomeLayout {
 public:
  explicit GenomeLayout(const Instance& instance);

  Index dimension() const { return periods_ * per_period_; }
  Index periods() const { return periods_; }
  Index per_period() const { return per_period_; }

  Index receive_tank(Index n, Index v, Index k) const { return n * per_period_ + 2 * v + k; }
  Index receive_flow(Index n, Index v, Index k) const { return n * per_period_ + 2 * vessels_ + 2 * v + k; }
  Index charge_tank(Index n, Index u, Index j) const {
    return n * per_period_ + 4 * vessels_ + slot_offset_[u] + j;
  }
  Index charge_flow(Index n, Index u, Index j) const {
    return n * per_period_ + 4 * vessels_ + slots_ + slot_offset_[u] + j;
  }

  /// Positions of every CF entry, period-major. These are the only
  /// dimensions the local refinement stage touches.
  std::vector<Index> charge_flow_positions() const;

 private:
  Index periods_ = 0;
  Index vessels_ = 0;
  Index slots_ = 0;
  Index per_period_ = 0;
  std::vector<Index> slot_offset_;
  std::vector<Index> slot_count_;
};

/// Box bounds of the search space, one entry per genome dimension.
struct GenomeBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  double clamp(Index i, double x) const { return x < lower[i] ? lower[i] : (x > upper[i] ? upper[i] : x); }
};

/// Tank slots span [0, T]; RF slots span [0, min(cargo, unload rate)];
/// CF slots span [0, FU_u^U].
GenomeBounds genome_bounds(const Instance& instance);

struct ReceiveDecision {
  Index tank = 0;
  double amount = 0.0;  // advisory; the simulator unloads at the maximum rate

  bool operator==(const ReceiveDecision&) const = default;
};

struct VesselDecision {
  Index vessel = 0;
  std::vector<ReceiveDecision> tanks;  // ordered, distinct, at most two

  bool operator==(const VesselDecision&) const = default;
};

struct ChargeDecision {
  Index tank = 0;
  double amount = 0.0;

  bool operator==(const ChargeDecision&) const = default;
};

struct CduDecision {
  std::vector<ChargeDecision> charges;  // distinct tanks

  bool operator==(const CduDecision&) const = default;
};

struct PeriodDecision {
  std::vector<VesselDecision> receiving;
  std::vector<CduDecision> charging;  // one entry per CDU

  bool operator==(const PeriodDecision&) const = default;
};

using Schedule = std::vector<PeriodDecision>;

/// Decodes one tank slot: round to nearest, clamp to [0, T]; 0 is inactive.
std::optional<Index> decode_tank_slot(double value, Index tank_count);

/// Total, deterministic decoding. Receiving slots are emitted only for
/// vessels that have arrived by that period; a second receiving slot naming
/// the same tank as the first is dropped; charging slots naming the same
/// tank within one CDU are merged by summing their flows, capped at FU^U. Throws
/// EncodingError on a dimension mismatch.
Schedule decode_genome(std::span<const double> genome, const Instance& instance);

/// Inverse of decode for well-formed schedules. Unused slots are written as
/// the inactive sentinel with zero flow.
Genome encode_schedule(const Schedule& schedule, const Instance& instance);

}  // namespace crudesched
