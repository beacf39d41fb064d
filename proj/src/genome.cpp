#include "crudesched/genome.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace crudesched {

Index genome_dimension(const Instance& instance) {
  return instance.horizon * (4 * instance.vessel_count() + 2 * instance.total_charging_slots());
}

GenomeLayout::GenomeLayout(const Instance& instance)
    : periods_(instance.horizon),
      vessels_(instance.vessel_count()),
      slots_(instance.total_charging_slots()),
      per_period_(4 * instance.vessel_count() + 2 * instance.total_charging_slots()) {
  Index offset = 0;
  for (const auto& cdu : instance.cdus) {
    slot_offset_.push_back(offset);
    slot_count_.push_back(cdu.max_charging_tanks);
    offset += cdu.max_charging_tanks;
  }
}

std::vector<Index> GenomeLayout::charge_flow_positions() const {
  std::vector<Index> out;
  out.reserve(periods_ * slots_);
  for (Index n = 0; n < periods_; ++n) {
    for (Index u = 0; u < slot_count_.size(); ++u) {
      for (Index j = 0; j < slot_count_[u]; ++j) out.push_back(charge_flow(n, u, j));
    }
  }
  return out;
}

GenomeBounds genome_bounds(const Instance& instance) {
  const GenomeLayout layout(instance);
  GenomeBounds b;
  b.lower.assign(layout.dimension(), 0.0);
  b.upper.assign(layout.dimension(), 0.0);
  const auto tanks = static_cast<double>(instance.tank_count());
  for (Index n = 0; n < instance.horizon; ++n) {
    for (Index v = 0; v < instance.vessel_count(); ++v) {
      const auto& vessel = instance.vessels[v];
      const double rf = std::min(vessel.total_cargo(), vessel.unload_rate);
      for (Index k = 0; k < 2; ++k) {
        b.upper[layout.receive_tank(n, v, k)] = tanks;
        b.upper[layout.receive_flow(n, v, k)] = rf;
      }
    }
    for (Index u = 0; u < instance.cdu_count(); ++u) {
      for (Index j = 0; j < instance.cdus[u].max_charging_tanks; ++j) {
        b.upper[layout.charge_tank(n, u, j)] = tanks;
        b.upper[layout.charge_flow(n, u, j)] = instance.cdus[u].feed.hi;
      }
    }
  }
  return b;
}

std::optional<Index> decode_tank_slot(double value, Index tank_count) {
  if (!(value >= 0.5)) return std::nullopt;  // also rejects NaN
  const double code = std::min(std::round(value), static_cast<double>(tank_count));
  return static_cast<Index>(code) - 1;
}

namespace {

double clamp_flow(double x, double hi) {
  if (!(x > 0.0)) return 0.0;
  return x > hi ? hi : x;
}

}  // namespace

Schedule decode_genome(std::span<const double> genome, const Instance& instance) {
  const GenomeLayout layout(instance);
  if (genome.size() != layout.dimension()) {
    throw EncodingError(fmt::format("genome has {} entries, instance requires {}", genome.size(), layout.dimension()));
  }
  const Index T = instance.tank_count();
  Schedule schedule(instance.horizon);
  for (Index n = 0; n < instance.horizon; ++n) {
    PeriodDecision& period = schedule[n];
    for (Index v = 0; v < instance.vessel_count(); ++v) {
      const auto& vessel = instance.vessels[v];
      if (n < vessel.arrival_period) continue;
      const double rf_hi = std::min(vessel.total_cargo(), vessel.unload_rate);
      VesselDecision vd{v, {}};
      for (Index k = 0; k < 2; ++k) {
        const auto tank = decode_tank_slot(genome[layout.receive_tank(n, v, k)], T);
        if (!tank) continue;
        if (!vd.tanks.empty() && vd.tanks.front().tank == *tank) continue;
        vd.tanks.push_back({*tank, clamp_flow(genome[layout.receive_flow(n, v, k)], rf_hi)});
      }
      if (!vd.tanks.empty()) period.receiving.push_back(std::move(vd));
    }
    period.charging.resize(instance.cdu_count());
    for (Index u = 0; u < instance.cdu_count(); ++u) {
      auto& charges = period.charging[u].charges;
      for (Index j = 0; j < instance.cdus[u].max_charging_tanks; ++j) {
        const auto tank = decode_tank_slot(genome[layout.charge_tank(n, u, j)], T);
        if (!tank) continue;
        const double amount = clamp_flow(genome[layout.charge_flow(n, u, j)], instance.cdus[u].feed.hi);
        auto same = std::find_if(charges.begin(), charges.end(), [&](const auto& c) { return c.tank == *tank; });
        if (same != charges.end()) {
          same->amount = std::min(same->amount + amount, instance.cdus[u].feed.hi);
        } else {
          charges.push_back({*tank, amount});
        }
      }
    }
  }
  return schedule;
}

Genome encode_schedule(const Schedule& schedule, const Instance& instance) {
  const GenomeLayout layout(instance);
  if (schedule.size() != instance.horizon) {
    throw EncodingError(fmt::format("schedule has {} periods, instance requires {}", schedule.size(), instance.horizon));
  }
  Genome g(layout.dimension(), 0.0);
  for (Index n = 0; n < schedule.size(); ++n) {
    for (const auto& vd : schedule[n].receiving) {
      if (vd.vessel >= instance.vessel_count() || vd.tanks.size() > 2) {
        throw EncodingError(fmt::format("period {}: malformed receiving decision", n + 1));
      }
      for (Index k = 0; k < vd.tanks.size(); ++k) {
        g[layout.receive_tank(n, vd.vessel, k)] = static_cast<double>(vd.tanks[k].tank + 1);
        g[layout.receive_flow(n, vd.vessel, k)] = vd.tanks[k].amount;
      }
    }
    if (schedule[n].charging.size() > instance.cdu_count()) {
      throw EncodingError(fmt::format("period {}: more CDU entries than CDUs", n + 1));
    }
    for (Index u = 0; u < schedule[n].charging.size(); ++u) {
      const auto& charges = schedule[n].charging[u].charges;
      if (charges.size() > instance.cdus[u].max_charging_tanks) {
        throw EncodingError(fmt::format("period {}: CDU {} has more charging tanks than slots", n + 1, u + 1));
      }
      for (Index j = 0; j < charges.size(); ++j) {
        g[layout.charge_tank(n, u, j)] = static_cast<double>(charges[j].tank + 1);
        g[layout.charge_flow(n, u, j)] = charges[j].amount;
      }
    }
  }
  return g;
}

}  // namespace crudesched
