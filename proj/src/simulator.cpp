#include "crudesched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace crudesched {

namespace {

// Relative slack below which a bound breach is treated as rounding noise.
constexpr double kTolerance = 1e-9;

double above(double value, double limit) {
  const double d = value - limit;
  return d > kTolerance * std::max(1.0, std::abs(limit)) ? d : 0.0;
}

double below_bound(double value, double limit) {
  const double d = limit - value;
  return d > kTolerance * std::max(1.0, std::abs(limit)) ? d : 0.0;
}

double outside(double value, const Bounds& b) {
  const double lo = below_bound(value, b.lo);
  return lo > 0.0 ? lo : above(value, b.hi);
}

class ViolationSink {
 public:
  ViolationSink(std::vector<Violation>& out, const ConstraintToggles& toggles, Index period)
      : out_(out), toggles_(toggles), period_(period) {}

  void add(ConstraintKind kind, Index entity, double magnitude, double scale, Index detail = 0) {
    if (!(magnitude > 0.0) || !toggles_.enabled(kind)) return;
    out_.push_back(Violation{kind, period_, entity, detail, magnitude, magnitude / scale});
  }

 private:
  std::vector<Violation>& out_;
  const ConstraintToggles& toggles_;
  Index period_;
};

void check_period_operating(const PeriodDecision& decision, const Instance& inst, ViolationSink& sink) {
  const Index T = inst.tank_count();
  std::vector<Index> receipts(T, 0);
  std::vector<Index> cdus_per_tank(T, 0);
  for (const auto& vd : decision.receiving) {
    for (const auto& r : vd.tanks) {
      if (r.tank < T) ++receipts[r.tank];
    }
  }
  for (Index u = 0; u < decision.charging.size() && u < inst.cdu_count(); ++u) {
    const auto& charges = decision.charging[u].charges;
    for (const auto& c : charges) {
      if (c.tank < T) ++cdus_per_tank[c.tank];
    }
    if (charges.size() > inst.cdus[u].max_charging_tanks) sink.add(ConstraintKind::kChargingTankLimit, u, 1.0, 1.0);
  }
  for (Index t = 0; t < T; ++t) {
    if (receipts[t] > 1) sink.add(ConstraintKind::kReceiveSingleSource, t, 1.0, 1.0);
    if (receipts[t] > 0 && cdus_per_tank[t] > 0) sink.add(ConstraintKind::kReceiveWhileCharging, t, 1.0, 1.0);
    if (cdus_per_tank[t] > 2) sink.add(ConstraintKind::kTankCduLimit, t, 1.0, 1.0);
  }
  if (decision.receiving.size() > inst.berth_count) sink.add(ConstraintKind::kBerthLimit, 0, 1.0, 1.0);
}

bool connection_changed(const std::vector<Index>& tanks, std::optional<Index> mode,
                        const std::vector<Index>& prev_tanks, std::optional<Index> prev_mode) {
  return tanks != prev_tanks || mode != prev_mode;
}

bool initial_changed(const Instance& inst, Index u, const std::vector<Index>& tanks, std::optional<Index> mode) {
  if (u >= inst.initial_connections.size() || !inst.initial_connections[u]) return false;
  const auto& init = *inst.initial_connections[u];
  if (tanks != init.tanks) return true;
  return init.mode.has_value() && mode != init.mode;
}

}  // namespace

std::string_view constraint_name(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kReceiveSingleSource: return "receive_single_source";
    case ConstraintKind::kReceiveWhileCharging: return "receive_while_charging";
    case ConstraintKind::kTankCduLimit: return "tank_cdu_limit";
    case ConstraintKind::kChargingTankLimit: return "charging_tank_limit";
    case ConstraintKind::kBerthLimit: return "berth_limit";
    case ConstraintKind::kTankOverdraw: return "tank_overdraw";
    case ConstraintKind::kTankLowerBound: return "tank_lower_bound";
    case ConstraintKind::kTankUpperBound: return "tank_upper_bound";
    case ConstraintKind::kFeedBounds: return "feed_bounds";
    case ConstraintKind::kFeedProperty: return "feed_property";
    case ConstraintKind::kProductBounds: return "product_bounds";
    case ConstraintKind::kResidueCompatibility: return "residue_compatibility";
    case ConstraintKind::kResidueInventory: return "residue_inventory";
    case ConstraintKind::kVesselUnloaded: return "vessel_unloaded";
    case ConstraintKind::kCount: break;
  }
  return "unknown";
}

Fitness fitness_from(std::span<const Violation> violations, double objective) {
  Fitness f;
  f.objective = objective;
  for (const auto& v : violations) {
    ++f.cvn;
    f.cv += v.normalized;
  }
  return f;
}

Withdrawal proportional_withdrawal(std::span<const double> contents, double total_draw) {
  Withdrawal w;
  w.by_crude.assign(contents.size(), 0.0);
  if (!(total_draw > 0.0)) return w;
  double total = 0.0;
  for (double m : contents) total += m;
  if (!(total > 0.0)) {
    w.shortfall = total_draw;
    return w;
  }
  double draw = total_draw;
  if (draw > total) {
    w.shortfall = draw - total;
    draw = total;
  }
  for (Index c = 0; c < contents.size(); ++c) w.by_crude[c] = draw * contents[c] / total;
  w.drawn = draw;
  return w;
}

std::optional<std::vector<double>> feed_properties(std::span<const double> feed_by_crude, const Instance& instance) {
  double total = 0.0;
  for (double m : feed_by_crude) total += m;
  if (!(total > 0.0)) return std::nullopt;
  std::vector<double> props(instance.property_count(), 0.0);
  for (Index c = 0; c < feed_by_crude.size(); ++c) {
    if (feed_by_crude[c] <= 0.0) continue;
    for (Index k = 0; k < props.size(); ++k) props[k] += feed_by_crude[c] * instance.crudes[c].properties[k];
  }
  for (double& p : props) p /= total;
  return props;
}

std::optional<Index> select_residue_mode(std::span<const double> feed_by_crude, const Instance& instance,
                                         std::span<const double> residue_inventory) {
  ResidueSet candidates = ResidueSet::all(instance.residue_count());
  bool fed = false;
  for (Index c = 0; c < feed_by_crude.size(); ++c) {
    if (feed_by_crude[c] > 0.0) {
      candidates &= instance.crudes[c].producible;
      fed = true;
    }
  }
  if (!fed || candidates.empty()) return std::nullopt;
  std::optional<Index> best;
  double best_headroom = std::numeric_limits<double>::infinity();
  for (Index r : candidates.members()) {
    const double headroom = residue_inventory[r] - instance.residues[r].inventory.lo;
    if (!best || headroom < best_headroom) {
      best = r;
      best_headroom = headroom;
    }
  }
  return best;
}

std::vector<Violation> check_operating_constraints(const Schedule& schedule, const Instance& instance,
                                                   const ConstraintToggles& toggles) {
  std::vector<Violation> out;
  for (Index n = 0; n < schedule.size(); ++n) {
    ViolationSink sink(out, toggles, n);
    check_period_operating(schedule[n], instance, sink);
  }
  return out;
}

Index count_changeovers(const Trajectory& trajectory, const Instance& instance) {
  Index count = 0;
  for (Index u = 0; u < instance.cdu_count(); ++u) {
    for (Index n = 0; n < trajectory.periods.size(); ++n) {
      const auto& rec = trajectory.periods[n];
      if (n == 0) {
        count += initial_changed(instance, u, rec.connections[u], rec.residue_mode[u]) ? 1 : 0;
      } else {
        const auto& prev = trajectory.periods[n - 1];
        count += connection_changed(rec.connections[u], rec.residue_mode[u], prev.connections[u],
                                    prev.residue_mode[u])
                     ? 1
                     : 0;
      }
    }
  }
  return count;
}

SimulationState::SimulationState(const Instance& instance, ConstraintToggles toggles)
    : instance_(&instance), toggles_(toggles) {
  const Index C = instance.crude_count();
  vessel_inventory_.assign(instance.vessel_count() * C, 0.0);
  parcel_remaining_.resize(instance.vessel_count());
  for (Index v = 0; v < instance.vessel_count(); ++v) {
    for (const auto& p : instance.vessels[v].cargo) {
      vessel_inventory_[v * C + p.crude] += p.mass;
      parcel_remaining_[v].push_back(p.mass);
    }
  }
  tank_contents_.assign(instance.tank_count() * C, 0.0);
  for (Index t = 0; t < instance.tank_count(); ++t) {
    std::copy(instance.tanks[t].initial.begin(), instance.tanks[t].initial.end(), tank_contents_.begin() + t * C);
  }
  for (const auto& r : instance.residues) residue_inventory_.push_back(r.initial_inventory);
  prev_connections_.resize(instance.cdu_count());
  prev_mode_.resize(instance.cdu_count());
}

double SimulationState::tank_total(Index t) const {
  double sum = 0.0;
  for (double m : tank_contents(t)) sum += m;
  return sum;
}

double SimulationState::vessel_remaining(Index v) const {
  const Index C = instance_->crude_count();
  double sum = 0.0;
  for (Index c = 0; c < C; ++c) sum += vessel_inventory_[v * C + c];
  return sum;
}

std::optional<Index> SimulationState::vessel_current_crude(Index v) const {
  const auto& cargo = instance_->vessels[v].cargo;
  for (Index p = 0; p < cargo.size(); ++p) {
    if (parcel_remaining_[v][p] > 0.0) return cargo[p].crude;
  }
  return std::nullopt;
}

std::vector<Parcel> SimulationState::vessel_parcels(Index v) const {
  std::vector<Parcel> out;
  const auto& cargo = instance_->vessels[v].cargo;
  for (Index p = 0; p < cargo.size(); ++p) {
    if (parcel_remaining_[v][p] > 0.0) out.push_back({cargo[p].crude, parcel_remaining_[v][p]});
  }
  return out;
}

PeriodRecord SimulationState::step(const PeriodDecision& decision, std::vector<Violation>& violations) {
  const Instance& inst = *instance_;
  const Index C = inst.crude_count();
  const Index T = inst.tank_count();
  const Index U = inst.cdu_count();
  const Index K = inst.property_count();
  const Index S = inst.product_count();
  const Index R = inst.residue_count();
  const Index n = period_;
  ViolationSink sink(violations, toggles_, n);

  PeriodRecord rec;
  rec.cdu_feed.assign(U, 0.0);
  rec.cdu_feed_by_crude.assign(U * C, 0.0);
  rec.feed_properties.assign(U * K, std::numeric_limits<double>::quiet_NaN());
  rec.product_outputs.assign(U * S, 0.0);
  rec.residue_mode.assign(U, std::nullopt);
  rec.residue_production.assign(U * R, 0.0);
  rec.connections.resize(U);
  rec.changeover.assign(U, false);

  PeriodDecision effective;
  effective.charging.resize(U);

  // Charging draws from the start-of-period stock, so every withdrawal
  // carries the composition ITC_{t,c,n-1} exactly.
  std::vector<double> requested(T, 0.0);
  for (Index u = 0; u < U && u < decision.charging.size(); ++u) {
    for (const auto& ch : decision.charging[u].charges) {
      if (ch.tank >= T || !(ch.amount > 0.0)) continue;
      requested[ch.tank] += ch.amount;
      effective.charging[u].charges.push_back(ch);
    }
  }
  const std::vector<double> stock = tank_contents_;
  std::vector<double> scale(T, 1.0);
  for (Index t = 0; t < T; ++t) {
    if (!(requested[t] > 0.0)) continue;
    const double total = tank_total(t);
    if (requested[t] > total) scale[t] = total / requested[t];
    sink.add(ConstraintKind::kTankOverdraw, t, above(requested[t], total), inst.tanks[t].capacity.span());
  }
  for (Index u = 0; u < U; ++u) {
    for (const auto& ch : effective.charging[u].charges) {
      const std::span<const double> contents(stock.data() + ch.tank * C, C);
      Withdrawal w = proportional_withdrawal(contents, ch.amount * scale[ch.tank]);
      for (Index c = 0; c < C; ++c) {
        rec.cdu_feed_by_crude[u * C + c] += w.by_crude[c];
        double& m = tank_contents_[ch.tank * C + c];
        m -= w.by_crude[c];
        if (m < 0.0) m = 0.0;
      }
      rec.cdu_feed[u] += w.drawn;
      rec.charges.push_back(ChargeFlow{ch.tank, u, ch.amount, w.drawn, std::move(w.by_crude)});
    }
  }
  for (Index t = 0; t < T; ++t) {
    if (requested[t] > 0.0) {
      sink.add(ConstraintKind::kTankLowerBound, t, below_bound(tank_total(t), inst.tanks[t].capacity.lo),
               inst.tanks[t].capacity.span());
    }
  }

  // Unloading at the maximum rate: each slot takes as much of the current
  // parcel as the tank headroom and the vessel's remaining rate allow.
  for (const auto& vd : decision.receiving) {
    const Index v = vd.vessel;
    if (v >= inst.vessel_count() || n < inst.vessels[v].arrival_period) continue;
    double rate_left = inst.vessels[v].unload_rate;
    VesselDecision eff{v, {}};
    for (const auto& slot : vd.tanks) {
      if (slot.tank >= T) continue;
      auto& parcels = parcel_remaining_[v];
      const auto current = std::find_if(parcels.begin(), parcels.end(), [](double m) { return m > 0.0; });
      if (current == parcels.end()) break;
      const Index crude = inst.vessels[v].cargo[static_cast<Index>(current - parcels.begin())].crude;
      const double headroom = std::max(0.0, inst.tanks[slot.tank].capacity.hi - tank_total(slot.tank));
      const double amount = std::min({*current, headroom, rate_left});
      if (!(amount > 0.0)) continue;
      *current -= amount;
      double& aboard = vessel_inventory_[v * C + crude];
      aboard = std::max(0.0, aboard - amount);
      rate_left -= amount;
      tank_contents_[slot.tank * C + crude] += amount;
      rec.unloads.push_back(UnloadFlow{v, crude, slot.tank, amount});
      eff.tanks.push_back({slot.tank, amount});
    }
    if (!eff.tanks.empty()) effective.receiving.push_back(std::move(eff));
  }

  check_period_operating(effective, inst, sink);
  for (Index t = 0; t < T; ++t) {
    sink.add(ConstraintKind::kTankUpperBound, t, above(tank_total(t), inst.tanks[t].capacity.hi),
             inst.tanks[t].capacity.span());
  }

  // Processing: feed bounds, blended properties, product outputs, mode.
  for (Index u = 0; u < U; ++u) {
    const auto& cdu = inst.cdus[u];
    const double feed = rec.cdu_feed[u];
    sink.add(ConstraintKind::kFeedBounds, u, outside(feed, cdu.feed), cdu.feed.span());
    if (!(feed > 0.0)) continue;
    const std::span<const double> fuc(rec.cdu_feed_by_crude.data() + u * C, C);
    const auto props = feed_properties(fuc, inst);
    for (Index k = 0; k < K; ++k) {
      rec.feed_properties[u * K + k] = (*props)[k];
      sink.add(ConstraintKind::kFeedProperty, u, outside((*props)[k], cdu.property_bounds[k]),
               cdu.property_bounds[k].span(), k);
    }
    for (Index s = 0; s < S; ++s) {
      double out = 0.0;
      for (Index c = 0; c < C; ++c) out += inst.crudes[c].yields[u][s] * fuc[c];
      rec.product_outputs[u * S + s] = out;
      sink.add(ConstraintKind::kProductBounds, u, outside(out, cdu.product_bounds[s]), cdu.product_bounds[s].span(), s);
    }
    rec.residue_mode[u] = select_residue_mode(fuc, inst, residue_inventory_);
    if (rec.residue_mode[u]) {
      rec.residue_production[u * R + *rec.residue_mode[u]] = rec.product_outputs[u * S + inst.residue_product];
    } else {
      sink.add(ConstraintKind::kResidueCompatibility, u, feed, cdu.feed.span());
    }
  }

  for (Index r = 0; r < R; ++r) {
    double produced = 0.0;
    for (Index u = 0; u < U; ++u) produced += rec.residue_production[u * R + r];
    residue_inventory_[r] += produced - inst.residues[r].consumption[n];
    sink.add(ConstraintKind::kResidueInventory, r, outside(residue_inventory_[r], inst.residues[r].inventory),
             inst.residues[r].inventory.span());
  }

  for (Index u = 0; u < U; ++u) {
    auto& conn = rec.connections[u];
    for (const auto& ch : effective.charging[u].charges) conn.push_back(ch.tank);
    std::sort(conn.begin(), conn.end());
    conn.erase(std::unique(conn.begin(), conn.end()), conn.end());
    rec.changeover[u] = n == 0 ? initial_changed(inst, u, conn, rec.residue_mode[u])
                               : connection_changed(conn, rec.residue_mode[u], prev_connections_[u], prev_mode_[u]);
    prev_connections_[u] = conn;
    prev_mode_[u] = rec.residue_mode[u];
  }

  rec.vessel_inventory = vessel_inventory_;
  rec.tank_contents = tank_contents_;
  rec.tank_totals.resize(T);
  for (Index t = 0; t < T; ++t) rec.tank_totals[t] = tank_total(t);
  rec.residue_inventory = residue_inventory_;
  ++period_;
  return rec;
}

void SimulationState::finish(std::vector<Violation>& violations) const {
  ViolationSink sink(violations, toggles_, period_ == 0 ? 0 : period_ - 1);
  for (Index v = 0; v < instance_->vessel_count(); ++v) {
    const double total = instance_->vessels[v].total_cargo();
    sink.add(ConstraintKind::kVesselUnloaded, v, above(vessel_remaining(v), 0.0), total > 0.0 ? total : 1.0);
  }
}

Trajectory simulate(const Instance& instance, const Schedule& schedule, const ConstraintToggles& toggles) {
  if (schedule.size() != instance.horizon) {
    throw EncodingError(fmt::format("schedule has {} periods, instance requires {}", schedule.size(), instance.horizon));
  }
  SimulationState state(instance, toggles);
  Trajectory traj;
  const Index C = instance.crude_count();
  traj.initial_vessel_inventory.assign(instance.vessel_count() * C, 0.0);
  for (Index v = 0; v < instance.vessel_count(); ++v) {
    for (const auto& p : instance.vessels[v].cargo) traj.initial_vessel_inventory[v * C + p.crude] += p.mass;
  }
  for (const auto& t : instance.tanks) {
    traj.initial_tank_contents.insert(traj.initial_tank_contents.end(), t.initial.begin(), t.initial.end());
  }
  for (const auto& r : instance.residues) traj.initial_residue_inventory.push_back(r.initial_inventory);

  traj.periods.reserve(instance.horizon);
  for (const auto& period : schedule) traj.periods.push_back(state.step(period, traj.violations));
  state.finish(traj.violations);
  traj.changeovers = count_changeovers(traj, instance);
  return traj;
}

Fitness evaluate(const Instance& instance, std::span<const double> genome, const ConstraintToggles& toggles) {
  const Trajectory traj = simulate(instance, decode_genome(genome, instance), toggles);
  return fitness_from(traj.violations, instance.changeover_cost * static_cast<double>(traj.changeovers));
}

}  // namespace crudesched
