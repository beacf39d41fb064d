#include "crudesched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

namespace crudesched {

GuardExceeded::GuardExceeded(double size, double guard)
    : std::runtime_error(fmt::format("search space has {:.4g} schedules, guard is {:.4g}", size, guard)),
      size_(size) {}

namespace {

bool exceeds(double value, double limit) { return value - limit > 1e-9 * std::max(1.0, std::fabs(limit)); }
bool outside_bounds(double value, const Bounds& b) { return exceeds(b.lo, value) || exceeds(value, b.hi); }

using Mixture = std::map<Index, double>;  // crude -> mass

double mass_of(const Mixture& m) {
  double s = 0.0;
  for (const auto& [c, x] : m) s += x;
  return s;
}

}  // namespace

ReferenceVerdict reference_check(const Instance& inst, const Schedule& schedule) {
  ReferenceVerdict out;
  if (schedule.size() != inst.horizon) {
    out.violations = 1;
    return out;
  }
  const Index T = inst.tank_count();
  const Index U = inst.cdu_count();

  // Residue options per crude, rebuilt from the residue specs.
  std::vector<std::set<Index>> options(inst.crude_count());
  for (Index r = 0; r < inst.residue_count(); ++r) {
    for (Index c : inst.residues[r].allowed_crudes) options[c].insert(r);
  }

  std::vector<Mixture> tanks(T);
  for (Index t = 0; t < T; ++t) {
    for (Index c = 0; c < inst.crude_count(); ++c) {
      if (inst.tanks[t].initial[c] > 0.0) tanks[t][c] = inst.tanks[t].initial[c];
    }
  }
  std::vector<std::vector<double>> aboard;  // [vessel][parcel]
  for (const auto& v : inst.vessels) {
    std::vector<double> parcels;
    for (const auto& p : v.cargo) parcels.push_back(p.mass);
    aboard.push_back(parcels);
  }
  std::vector<double> stock;
  for (const auto& r : inst.residues) stock.push_back(r.initial_inventory);

  Index bad = 0;
  std::vector<std::set<Index>> last_tanks(U);
  std::vector<std::optional<Index>> last_mode(U);

  for (Index n = 0; n < inst.horizon; ++n) {
    const PeriodDecision& pd = schedule[n];

    // Withdrawals come out of the opening stock of the period.
    const std::vector<Mixture> opening = tanks;
    std::map<Index, double> asked;
    for (Index u = 0; u < U && u < pd.charging.size(); ++u) {
      for (const auto& ch : pd.charging[u].charges) {
        if (ch.tank < T && ch.amount > 0.0) asked[ch.tank] += ch.amount;
      }
    }
    std::vector<Mixture> fed(U);
    std::vector<std::set<Index>> linked(U);
    std::vector<Index> charge_entries(T, 0);
    std::vector<Index> per_cdu(U, 0);
    for (Index u = 0; u < U && u < pd.charging.size(); ++u) {
      for (const auto& ch : pd.charging[u].charges) {
        if (ch.tank >= T || !(ch.amount > 0.0)) continue;
        linked[u].insert(ch.tank);
        ++charge_entries[ch.tank];
        ++per_cdu[u];
        const double have = mass_of(opening[ch.tank]);
        const double factor = asked[ch.tank] > have ? have / asked[ch.tank] : 1.0;
        const double take = ch.amount * factor;
        if (!(have > 0.0)) continue;
        for (const auto& [c, x] : opening[ch.tank]) {
          const double part = take * x / have;
          fed[u][c] += part;
          tanks[ch.tank][c] = std::max(0.0, tanks[ch.tank][c] - part);
        }
      }
    }
    for (const auto& [t, req] : asked) {
      if (exceeds(req, mass_of(opening[t]))) ++bad;
      if (exceeds(inst.tanks[t].capacity.lo, mass_of(tanks[t]))) ++bad;
    }

    std::vector<Index> receipts(T, 0);
    Index vessels_served = 0;
    for (const auto& vd : pd.receiving) {
      if (vd.vessel >= inst.vessel_count() || n < inst.vessels[vd.vessel].arrival_period) continue;
      auto& parcels = aboard[vd.vessel];
      double rate = inst.vessels[vd.vessel].unload_rate;
      bool served = false;
      for (const auto& slot : vd.tanks) {
        if (slot.tank >= T) continue;
        Index p = 0;
        while (p < parcels.size() && !(parcels[p] > 0.0)) ++p;
        if (p == parcels.size()) break;
        const double room = std::max(0.0, inst.tanks[slot.tank].capacity.hi - mass_of(tanks[slot.tank]));
        const double amount = std::min({parcels[p], room, rate});
        if (!(amount > 0.0)) continue;
        parcels[p] -= amount;
        rate -= amount;
        tanks[slot.tank][inst.vessels[vd.vessel].cargo[p].crude] += amount;
        ++receipts[slot.tank];
        served = true;
      }
      if (served) ++vessels_served;
    }

    for (Index t = 0; t < T; ++t) {
      if (receipts[t] > 1) ++bad;
      if (receipts[t] > 0 && charge_entries[t] > 0) ++bad;
      if (charge_entries[t] > 2) ++bad;
      if (exceeds(mass_of(tanks[t]), inst.tanks[t].capacity.hi)) ++bad;
    }
    for (Index u = 0; u < U; ++u) {
      if (per_cdu[u] > inst.cdus[u].max_charging_tanks) ++bad;
    }
    if (vessels_served > inst.berth_count) ++bad;

    std::vector<double> produced(inst.residue_count(), 0.0);
    std::vector<std::optional<Index>> mode(U);
    for (Index u = 0; u < U; ++u) {
      const CduSpec& cdu = inst.cdus[u];
      double feed = 0.0;
      for (const auto& [c, x] : fed[u]) feed += x;
      if (outside_bounds(feed, cdu.feed)) ++bad;
      if (!(feed > 0.0)) continue;
      for (Index k = 0; k < inst.property_count(); ++k) {
        double blend = 0.0;
        for (const auto& [c, x] : fed[u]) {
          if (x > 0.0) blend += x * inst.crudes[c].properties[k];
        }
        if (outside_bounds(blend / feed, cdu.property_bounds[k])) ++bad;
      }
      double residue_out = 0.0;
      for (Index s = 0; s < inst.product_count(); ++s) {
        double out_s = 0.0;
        for (const auto& [c, x] : fed[u]) out_s += inst.crudes[c].yields[u][s] * x;
        if (outside_bounds(out_s, cdu.product_bounds[s])) ++bad;
        if (s == inst.residue_product) residue_out = out_s;
      }
      std::set<Index> allowed;
      for (Index r = 0; r < inst.residue_count(); ++r) allowed.insert(r);
      for (const auto& [c, x] : fed[u]) {
        if (!(x > 0.0)) continue;
        std::set<Index> keep;
        std::set_intersection(allowed.begin(), allowed.end(), options[c].begin(), options[c].end(),
                              std::inserter(keep, keep.begin()));
        allowed = std::move(keep);
      }
      if (allowed.empty()) {
        ++bad;
        continue;
      }
      Index pick = *allowed.begin();
      for (Index r : allowed) {
        if (stock[r] - inst.residues[r].inventory.lo < stock[pick] - inst.residues[pick].inventory.lo) pick = r;
      }
      mode[u] = pick;
      produced[pick] += residue_out;
    }
    for (Index r = 0; r < inst.residue_count(); ++r) {
      stock[r] = stock[r] + produced[r] - inst.residues[r].consumption[n];
      if (outside_bounds(stock[r], inst.residues[r].inventory)) ++bad;
    }

    for (Index u = 0; u < U; ++u) {
      bool changed = false;
      if (n == 0) {
        const auto& init = u < inst.initial_connections.size() ? inst.initial_connections[u] : std::nullopt;
        if (init) {
          const std::set<Index> before(init->tanks.begin(), init->tanks.end());
          changed = before != linked[u] || (init->mode && init->mode != mode[u]);
        }
      } else {
        changed = last_tanks[u] != linked[u] || last_mode[u] != mode[u];
      }
      if (changed) ++out.changeovers;
      last_tanks[u] = linked[u];
      last_mode[u] = mode[u];
    }
  }

  for (const auto& parcels : aboard) {
    double left = 0.0;
    for (double x : parcels) left += x;
    if (exceeds(left, 0.0)) ++bad;
  }
  out.violations = bad;
  out.feasible = bad == 0;
  return out;
}

namespace {

// All decoded options for one entity in one period.
struct Digit {
  Index period = 0;
  bool vessel = false;
  Index entity = 0;
  std::vector<VesselDecision> receive;
  std::vector<CduDecision> charge;
  Index size() const { return vessel ? receive.size() : charge.size(); }
};

std::vector<VesselDecision> receive_options(Index v, Index T) {
  std::vector<VesselDecision> out{VesselDecision{v, {}}};
  for (Index a = 0; a < T; ++a) out.push_back(VesselDecision{v, {{a, 0.0}}});
  for (Index a = 0; a < T; ++a) {
    for (Index b = 0; b < T; ++b) {
      if (a != b) out.push_back(VesselDecision{v, {{a, 0.0}, {b, 0.0}}});
    }
  }
  return out;
}

void charge_options_rec(const std::vector<double>& grid, Index T, Index max_tanks, Index next, CduDecision& cur,
                        std::vector<CduDecision>& out) {
  out.push_back(cur);
  if (cur.charges.size() == max_tanks) return;
  for (Index t = next; t < T; ++t) {
    for (double f : grid) {
      cur.charges.push_back({t, f});
      charge_options_rec(grid, T, max_tanks, t + 1, cur, out);
      cur.charges.pop_back();
    }
  }
}

std::vector<CduDecision> charge_options(const Instance& inst, Index u, Index G) {
  std::vector<double> grid;
  for (Index k = 1; k <= G; ++k) grid.push_back(inst.cdus[u].feed.hi * static_cast<double>(k) / static_cast<double>(G));
  std::vector<CduDecision> out;
  CduDecision cur;
  charge_options_rec(grid, inst.tank_count(), inst.cdus[u].max_charging_tanks, 0, cur, out);
  return out;
}

double binomial(Index n, Index k) {
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

double oracle_space_size(const Instance& inst, Index flow_grid) {
  const Index T = inst.tank_count();
  double size = 1.0;
  for (Index n = 0; n < inst.horizon; ++n) {
    for (const auto& v : inst.vessels) {
      if (n >= v.arrival_period) size *= 1.0 + static_cast<double>(T * T);
    }
    for (const auto& cdu : inst.cdus) {
      double opts = 0.0;
      for (Index k = 0; k <= std::min(cdu.max_charging_tanks, T); ++k) {
        opts += binomial(T, k) * std::pow(static_cast<double>(flow_grid), static_cast<double>(k));
      }
      size *= opts;
    }
  }
  return size;
}

void enumerate_schedules(const Instance& inst, const OracleConfig& config,
                         const std::function<void(const Schedule&)>& visit) {
  if (config.flow_grid < 1) throw std::invalid_argument("flow grid must have at least one point");
  const double size = oracle_space_size(inst, config.flow_grid);
  if (size > config.guard) throw GuardExceeded(size, config.guard);

  std::vector<Digit> digits;
  for (Index n = 0; n < inst.horizon; ++n) {
    for (Index v = 0; v < inst.vessel_count(); ++v) {
      if (n < inst.vessels[v].arrival_period) continue;
      Digit d{n, true, v, receive_options(v, inst.tank_count()), {}};
      digits.push_back(std::move(d));
    }
    for (Index u = 0; u < inst.cdu_count(); ++u) {
      Digit d{n, false, u, {}, charge_options(inst, u, config.flow_grid)};
      digits.push_back(std::move(d));
    }
  }

  std::vector<Index> at(digits.size(), 0);
  Schedule schedule(inst.horizon);
  while (true) {
    for (auto& pd : schedule) {
      pd.receiving.clear();
      pd.charging.assign(inst.cdu_count(), CduDecision{});
    }
    for (Index i = 0; i < digits.size(); ++i) {
      const Digit& d = digits[i];
      if (d.vessel) {
        if (!d.receive[at[i]].tanks.empty()) schedule[d.period].receiving.push_back(d.receive[at[i]]);
      } else {
        schedule[d.period].charging[d.entity] = d.charge[at[i]];
      }
    }
    visit(schedule);

    Index i = 0;
    while (i < digits.size()) {
      if (++at[i] < digits[i].size()) break;
      at[i] = 0;
      ++i;
    }
    if (i == digits.size()) break;
  }
}

OracleResult oracle_enumerate(const Instance& inst, const OracleConfig& config) {
  OracleResult result;
  enumerate_schedules(inst, config, [&](const Schedule& s) {
    ++result.enumerated;
    const ReferenceVerdict v = reference_check(inst, s);
    if (!v.feasible) return;
    ++result.feasible_count;
    if (config.collect_feasible) result.feasible.push_back(s);
    if (!result.best_changeovers || v.changeovers < *result.best_changeovers) {
      result.best_changeovers = v.changeovers;
      result.best = s;
    }
  });
  return result;
}

}  // namespace crudesched
