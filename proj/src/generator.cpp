#include "crudesched/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "crudesched/rng.hpp"
#include "crudesched/simulator.hpp"

namespace crudesched {

namespace {

constexpr int kMaxAttempts = 10;
constexpr double kWide = 1e9;

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }
double floor3(double x) { return std::floor(x * 1000.0) / 1000.0; }
double ceil3(double x) { return std::ceil(x * 1000.0) / 1000.0; }

struct Draft {
  Instance instance;
  Schedule witness;
  std::vector<Index> group_tanks;  // tanks charged by the witness
};

Draft plant(const GeneratorParams& p, Rng& rng) {
  Draft d;
  Instance& inst = d.instance;
  inst.name = fmt::format("gen-t{}-u{}-n{}-s{}", p.tanks, p.cdus, p.periods, p.seed);
  inst.horizon = p.periods;
  inst.berth_count = p.berths;
  inst.changeover_cost = 1.0;
  for (Index k = 0; k < p.properties; ++k) inst.property_names.push_back(fmt::format("prop{}", k + 1));
  inst.product_names = {"residue", "distillate"};
  inst.residue_product = 0;

  for (Index c = 0; c < p.crudes; ++c) {
    CrudeType crude;
    crude.name = fmt::format("C{}", c + 1);
    for (Index k = 0; k < p.properties; ++k) crude.properties.push_back(round3(rng.uniform(0.2, 3.0)));
    for (Index u = 0; u < p.cdus; ++u) {
      crude.yields.push_back({round3(rng.uniform(0.15, 0.4)), round3(rng.uniform(0.3, 0.6))});
    }
    inst.crudes.push_back(std::move(crude));
  }

  for (Index r = 0; r < p.residues; ++r) {
    ResidueSpec res;
    res.name = fmt::format("R{}", r + 1);
    for (Index c = 0; c < p.crudes; ++c) {
      if (r == 0 || rng.uniform() < 0.5) res.allowed_crudes.push_back(c);
    }
    if (res.allowed_crudes.empty()) res.allowed_crudes.push_back(rng.below(p.crudes));
    inst.residues.push_back(std::move(res));
  }

  // Split the tanks into one charging group per CDU and a pool of spares
  // that take the vessel cargo.
  const Index T = p.tanks;
  const Index C = p.crudes;
  std::vector<Index> perm(T);
  std::iota(perm.begin(), perm.end(), Index{0});
  rng.shuffle(std::span<Index>(perm));
  const Index spare_min = p.vessels > 0 ? 1 : 0;
  const Index group_total = std::min(p.cdus * p.max_tanks, T - spare_min);
  std::vector<std::vector<Index>> groups(p.cdus);
  for (Index i = 0; i < group_total; ++i) groups[i % p.cdus].push_back(perm[i]);
  const std::vector<Index> spares(perm.begin() + static_cast<std::ptrdiff_t>(group_total), perm.end());

  inst.tanks.resize(T);
  for (Index t = 0; t < T; ++t) {
    inst.tanks[t].name = fmt::format("T{}", t + 1);
    inst.tanks[t].initial.assign(C, 0.0);
  }

  d.witness.assign(p.periods, PeriodDecision{});
  for (auto& pd : d.witness) pd.charging.resize(p.cdus);

  for (Index u = 0; u < p.cdus; ++u) {
    CduSpec cdu;
    cdu.name = fmt::format("CDU{}", u + 1);
    cdu.max_charging_tanks = p.max_tanks;
    cdu.feed = {0.0, kWide};
    cdu.property_bounds.assign(p.properties, Bounds{-kWide, kWide});
    cdu.product_bounds.assign(2, Bounds{0.0, kWide});
    inst.cdus.push_back(std::move(cdu));

    const auto& group = groups[u];
    const double base = rng.uniform(10.0, 30.0);
    std::vector<double> w(group.size());
    for (double& x : w) x = rng.uniform(0.2, 1.0);
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> drawn(group.size(), 0.0);
    for (Index n = 0; n < p.periods; ++n) {
      const double feed = base * rng.uniform(0.85, 1.15);
      for (Index j = 0; j < group.size(); ++j) {
        const double f = std::max(0.001, round3(feed * w[j] / wsum));
        drawn[j] += f;
        d.witness[n].charging[u].charges.push_back({group[j], f});
      }
    }
    for (Index j = 0; j < group.size(); ++j) {
      Tank& tank = inst.tanks[group[j]];
      const double initial = round3(drawn[j] + rng.uniform(3.0, 10.0));
      tank.initial[rng.below(C)] = initial;
      tank.capacity = {0.0, round3(initial * rng.uniform(1.2, 1.6))};
      d.group_tanks.push_back(group[j]);
    }
  }

  std::vector<double> receipts(T, 0.0);
  for (Index t : spares) {
    if (rng.uniform() < 0.5) inst.tanks[t].initial[rng.below(C)] = round3(rng.uniform(5.0, 30.0));
  }

  std::vector<Index> berth_use(p.periods, 0);
  std::vector<std::vector<bool>> spare_busy(p.periods, std::vector<bool>(T, false));
  for (Index v = 0; v < p.vessels; ++v) {
    std::vector<Index> order(p.periods);
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(std::span<Index>(order));
    std::optional<Index> when;
    std::vector<Index> free_spares;
    for (Index n : order) {
      if (berth_use[n] >= p.berths) continue;
      free_spares.clear();
      for (Index t : spares) {
        if (!spare_busy[n][t]) free_spares.push_back(t);
      }
      if (!free_spares.empty()) {
        when = n;
        break;
      }
    }
    if (!when) throw GeneratorError(fmt::format("no berth slot and spare tank left for vessel {}", v + 1));
    rng.shuffle(std::span<Index>(free_spares));
    const Index parcels = free_spares.size() >= 2 && rng.uniform() < 0.5 ? 2 : 1;

    Vessel vessel;
    vessel.name = fmt::format("V{}", v + 1);
    vessel.arrival_period = *when;
    VesselDecision vd{v, {}};
    for (Index k = 0; k < parcels; ++k) {
      const Parcel parcel{rng.below(C), round3(rng.uniform(20.0, 80.0))};
      vessel.cargo.push_back(parcel);
      receipts[free_spares[k]] += parcel.mass;
      spare_busy[*when][free_spares[k]] = true;
      vd.tanks.push_back({free_spares[k], parcel.mass});
    }
    ++berth_use[*when];
    inst.vessels.push_back(std::move(vessel));
    d.witness[*when].receiving.push_back(std::move(vd));
  }
  for (Index t : spares) {
    Tank& tank = inst.tanks[t];
    tank.capacity = {0.0, round3(tank.initial_total() + receipts[t] + rng.uniform(10.0, 40.0))};
  }

  // Residue inventories start high enough to survive the horizon without
  // any production, so the lower bound never binds on the witness.
  double expected = 0.0;
  for (const auto& pd : d.witness) {
    for (const auto& cd : pd.charging) {
      for (const auto& ch : cd.charges) expected += ch.amount;
    }
  }
  expected *= 0.27 / static_cast<double>(p.periods * p.residues);
  for (auto& res : inst.residues) {
    res.inventory.lo = round3(rng.uniform(2.0, 10.0));
    double total = 0.0;
    for (Index n = 0; n < p.periods; ++n) {
      const double c = round3(expected * rng.uniform(0.3, 1.0));
      res.consumption.push_back(c);
      total += c;
    }
    res.initial_inventory = round3(res.inventory.lo + total + rng.uniform(2.0, 10.0));
    res.inventory.hi = kWide;
  }

  inst.initial_connections.assign(p.cdus, std::nullopt);
  finalize_instance(inst);
  return d;
}

// Tightens the draft's bounds around the witness trajectory.
void tighten(Draft& d, const Trajectory& traj, Rng& rng) {
  Instance& inst = d.instance;
  const Index T = inst.tank_count();
  const Index U = inst.cdu_count();
  const Index K = inst.property_count();
  const Index S = inst.product_count();

  std::vector<double> min_level(T, kWide);
  for (const auto& rec : traj.periods) {
    for (const auto& ch : rec.charges) min_level[ch.tank] = std::min(min_level[ch.tank], rec.tank_totals[ch.tank]);
  }
  for (Index t = 0; t < T; ++t) {
    Tank& tank = inst.tanks[t];
    if (min_level[t] < kWide) {
      tank.capacity.lo = floor3(min_level[t] * rng.uniform(0.5, 0.9));
    } else {
      tank.capacity.lo = round3(std::min(rng.uniform(1.0, 3.0), tank.capacity.hi * 0.1));
    }
  }

  double prop_lo = kWide;
  double prop_hi = -kWide;
  for (const auto& c : inst.crudes) {
    for (double x : c.properties) {
      prop_lo = std::min(prop_lo, x);
      prop_hi = std::max(prop_hi, x);
    }
  }
  const double prop_range = std::max(prop_hi - prop_lo, 0.1);

  for (Index u = 0; u < U; ++u) {
    CduSpec& cdu = inst.cdus[u];
    double fmin = kWide;
    double fmax = 0.0;
    std::vector<double> pmin(K, kWide), pmax(K, -kWide), omin(S, kWide), omax(S, 0.0);
    for (const auto& rec : traj.periods) {
      fmin = std::min(fmin, rec.cdu_feed[u]);
      fmax = std::max(fmax, rec.cdu_feed[u]);
      for (Index k = 0; k < K; ++k) {
        pmin[k] = std::min(pmin[k], rec.feed_properties[u * K + k]);
        pmax[k] = std::max(pmax[k], rec.feed_properties[u * K + k]);
      }
      for (Index s = 0; s < S; ++s) {
        omin[s] = std::min(omin[s], rec.product_outputs[u * S + s]);
        omax[s] = std::max(omax[s], rec.product_outputs[u * S + s]);
      }
    }
    cdu.feed = {floor3(fmin * rng.uniform(0.8, 0.95)), ceil3(fmax * rng.uniform(1.05, 1.25))};
    for (Index k = 0; k < K; ++k) {
      const double delta = rng.uniform(0.03, 0.15) * prop_range;
      cdu.property_bounds[k] = {floor3(pmin[k] - delta), ceil3(pmax[k] + delta)};
    }
    for (Index s = 0; s < S; ++s) {
      cdu.product_bounds[s] = {floor3(omin[s] * rng.uniform(0.7, 0.95)), ceil3(omax[s] * rng.uniform(1.05, 1.3))};
    }
  }

  for (Index r = 0; r < inst.residue_count(); ++r) {
    double peak = traj.initial_residue_inventory[r];
    for (const auto& rec : traj.periods) peak = std::max(peak, rec.residue_inventory[r]);
    inst.residues[r].inventory.hi = ceil3(peak + rng.uniform(5.0, 20.0));
  }
}

}  // namespace

void GeneratorParams::validate() const {
  if (periods < 1) throw GeneratorError("horizon must be at least 1 period");
  if (cdus < 1) throw GeneratorError("at least one CDU is required");
  if (tanks < cdus) throw GeneratorError(fmt::format("{} tanks cannot feed {} CDUs", tanks, cdus));
  if (vessels > 0 && tanks < cdus + 1) {
    throw GeneratorError("vessels need at least one tank outside the CDU feed groups");
  }
  if (crudes < 1) throw GeneratorError("at least one crude type is required");
  if (residues < 1 || residues > kMaxResidues) {
    throw GeneratorError(fmt::format("residue count must be in [1, {}]", kMaxResidues));
  }
  if (max_tanks < 1) throw GeneratorError("max_tanks must be at least 1");
  if (berths < 1) throw GeneratorError("at least one berth is required");
  if (vessels > periods * berths) {
    throw GeneratorError(fmt::format("{} vessels do not fit into {} periods x {} berths", vessels, periods, berths));
  }
}

GeneratedInstance generate_instance(const GeneratorParams& params) {
  params.validate();
  Rng rng = Rng::stream(params.seed, Stream::kGenerator);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Draft d = plant(params, rng);
    const Trajectory draft_traj = simulate(d.instance, d.witness);
    if (!draft_traj.violations.empty()) continue;
    tighten(d, draft_traj, rng);
    finalize_instance(d.instance);
    const Trajectory final_traj = simulate(d.instance, d.witness);
    if (!final_traj.violations.empty()) continue;
    return GeneratedInstance{std::move(d.instance), std::move(d.witness)};
  }
  throw GeneratorError("could not plant a feasible witness for these parameters");
}

}  // namespace crudesched
