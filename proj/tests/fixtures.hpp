#pragma once

#include <string>
#include <vector>

#include "crudesched/instance.hpp"
#include "crudesched/instance_io.hpp"

namespace crudesched::testing {

inline std::string data_path(const std::string& name) { return std::string(CRUDESCHED_DATA_DIR) + "/" + name; }

inline Instance refinery4() { return load_instance(data_path("refinery4.instance")); }

inline Schedule refinery4_schedule(const Instance& inst) {
  return load_schedule(data_path("refinery4_schedule.json"), inst);
}

/// The four-tank crudes and residues with the vessel dropped and the horizon
/// cut, small enough to enumerate.
inline Instance refinery4_cut(Index horizon) {
  Instance inst = refinery4();
  inst.horizon = horizon;
  inst.vessels.clear();
  for (auto& r : inst.residues) r.consumption.resize(horizon);
  finalize_instance(inst);
  return inst;
}

/// One CDU fed from `tanks` single-crude tanks; crude i has sulfur
/// 0.5 + i and both residues accept every crude unless `split` is set, in
/// which case R2 only accepts crude 0.
inline Instance small_instance(Index tanks, Index horizon, Index max_tanks = 2, bool split = false) {
  Instance inst;
  inst.name = "small";
  inst.horizon = horizon;
  inst.property_names = {"sulfur"};
  inst.product_names = {"residue"};
  for (Index c = 0; c < tanks; ++c) {
    CrudeType crude;
    crude.name = "C" + std::to_string(c + 1);
    crude.properties = {0.5 + static_cast<double>(c)};
    crude.yields = {{0.3}};
    inst.crudes.push_back(crude);
  }
  for (Index t = 0; t < tanks; ++t) {
    Tank tank;
    tank.name = "T" + std::to_string(t + 1);
    tank.capacity = {1.0, 100.0};
    tank.initial.assign(tanks, 0.0);
    tank.initial[t] = 40.0;
    inst.tanks.push_back(tank);
  }
  CduSpec cdu;
  cdu.name = "CDU1";
  cdu.feed = {5.0, 12.0};
  cdu.max_charging_tanks = max_tanks;
  cdu.property_bounds = {{0.0, 10.0}};
  cdu.product_bounds = {{0.0, 10.0}};
  inst.cdus.push_back(cdu);
  ResidueSpec r1;
  r1.name = "R1";
  for (Index c = 0; c < tanks; ++c) r1.allowed_crudes.push_back(c);
  r1.inventory = {0.0, 100.0};
  r1.initial_inventory = 20.0;
  r1.consumption.assign(horizon, 1.0);
  ResidueSpec r2 = r1;
  r2.name = "R2";
  if (split) r2.allowed_crudes = {0};
  r2.initial_inventory = 30.0;
  inst.residues = {r1, r2};
  finalize_instance(inst);
  return inst;
}

inline PeriodDecision charge_only(const Instance& inst, std::vector<std::vector<ChargeDecision>> per_cdu) {
  PeriodDecision pd;
  pd.charging.resize(inst.cdu_count());
  for (Index u = 0; u < per_cdu.size(); ++u) pd.charging[u].charges = per_cdu[u];
  return pd;
}

}  // namespace crudesched::testing
