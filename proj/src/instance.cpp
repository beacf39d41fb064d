#include "crudesched/instance.hpp"

#include <cmath>

#include <fmt/format.h>

namespace crudesched {

namespace {

std::string join_diagnostics(const std::vector<std::string>& diagnostics) {
  std::string out = "invalid instance:";
  for (const auto& d : diagnostics) {
    out += "\n  ";
    out += d;
  }
  return out;
}

bool finite_non_negative(double x) { return std::isfinite(x) && x >= 0.0; }

void check_bounds(std::vector<std::string>& errs, const std::string& path, const Bounds& b) {
  if (std::isnan(b.lo) || std::isnan(b.hi)) {
    errs.push_back(fmt::format("{}: bound is NaN", path));
  } else if (!b.ordered()) {
    errs.push_back(fmt::format("{}: lower bound {} exceeds upper bound {}", path, b.lo, b.hi));
  }
}

}  // namespace

InstanceError::InstanceError(std::vector<std::string> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

void derive_producible_residues(Instance& instance) {
  for (auto& c : instance.crudes) c.producible = ResidueSet{};
  for (Index r = 0; r < instance.residues.size() && r < kMaxResidues; ++r) {
    for (Index c : instance.residues[r].allowed_crudes) {
      if (c < instance.crudes.size()) instance.crudes[c].producible.insert(r);
    }
  }
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> errs;
  const Index C = inst.crude_count();
  const Index U = inst.cdu_count();
  const Index K = inst.property_count();
  const Index S = inst.product_count();
  const Index R = inst.residue_count();

  if (inst.horizon < 1) errs.push_back("horizon: must be at least 1 period");
  if (inst.berth_count < 1) errs.push_back("berths: must be at least 1");
  if (!finite_non_negative(inst.changeover_cost)) errs.push_back("omega: must be finite and non-negative");
  if (C == 0) errs.push_back("crudes: at least one crude type is required");
  if (U == 0) errs.push_back("cdus: at least one CDU is required");
  if (inst.tank_count() == 0) errs.push_back("tanks: at least one tank is required");
  if (R == 0) errs.push_back("residues: at least one residue type is required");
  if (R > kMaxResidues) errs.push_back(fmt::format("residues: at most {} residue types supported", kMaxResidues));
  if (S == 0) errs.push_back("products: at least one product is required");
  if (inst.residue_product >= S) errs.push_back("residue_product: does not name a product");

  for (Index c = 0; c < C; ++c) {
    const auto& crude = inst.crudes[c];
    const std::string path = fmt::format("crudes[{}] ({})", c, crude.name);
    if (crude.properties.size() != K) {
      errs.push_back(fmt::format("{}.properties: expected {} values, found {}", path, K, crude.properties.size()));
    }
    for (Index k = 0; k < crude.properties.size(); ++k) {
      if (!finite_non_negative(crude.properties[k])) {
        errs.push_back(fmt::format("{}.properties[{}]: must be finite and non-negative", path, k));
      }
    }
    if (crude.yields.size() != U) {
      errs.push_back(fmt::format("{}.yields: expected one row per CDU ({}), found {}", path, U, crude.yields.size()));
    }
    for (Index u = 0; u < crude.yields.size(); ++u) {
      const auto& row = crude.yields[u];
      if (row.size() != S) {
        errs.push_back(fmt::format("{}.yields[{}]: expected {} products, found {}", path, u, S, row.size()));
        continue;
      }
      double sum = 0.0;
      for (Index s = 0; s < S; ++s) {
        if (!(row[s] >= 0.0 && row[s] <= 1.0)) {
          errs.push_back(fmt::format("{}.yields[{}][{}]: must lie in [0, 1]", path, u, s));
        }
        sum += row[s];
      }
      if (sum > 1.0 + 1e-9) errs.push_back(fmt::format("{}.yields[{}]: yields sum to {} > 1", path, u, sum));
    }
    if (crude.producible.empty()) {
      errs.push_back(fmt::format("{}: not allowed by any residue type (empty producible set)", path));
    }
  }

  for (Index v = 0; v < inst.vessel_count(); ++v) {
    const auto& vessel = inst.vessels[v];
    const std::string path = fmt::format("vessels[{}] ({})", v, vessel.name);
    if (vessel.arrival_period >= inst.horizon) {
      errs.push_back(fmt::format("{}.arrival_period: {} is outside the horizon of {} periods", path,
                                 vessel.arrival_period + 1, inst.horizon));
    }
    if (vessel.cargo.empty()) errs.push_back(fmt::format("{}.cargo: vessel carries no parcels", path));
    for (Index p = 0; p < vessel.cargo.size(); ++p) {
      const auto& parcel = vessel.cargo[p];
      if (parcel.crude >= C) errs.push_back(fmt::format("{}.cargo[{}]: unknown crude", path, p));
      if (!(std::isfinite(parcel.mass) && parcel.mass > 0.0)) {
        errs.push_back(fmt::format("{}.cargo[{}]: mass must be positive", path, p));
      }
    }
    if (!(vessel.unload_rate > 0.0)) errs.push_back(fmt::format("{}.unload_rate: must be positive", path));
  }

  for (Index t = 0; t < inst.tank_count(); ++t) {
    const auto& tank = inst.tanks[t];
    const std::string path = fmt::format("tanks[{}] ({})", t, tank.name);
    check_bounds(errs, path + ".capacity", tank.capacity);
    if (tank.capacity.lo < 0.0) errs.push_back(fmt::format("{}.capacity: lower bound is negative", path));
    if (tank.initial.size() != C) {
      errs.push_back(fmt::format("{}.initial: expected {} crude entries, found {}", path, C, tank.initial.size()));
    }
    for (Index c = 0; c < tank.initial.size(); ++c) {
      if (!finite_non_negative(tank.initial[c])) {
        errs.push_back(fmt::format("{}.initial[{}]: must be finite and non-negative", path, c));
      }
    }
    const double total = tank.initial_total();
    if (total > 0.0 && (total < tank.capacity.lo || total > tank.capacity.hi)) {
      errs.push_back(fmt::format("{}.initial: total {} outside capacity [{}, {}]", path, total, tank.capacity.lo,
                                 tank.capacity.hi));
    }
  }

  for (Index u = 0; u < U; ++u) {
    const auto& cdu = inst.cdus[u];
    const std::string path = fmt::format("cdus[{}] ({})", u, cdu.name);
    check_bounds(errs, path + ".feed", cdu.feed);
    if (cdu.feed.lo < 0.0) errs.push_back(fmt::format("{}.feed: lower bound is negative", path));
    if (!std::isfinite(cdu.feed.hi)) errs.push_back(fmt::format("{}.feed: upper bound must be finite", path));
    if (cdu.max_charging_tanks < 1) errs.push_back(fmt::format("{}.max_tanks: must be at least 1", path));
    if (cdu.property_bounds.size() != K) {
      errs.push_back(fmt::format("{}.property_bounds: expected {} pairs, found {}", path, K, cdu.property_bounds.size()));
    }
    for (Index k = 0; k < cdu.property_bounds.size(); ++k) {
      check_bounds(errs, fmt::format("{}.property_bounds[{}]", path, k), cdu.property_bounds[k]);
    }
    if (cdu.product_bounds.size() != S) {
      errs.push_back(fmt::format("{}.product_bounds: expected {} pairs, found {}", path, S, cdu.product_bounds.size()));
    }
    for (Index s = 0; s < cdu.product_bounds.size(); ++s) {
      check_bounds(errs, fmt::format("{}.product_bounds[{}]", path, s), cdu.product_bounds[s]);
    }
  }

  for (Index r = 0; r < R; ++r) {
    const auto& res = inst.residues[r];
    const std::string path = fmt::format("residues[{}] ({})", r, res.name);
    check_bounds(errs, path + ".inventory", res.inventory);
    if (res.allowed_crudes.empty()) errs.push_back(fmt::format("{}.crudes: allowed crude set is empty", path));
    for (Index c : res.allowed_crudes) {
      if (c >= C) errs.push_back(fmt::format("{}.crudes: unknown crude index {}", path, c));
    }
    if (!(res.initial_inventory >= res.inventory.lo && res.initial_inventory <= res.inventory.hi)) {
      errs.push_back(fmt::format("{}.initial: {} outside inventory bounds [{}, {}]", path, res.initial_inventory,
                                 res.inventory.lo, res.inventory.hi));
    }
    if (res.consumption.size() != inst.horizon) {
      errs.push_back(fmt::format("{}.consumption: expected {} periods, found {}", path, inst.horizon,
                                 res.consumption.size()));
    }
    for (Index n = 0; n < res.consumption.size(); ++n) {
      if (!finite_non_negative(res.consumption[n])) {
        errs.push_back(fmt::format("{}.consumption[{}]: must be finite and non-negative", path, n));
      }
    }
  }

  // CP_c must be exactly the inverse image of the RC_r sets.
  if (R <= kMaxResidues) {
    for (Index c = 0; c < C; ++c) {
      for (Index r = 0; r < R; ++r) {
        bool in_rc = false;
        for (Index a : inst.residues[r].allowed_crudes) in_rc = in_rc || a == c;
        if (in_rc != inst.crudes[c].producible.contains(r)) {
          errs.push_back(fmt::format("crudes[{}] ({}): producible set disagrees with residues[{}].crudes", c,
                                     inst.crudes[c].name, r));
        }
      }
    }
  }

  if (!inst.initial_connections.empty() && inst.initial_connections.size() != U) {
    errs.push_back("initial_connections: expected one entry per CDU");
  }
  for (Index u = 0; u < inst.initial_connections.size(); ++u) {
    const auto& conn = inst.initial_connections[u];
    if (!conn) continue;
    for (Index t : conn->tanks) {
      if (t >= inst.tank_count()) errs.push_back(fmt::format("initial_connections[{}]: unknown tank", u));
    }
    if (conn->mode && *conn->mode >= R) errs.push_back(fmt::format("initial_connections[{}]: unknown mode", u));
  }
  return errs;
}

void finalize_instance(Instance& instance) {
  derive_producible_residues(instance);
  if (instance.initial_connections.empty()) instance.initial_connections.resize(instance.cdu_count());
  auto errs = validate_instance(instance);
  if (!errs.empty()) throw InstanceError(std::move(errs));
}

ResidueSet mixture_residues(const Instance& instance, const double* contents) {
  ResidueSet set = ResidueSet::all(instance.residue_count());
  for (Index c = 0; c < instance.crude_count(); ++c) {
    if (contents[c] > 0.0) set &= instance.crudes[c].producible;
  }
  return set;
}

}  // namespace crudesched
