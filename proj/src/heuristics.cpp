#include "crudesched/heuristics.hpp"

#include <algorithm>
#include <optional>

#include "crudesched/simulator.hpp"

namespace crudesched {

namespace {

constexpr int kChargeRetries = 3;

double total_of(std::span<const double> contents) {
  double sum = 0.0;
  for (double m : contents) sum += m;
  return sum;
}

std::span<const double> tank_slice(std::span<const double> contents, Index t, Index C) {
  return contents.subspan(t * C, C);
}

// Best tank under Rule I, or nullopt when no tank can take anything.
std::optional<Index> rule_one_pick(const Instance& inst, Index crude, std::span<const double> contents,
                                   const std::vector<bool>& excluded) {
  const Index C = inst.crude_count();
  std::optional<Index> best;
  bool best_empty = false;
  Index best_sim = 0;
  double best_room = 0.0;
  for (Index t = 0; t < inst.tank_count(); ++t) {
    if (excluded[t]) continue;
    const auto slice = tank_slice(contents, t, C);
    const double level = total_of(slice);
    const double room = inst.tanks[t].capacity.hi - level;
    if (!(room > 0.0)) continue;
    const bool empty = !(level > 0.0);
    const Index sim = similarity(inst, crude, slice);
    bool better = !best;
    if (!better) {
      if (empty != best_empty) {
        better = empty;
      } else if (sim != best_sim) {
        better = sim > best_sim;
      } else {
        better = room > best_room;
      }
    }
    if (better) {
      best = t;
      best_empty = empty;
      best_sim = sim;
      best_room = room;
    }
  }
  return best;
}

}  // namespace

Index similarity(const Instance& instance, Index crude, std::span<const double> tank_contents) {
  ResidueSet set = instance.crudes[crude].producible;
  for (Index c = 0; c < tank_contents.size(); ++c) {
    if (tank_contents[c] > 0.0) set &= instance.crudes[c].producible;
  }
  return set.size();
}

std::vector<ReceiveDecision> select_receiving_tanks(const Instance& instance, std::span<const Parcel> remaining,
                                                    double unload_rate, std::span<const double> contents,
                                                    const std::vector<bool>& excluded) {
  const Index C = instance.crude_count();
  std::vector<double> scratch(contents.begin(), contents.end());
  std::vector<bool> skip = excluded;
  std::vector<Parcel> parcels(remaining.begin(), remaining.end());
  std::vector<ReceiveDecision> out;
  Index p = 0;
  double rate_left = unload_rate;
  while (out.size() < 2 && p < parcels.size() && rate_left > 0.0) {
    if (!(parcels[p].mass > 0.0)) {
      ++p;
      continue;
    }
    const Index crude = parcels[p].crude;
    const auto pick = rule_one_pick(instance, crude, scratch, skip);
    if (!pick) break;
    const double room = instance.tanks[*pick].capacity.hi - total_of(tank_slice(scratch, *pick, C));
    const double amount = std::min({parcels[p].mass, room, rate_left});
    scratch[*pick * C + crude] += amount;
    parcels[p].mass -= amount;
    rate_left -= amount;
    skip[*pick] = true;
    out.push_back({*pick, amount});
  }
  return out;
}

std::vector<double> charging_probabilities(const Instance& instance, std::span<const Index> eligible,
                                           std::span<const double> contents) {
  const Index C = instance.crude_count();
  std::vector<double> w;
  w.reserve(eligible.size());
  double sum = 0.0;
  for (Index t : eligible) {
    const Index size = mixture_residues(instance, contents.data() + t * C).size();
    const double x = size > 0 ? 1.0 / static_cast<double>(size) : 0.0;
    w.push_back(x);
    sum += x;
  }
  if (sum > 0.0) {
    for (double& x : w) x /= sum;
  }
  return w;
}

Index sample_index(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  Index last = 0;
  for (Index i = 0; i < probabilities.size(); ++i) {
    if (!(probabilities[i] > 0.0)) continue;
    acc += probabilities[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

Genome initialize_individual(const Instance& instance, Rng& rng) {
  const Index T = instance.tank_count();
  const Index C = instance.crude_count();
  const GenomeLayout layout(instance);
  Genome genome(layout.dimension(), 0.0);
  SimulationState state(instance);
  std::vector<Violation> scratch_violations;

  for (Index n = 0; n < instance.horizon; ++n) {
    std::vector<double> contents(T * C);
    for (Index t = 0; t < T; ++t) {
      const auto s = state.tank_contents(t);
      std::copy(s.begin(), s.end(), contents.begin() + t * C);
    }
    PeriodDecision decision;
    decision.charging.resize(instance.cdu_count());
    std::vector<double> planned(T, 0.0);
    std::vector<Index> cdus_on_tank(T, 0);

    // Charge amounts first, then Rule II tank choice for each slot.
    for (Index u = 0; u < instance.cdu_count(); ++u) {
      const auto& cdu = instance.cdus[u];
      std::vector<bool> taken(T, false);
      for (Index j = 0; j < cdu.max_charging_tanks; ++j) {
        double cf = rng.uniform(0.0, cdu.feed.hi / static_cast<double>(cdu.max_charging_tanks));
        std::vector<Index> eligible;
        for (int attempt = 0; attempt <= kChargeRetries; ++attempt) {
          eligible.clear();
          for (Index t = 0; t < T; ++t) {
            if (taken[t] || cdus_on_tank[t] >= 2) continue;
            const double level = total_of(tank_slice(contents, t, C));
            if (!(level > 0.0)) continue;
            if (mixture_residues(instance, contents.data() + t * C).empty()) continue;
            if (level - planned[t] - cf < instance.tanks[t].capacity.lo) continue;
            eligible.push_back(t);
          }
          if (!eligible.empty()) break;
          cf *= 0.5;
        }
        if (eligible.empty()) continue;
        const auto probs = charging_probabilities(instance, eligible, contents);
        const Index t = eligible[sample_index(probs, rng)];
        taken[t] = true;
        planned[t] += cf;
        ++cdus_on_tank[t];
        genome[layout.charge_tank(n, u, j)] = static_cast<double>(t + 1);
        genome[layout.charge_flow(n, u, j)] = cf;
        decision.charging[u].charges.push_back({t, cf});
      }
    }

    // Rule I for the vessels at berth, skipping tanks that charge this period.
    std::vector<bool> excluded(T, false);
    for (Index t = 0; t < T; ++t) excluded[t] = planned[t] > 0.0 || cdus_on_tank[t] > 0;
    Index berths_used = 0;
    for (Index v = 0; v < instance.vessel_count() && berths_used < instance.berth_count; ++v) {
      const auto& vessel = instance.vessels[v];
      if (n < vessel.arrival_period || !(state.vessel_remaining(v) > 0.0)) continue;
      const auto remaining = state.vessel_parcels(v);
      const auto picks = select_receiving_tanks(instance, remaining, vessel.unload_rate, contents, excluded);
      if (picks.empty()) continue;
      VesselDecision vd{v, {}};
      for (Index k = 0; k < picks.size(); ++k) {
        excluded[picks[k].tank] = true;
        genome[layout.receive_tank(n, v, k)] = static_cast<double>(picks[k].tank + 1);
        genome[layout.receive_flow(n, v, k)] = picks[k].amount;
        vd.tanks.push_back(picks[k]);
      }
      decision.receiving.push_back(std::move(vd));
      ++berths_used;
    }

    scratch_violations.clear();
    state.step(decision, scratch_violations);
  }
  return genome;
}

std::vector<Genome> initialize_population(const Instance& instance, Index population_size, std::uint64_t seed) {
  std::vector<Genome> out;
  out.reserve(population_size);
  for (Index m = 0; m < population_size; ++m) {
    Rng rng = Rng::stream(seed, Stream::kInit, m);
    out.push_back(initialize_individual(instance, rng));
  }
  return out;
}

std::vector<Genome> random_population(const Instance& instance, Index population_size, std::uint64_t seed) {
  const GenomeBounds bounds = genome_bounds(instance);
  std::vector<Genome> out;
  out.reserve(population_size);
  for (Index m = 0; m < population_size; ++m) {
    Rng rng = Rng::stream(seed, Stream::kInit, m);
    Genome g(bounds.lower.size());
    for (Index i = 0; i < g.size(); ++i) g[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace crudesched
