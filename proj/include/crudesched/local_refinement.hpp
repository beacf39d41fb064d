#pragma once

#include <span>
#include <vector>

#include "crudesched/genome.hpp"
#include "crudesched/global_search.hpp"
#include "crudesched/instance.hpp"
#include "crudesched/rng.hpp"

namespace crudesched {

// Repair stage: the discrete part of each elite is frozen and only the
// charge flows (N x sum MT_u entries) are evolved with composite DE.

enum class DeStrategy { kRand1Bin, kRand2Bin, kCurrentToRand1 };

struct DeParameters {
  double scale = 1.0;      // F
  double crossover = 0.1;  // CR
};

struct LocalStageConfig {
  Index population_size = 60;
  Index max_evaluations = 30000;
  std::vector<DeStrategy> strategies{DeStrategy::kRand1Bin, DeStrategy::kRand2Bin, DeStrategy::kCurrentToRand1};
  std::vector<DeParameters> parameters{{1.0, 0.1}, {1.0, 0.9}, {0.8, 0.2}};

  void validate() const;
};

/// True when no elite is feasible. Throws ConfigError on an empty list.
bool needs_repair(std::span<const Fitness> elites);

struct LocalIndividual {
  Index skeleton = 0;          // index of the source elite
  std::vector<double> flows;   // CF entries in GenomeLayout::charge_flow_positions order
  Fitness fitness;
};

/// Box for the flow vector: [0, FU_u^U] per slot.
struct FlowBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

FlowBounds flow_bounds(const Instance& instance);

/// Individual i takes the skeleton of elite i mod Z and fresh flows drawn
/// uniformly in [0, FU_u^U / MT_u]. Fitness is left unevaluated.
std::vector<LocalIndividual> init_local_population(const Instance& instance, Index elite_count, Index population_size,
                                                   Rng& rng);

/// One trial per configured strategy for individual `i`, each with a
/// parameter pair drawn uniformly from the pool. A component that leaves the
/// box is reset to the midpoint between the violated bound and the parent.
std::vector<std::vector<double>> code_generate_trials(Index i, const std::vector<LocalIndividual>& population,
                                                      const FlowBounds& bounds, const LocalStageConfig& config,
                                                      Rng& rng);

/// Writes `flows` into a copy of `skeleton` at `positions`
/// (GenomeLayout::charge_flow_positions).
Genome assemble_genome(const Genome& skeleton, std::span<const double> flows, std::span<const Index> positions);

struct LocalResult {
  Genome best;
  Fitness fitness;
  std::vector<TracePoint> trace;
  Index evaluations = 0;
};

/// Called after every generation with the population before and after
/// selection; used by tests.
using LocalObserver =
    std::function<void(const std::vector<LocalIndividual>& before, const std::vector<LocalIndividual>& after)>;

LocalResult run_local(const Instance& instance, std::span<const Genome> elites, const LocalStageConfig& config,
                      Rng& rng, const LocalObserver& observer = {});

}  // namespace crudesched
