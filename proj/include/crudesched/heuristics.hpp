#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crudesched/genome.hpp"
#include "crudesched/instance.hpp"
#include "crudesched/rng.hpp"

namespace crudesched {

// Knowledge-based initialization. Tank state is passed as flat contents
// arrays indexed [t * C + c] so the rules can be exercised without a full
// simulation.

/// R_{v,c,t}: size of the CP intersection over the unloading crude and the
/// crudes already in the tank.
Index similarity(const Instance& instance, Index crude, std::span<const double> tank_contents);

/// Rule I. Picks up to two receiving tanks for the remaining parcels of a
/// vessel (first parcel first). Tanks flagged in `excluded` are skipped, as
/// are tanks without headroom. The second tank is chosen after hypothetically
/// filling the first; none is chosen when the first absorbs the rest of the
/// cargo or the rate. Returns the tanks with their unload amounts.
std::vector<ReceiveDecision> select_receiving_tanks(const Instance& instance, std::span<const Parcel> remaining,
                                                    double unload_rate, std::span<const double> contents,
                                                    const std::vector<bool>& excluded);

/// Rule II weights over `eligible`: 1/|CP intersection| normalized to sum 1.
std::vector<double> charging_probabilities(const Instance& instance, std::span<const Index> eligible,
                                           std::span<const double> contents);

/// Roulette draw from a normalized weight vector; returns the position.
Index sample_index(std::span<const double> probabilities, Rng& rng);

/// One initialized genome, built period by period against the simulator so
/// each rule sees the tank state produced by the earlier periods.
Genome initialize_individual(const Instance& instance, Rng& rng);

/// M heuristic genomes; individual m uses its own rng stream.
std::vector<Genome> initialize_population(const Instance& instance, Index population_size, std::uint64_t seed);

/// M genomes drawn uniformly inside the genome bounds.
std::vector<Genome> random_population(const Instance& instance, Index population_size, std::uint64_t seed);

}  // namespace crudesched
