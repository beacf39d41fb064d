#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "crudesched/genome.hpp"
#include "crudesched/instance.hpp"
#include "crudesched/rng.hpp"
#include "crudesched/simulator.hpp"

namespace crudesched {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Feasibility rule: lower CVN first, then lower CV, then lower objective.
/// `less` means `a` is the better solution.
std::weak_ordering compare_fitness(const Fitness& a, const Fitness& b);

inline bool better(const Fitness& a, const Fitness& b) { return compare_fitness(a, b) < 0; }

/// Counts every simulator call so stage budgets can be audited.
class Evaluator {
 public:
  explicit Evaluator(const Instance& instance) : instance_(&instance) {}

  Fitness operator()(std::span<const double> genome) {
    ++count_;
    return evaluate(*instance_, genome);
  }
  Index count() const { return count_; }

 private:
  const Instance* instance_;
  Index count_ = 0;
};

struct GlobalStageConfig {
  Index swarm_size = 100;
  double phi = 0.0;
  Index max_evaluations = 100000;
  Index elite_count = 10;

  void validate() const;
};

struct Particle {
  Genome position;
  Genome velocity;
  Fitness fitness;
};

struct Competition {
  Index winner = 0;
  Index loser = 0;
};

struct TracePoint {
  Index generation = 0;
  Fitness best;
  Index evaluations = 0;  // cumulative within the stage
};

/// Loser update with explicit random vectors:
///   V' = R1*V + R2*(Xw - Xl) + phi*R3*(mean - Xl),  X' = Xl + V'
/// followed by clamping to `bounds`; a clamped dimension gets zero velocity.
void update_loser(Particle& loser, const Particle& winner, std::span<const double> mean, double phi,
                  std::span<const double> r1, std::span<const double> r2, std::span<const double> r3,
                  const GenomeBounds& bounds);

/// One generation: random pairing, one competition per pair (ties go to the
/// second particle of the pair), loser update and re-evaluation. The swarm
/// mean is taken once before any update. Returns the competitions held.
std::vector<Competition> cso_pairwise_step(std::vector<Particle>& swarm, Rng& rng, const GlobalStageConfig& config,
                                           const GenomeBounds& bounds, Evaluator& evaluator);

/// Called after every generation; used by tests to instrument a run.
using GenerationObserver =
    std::function<void(const std::vector<Particle>& before, const std::vector<Particle>& after,
                       std::span<const Competition> competitions)>;

struct GlobalResult {
  std::vector<Particle> elites;  // best first
  std::vector<TracePoint> trace;
  Index evaluations = 0;
};

/// Evaluates `initial` and runs generations while a full generation still
/// fits in the budget.
GlobalResult run_global(const Instance& instance, std::vector<Genome> initial, const GlobalStageConfig& config,
                        Rng& rng, const GenerationObserver& observer = {});

/// Indices of `fitness` sorted best first; ties keep index order.
std::vector<Index> rank_by_fitness(std::span<const Fitness> fitness);

}  // namespace crudesched
