#include "crudesched/global_search.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace crudesched {

std::weak_ordering compare_fitness(const Fitness& a, const Fitness& b) {
  if (a.cvn != b.cvn) return a.cvn < b.cvn ? std::weak_ordering::less : std::weak_ordering::greater;
  if (a.cv != b.cv) return a.cv < b.cv ? std::weak_ordering::less : std::weak_ordering::greater;
  if (a.objective != b.objective) {
    return a.objective < b.objective ? std::weak_ordering::less : std::weak_ordering::greater;
  }
  return std::weak_ordering::equivalent;
}

void GlobalStageConfig::validate() const {
  if (swarm_size < 2 || swarm_size % 2 != 0) {
    throw ConfigError(fmt::format("swarm size must be even and at least 2, got {}", swarm_size));
  }
  if (max_evaluations < swarm_size) {
    throw ConfigError(fmt::format("global budget {} is below the swarm size {}", max_evaluations, swarm_size));
  }
  if (elite_count < 1 || elite_count > swarm_size) {
    throw ConfigError(fmt::format("elite count must be in [1, {}], got {}", swarm_size, elite_count));
  }
}

void update_loser(Particle& loser, const Particle& winner, std::span<const double> mean, double phi,
                  std::span<const double> r1, std::span<const double> r2, std::span<const double> r3,
                  const GenomeBounds& bounds) {
  auto& x = loser.position;
  auto& v = loser.velocity;
  for (Index i = 0; i < x.size(); ++i) {
    double vi = r1[i] * v[i] + r2[i] * (winner.position[i] - x[i]);
    if (phi != 0.0) vi += phi * r3[i] * (mean[i] - x[i]);
    const double xi = x[i] + vi;
    const double clamped = bounds.clamp(i, xi);
    v[i] = clamped == xi ? vi : 0.0;
    x[i] = clamped;
  }
}

std::vector<Competition> cso_pairwise_step(std::vector<Particle>& swarm, Rng& rng, const GlobalStageConfig& config,
                                           const GenomeBounds& bounds, Evaluator& evaluator) {
  const Index M = swarm.size();
  const Index D = bounds.lower.size();
  std::vector<double> mean(D, 0.0);
  if (config.phi != 0.0) {
    for (const auto& p : swarm) {
      for (Index i = 0; i < D; ++i) mean[i] += p.position[i];
    }
    for (double& m : mean) m /= static_cast<double>(M);
  }

  std::vector<Index> order(M);
  std::iota(order.begin(), order.end(), Index{0});
  rng.shuffle(std::span<Index>(order));

  std::vector<Competition> out;
  out.reserve(M / 2);
  std::vector<double> r1(D), r2(D), r3(D);
  for (Index k = 0; k + 1 < M; k += 2) {
    const Index a = order[k];
    const Index b = order[k + 1];
    const Competition c = better(swarm[a].fitness, swarm[b].fitness) ? Competition{a, b} : Competition{b, a};
    for (Index i = 0; i < D; ++i) r1[i] = rng.uniform();
    for (Index i = 0; i < D; ++i) r2[i] = rng.uniform();
    if (config.phi != 0.0) {
      for (Index i = 0; i < D; ++i) r3[i] = rng.uniform();
    }
    update_loser(swarm[c.loser], swarm[c.winner], mean, config.phi, r1, r2, r3, bounds);
    out.push_back(c);
  }
  for (const auto& c : out) swarm[c.loser].fitness = evaluator(swarm[c.loser].position);
  return out;
}

std::vector<Index> rank_by_fitness(std::span<const Fitness> fitness) {
  std::vector<Index> idx(fitness.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return better(fitness[a], fitness[b]); });
  return idx;
}

namespace {

Fitness swarm_best(const std::vector<Particle>& swarm) {
  Fitness best = swarm.front().fitness;
  for (const auto& p : swarm) {
    if (better(p.fitness, best)) best = p.fitness;
  }
  return best;
}

}  // namespace

GlobalResult run_global(const Instance& instance, std::vector<Genome> initial, const GlobalStageConfig& config,
                        Rng& rng, const GenerationObserver& observer) {
  config.validate();
  if (initial.size() != config.swarm_size) {
    throw ConfigError(fmt::format("initial swarm has {} genomes, expected {}", initial.size(), config.swarm_size));
  }
  const GenomeBounds bounds = genome_bounds(instance);
  Evaluator evaluator(instance);
  std::vector<Particle> swarm;
  swarm.reserve(initial.size());
  for (auto& g : initial) {
    for (Index i = 0; i < g.size(); ++i) g[i] = bounds.clamp(i, g[i]);
    Particle p{std::move(g), Genome(bounds.lower.size(), 0.0), {}};
    p.fitness = evaluator(p.position);
    swarm.push_back(std::move(p));
  }

  GlobalResult result;
  Fitness best = swarm_best(swarm);
  result.trace.push_back({0, best, evaluator.count()});
  const Index batch = config.swarm_size / 2;
  for (Index gen = 1; evaluator.count() + batch <= config.max_evaluations; ++gen) {
    if (observer) {
      const std::vector<Particle> before = swarm;
      const auto comps = cso_pairwise_step(swarm, rng, config, bounds, evaluator);
      observer(before, swarm, comps);
    } else {
      cso_pairwise_step(swarm, rng, config, bounds, evaluator);
    }
    const Fitness now = swarm_best(swarm);
    if (better(now, best)) best = now;
    result.trace.push_back({gen, best, evaluator.count()});
  }

  std::vector<Fitness> fit;
  fit.reserve(swarm.size());
  for (const auto& p : swarm) fit.push_back(p.fitness);
  const auto ranked = rank_by_fitness(fit);
  const Index z = std::min(config.elite_count, swarm.size());
  for (Index k = 0; k < z; ++k) result.elites.push_back(swarm[ranked[k]]);
  result.evaluations = evaluator.count();
  return result;
}

}  // namespace crudesched
