#include "crudesched/local_refinement.hpp"

#include <algorithm>
#include <optional>

#include <fmt/format.h>

namespace crudesched {

void LocalStageConfig::validate() const {
  if (population_size < 4) throw ConfigError(fmt::format("local population must be at least 4, got {}", population_size));
  if (strategies.empty()) throw ConfigError("strategy pool is empty");
  if (parameters.empty()) throw ConfigError("parameter pool is empty");
  if (max_evaluations < population_size) {
    throw ConfigError(fmt::format("local budget {} is below the population size {}", max_evaluations, population_size));
  }
}

bool needs_repair(std::span<const Fitness> elites) {
  if (elites.empty()) throw ConfigError("no elites to refine");
  return std::none_of(elites.begin(), elites.end(), [](const Fitness& f) { return f.feasible(); });
}

FlowBounds flow_bounds(const Instance& instance) {
  FlowBounds b;
  for (Index n = 0; n < instance.horizon; ++n) {
    for (const auto& cdu : instance.cdus) {
      for (Index j = 0; j < cdu.max_charging_tanks; ++j) {
        b.lower.push_back(0.0);
        b.upper.push_back(cdu.feed.hi);
      }
    }
  }
  return b;
}

std::vector<LocalIndividual> init_local_population(const Instance& instance, Index elite_count, Index population_size,
                                                   Rng& rng) {
  std::vector<double> init_hi;
  for (Index n = 0; n < instance.horizon; ++n) {
    for (const auto& cdu : instance.cdus) {
      for (Index j = 0; j < cdu.max_charging_tanks; ++j) {
        init_hi.push_back(cdu.feed.hi / static_cast<double>(cdu.max_charging_tanks));
      }
    }
  }
  std::vector<LocalIndividual> pop(population_size);
  for (Index i = 0; i < population_size; ++i) {
    pop[i].skeleton = i % elite_count;
    pop[i].flows.resize(init_hi.size());
    for (Index d = 0; d < init_hi.size(); ++d) pop[i].flows[d] = rng.uniform(0.0, init_hi[d]);
  }
  return pop;
}

namespace {

// Distinct indices from [0, H) other than `exclude`. Falls back to drawing
// with replacement when the population is too small.
std::vector<Index> pick_others(Index H, Index exclude, Index count, Rng& rng) {
  std::vector<Index> out;
  out.reserve(count);
  const bool distinct = H - 1 >= count;
  while (out.size() < count) {
    const Index r = rng.below(H);
    if (r == exclude) continue;
    if (distinct && std::find(out.begin(), out.end(), r) != out.end()) continue;
    out.push_back(r);
  }
  return out;
}

void repair_bounds(std::vector<double>& trial, const std::vector<double>& parent, const FlowBounds& b) {
  for (Index d = 0; d < trial.size(); ++d) {
    if (trial[d] < b.lower[d]) {
      trial[d] = 0.5 * (b.lower[d] + parent[d]);
    } else if (trial[d] > b.upper[d]) {
      trial[d] = 0.5 * (b.upper[d] + parent[d]);
    }
  }
}

}  // namespace

std::vector<std::vector<double>> code_generate_trials(Index i, const std::vector<LocalIndividual>& population,
                                                      const FlowBounds& bounds, const LocalStageConfig& config,
                                                      Rng& rng) {
  const Index H = population.size();
  const auto& x = population[i].flows;
  const Index D = x.size();
  std::vector<std::vector<double>> trials;
  trials.reserve(config.strategies.size());
  for (const DeStrategy strategy : config.strategies) {
    const DeParameters p = config.parameters[rng.below(config.parameters.size())];
    std::vector<double> trial(D);
    switch (strategy) {
      case DeStrategy::kRand1Bin:
      case DeStrategy::kRand2Bin: {
        const bool two = strategy == DeStrategy::kRand2Bin;
        const auto r = pick_others(H, i, two ? 5 : 3, rng);
        const auto& a = population[r[0]].flows;
        const auto& b = population[r[1]].flows;
        const auto& c = population[r[2]].flows;
        const Index jrand = D > 0 ? rng.below(D) : 0;
        for (Index d = 0; d < D; ++d) {
          const bool cross = rng.uniform() < p.crossover || d == jrand;
          if (!cross) {
            trial[d] = x[d];
            continue;
          }
          double v = a[d] + p.scale * (b[d] - c[d]);
          if (two) v += p.scale * (population[r[3]].flows[d] - population[r[4]].flows[d]);
          trial[d] = v;
        }
        break;
      }
      case DeStrategy::kCurrentToRand1: {
        const auto r = pick_others(H, i, 3, rng);
        const auto& a = population[r[0]].flows;
        const auto& b = population[r[1]].flows;
        const auto& c = population[r[2]].flows;
        const double k = rng.uniform();
        for (Index d = 0; d < D; ++d) trial[d] = x[d] + k * (a[d] - x[d]) + p.scale * (b[d] - c[d]);
        break;
      }
    }
    repair_bounds(trial, x, bounds);
    trials.push_back(std::move(trial));
  }
  return trials;
}

Genome assemble_genome(const Genome& skeleton, std::span<const double> flows, std::span<const Index> positions) {
  Genome g = skeleton;
  for (Index d = 0; d < positions.size(); ++d) g[positions[d]] = flows[d];
  return g;
}

LocalResult run_local(const Instance& instance, std::span<const Genome> elites, const LocalStageConfig& config,
                      Rng& rng, const LocalObserver& observer) {
  config.validate();
  if (elites.empty()) throw ConfigError("no elites to refine");
  const auto positions = GenomeLayout(instance).charge_flow_positions();
  const FlowBounds bounds = flow_bounds(instance);
  Evaluator evaluator(instance);
  const auto eval = [&](const LocalIndividual& ind) {
    return evaluator(assemble_genome(elites[ind.skeleton], ind.flows, positions));
  };

  auto pop = init_local_population(instance, elites.size(), config.population_size, rng);
  for (auto& ind : pop) ind.fitness = eval(ind);

  const auto best_of = [&]() {
    Index b = 0;
    for (Index i = 1; i < pop.size(); ++i) {
      if (better(pop[i].fitness, pop[b].fitness)) b = i;
    }
    return b;
  };

  LocalResult result;
  result.trace.push_back({0, pop[best_of()].fitness, evaluator.count()});
  const Index batch = config.population_size * config.strategies.size();
  for (Index gen = 1; evaluator.count() + batch <= config.max_evaluations; ++gen) {
    std::vector<LocalIndividual> next = pop;
    for (Index i = 0; i < pop.size(); ++i) {
      auto trials = code_generate_trials(i, pop, bounds, config, rng);
      std::optional<LocalIndividual> champion;
      for (auto& t : trials) {
        LocalIndividual cand{pop[i].skeleton, std::move(t), {}};
        cand.fitness = eval(cand);
        if (!champion || better(cand.fitness, champion->fitness)) champion = std::move(cand);
      }
      if (champion && better(champion->fitness, pop[i].fitness)) next[i] = std::move(*champion);
    }
    if (observer) observer(pop, next);
    pop = std::move(next);
    result.trace.push_back({gen, pop[best_of()].fitness, evaluator.count()});
  }

  const Index b = best_of();
  result.best = assemble_genome(elites[pop[b].skeleton], pop[b].flows, positions);
  result.fitness = pop[b].fitness;
  result.evaluations = evaluator.count();
  return result;
}

}  // namespace crudesched
