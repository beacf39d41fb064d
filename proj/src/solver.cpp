#include "crudesched/solver.hpp"

#include <chrono>

#include "crudesched/heuristics.hpp"

namespace crudesched {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kDseaHr: return "dsea-hr";
    case Variant::kV1: return "v1";
    case Variant::kV2: return "v2";
    case Variant::kCsoOnly: return "cso-only";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::kDseaHr, Variant::kV1, Variant::kV2, Variant::kCsoOnly}) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

bool uses_heuristic_init(Variant v) { return v == Variant::kDseaHr || v == Variant::kV2; }
bool uses_local_stage(Variant v) { return v == Variant::kDseaHr || v == Variant::kV1; }

RunReport solve(const Instance& instance, const SolverConfig& config) {
  config.global.validate();
  if (uses_local_stage(config.variant)) config.local.validate();
  const auto start = std::chrono::steady_clock::now();

  RunReport report;
  report.variant = config.variant;
  report.seed = config.seed;

  auto initial = uses_heuristic_init(config.variant)
                     ? initialize_population(instance, config.global.swarm_size, config.seed)
                     : random_population(instance, config.global.swarm_size, config.seed);
  Rng global_rng = Rng::stream(config.seed, Stream::kGlobal);
  GlobalResult global = run_global(instance, std::move(initial), config.global, global_rng);
  report.global_evaluations = global.evaluations;
  for (const auto& p : global.trace) report.trace.push_back({"global", p});

  report.best = global.elites.front().position;
  report.fitness = global.elites.front().fitness;

  std::vector<Fitness> elite_fitness;
  for (const auto& e : global.elites) elite_fitness.push_back(e.fitness);
  if (uses_local_stage(config.variant) && needs_repair(elite_fitness)) {
    std::vector<Genome> skeletons;
    for (const auto& e : global.elites) skeletons.push_back(e.position);
    Rng local_rng = Rng::stream(config.seed, Stream::kLocal);
    LocalResult local = run_local(instance, skeletons, config.local, local_rng);
    report.local_stage_ran = true;
    report.local_evaluations = local.evaluations;
    for (const auto& p : local.trace) report.trace.push_back({"local", p});
    if (better(local.fitness, report.fitness)) {
      report.best = std::move(local.best);
      report.fitness = local.fitness;
    }
  }

  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace crudesched
