#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crudesched/genome.hpp"
#include "crudesched/global_search.hpp"
#include "crudesched/local_refinement.hpp"

namespace crudesched {

/// dsea-hr: heuristic init, swarm stage, repair stage.
/// v1: uniform init, swarm stage, repair stage.
/// v2: heuristic init, swarm stage only.
/// cso-only: uniform init, swarm stage only.
enum class Variant { kDseaHr, kV1, kV2, kCsoOnly };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
bool uses_heuristic_init(Variant v);
bool uses_local_stage(Variant v);

struct SolverConfig {
  Variant variant = Variant::kDseaHr;
  std::uint64_t seed = 1;
  GlobalStageConfig global;
  LocalStageConfig local;
};

struct TraceRow {
  std::string stage;  // "global" or "local"
  TracePoint point;
};

struct RunReport {
  Variant variant = Variant::kDseaHr;
  std::uint64_t seed = 0;
  Genome best;
  Fitness fitness;
  Index global_evaluations = 0;
  Index local_evaluations = 0;
  bool local_stage_ran = false;
  std::vector<TraceRow> trace;
  double wall_seconds = 0.0;  // console only; never written to report files

  bool feasible() const { return fitness.feasible(); }
};

RunReport solve(const Instance& instance, const SolverConfig& config);

}  // namespace crudesched
