#pragma once

#include <optional>
#include <span>

#include "crudesched/simulator.hpp"

namespace crudesched {

/// Summary over independent runs. Mean and sample standard deviation
/// (n - 1 denominator) are taken over the feasible runs only; a single
/// feasible run has std 0 and no feasible run leaves both empty.
struct AggregateStats {
  Index runs = 0;
  Index feasible_runs = 0;
  double feasible_rate = 0.0;
  std::optional<double> mean;
  std::optional<double> std_dev;
};

AggregateStats aggregate(std::span<const Fitness> best_per_run);

}  // namespace crudesched
