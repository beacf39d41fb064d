#include "crudesched/stats.hpp"

#include <cmath>
#include <vector>

namespace crudesched {

AggregateStats aggregate(std::span<const Fitness> best_per_run) {
  AggregateStats s;
  s.runs = best_per_run.size();
  std::vector<double> values;
  for (const auto& f : best_per_run) {
    if (f.feasible()) values.push_back(f.objective);
  }
  s.feasible_runs = values.size();
  s.feasible_rate = s.runs == 0 ? 0.0 : static_cast<double>(s.feasible_runs) / static_cast<double>(s.runs);
  if (values.empty()) return s;

  double sum = 0.0;
  for (double x : values) sum += x;
  const double mean = sum / static_cast<double>(values.size());
  s.mean = mean;
  if (values.size() == 1) {
    s.std_dev = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  s.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

}  // namespace crudesched
