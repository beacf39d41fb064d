#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "crudesched/genome.hpp"
#include "crudesched/instance.hpp"

namespace crudesched {

// Brute-force verification on tiny instances. The feasibility check here is
// written separately from the simulator and shares no code with it, so the
// two can be cross-checked schedule by schedule.

class GuardExceeded : public std::runtime_error {
 public:
  GuardExceeded(double size, double guard);
  double size() const { return size_; }

 private:
  double size_;
};

struct OracleConfig {
  Index flow_grid = 3;       // charge flows FU^U * k / G for k = 1..G
  double guard = 1e7;        // refuse spaces larger than this
  bool collect_feasible = false;
};

struct ReferenceVerdict {
  bool feasible = false;
  Index violations = 0;
  Index changeovers = 0;
};

/// Independent re-statement of the scheduling rules for one schedule.
ReferenceVerdict reference_check(const Instance& instance, const Schedule& schedule);

/// Number of schedules the enumeration visits. Per period and arrived
/// vessel: no receipt, one tank, or an ordered pair of distinct tanks.
/// Per period and CDU: a set of at most MT_u distinct tanks, each with one
/// grid flow.
double oracle_space_size(const Instance& instance, Index flow_grid);

/// Visits every schedule in the space. Throws GuardExceeded first when the
/// space is larger than `config.guard`.
void enumerate_schedules(const Instance& instance, const OracleConfig& config,
                         const std::function<void(const Schedule&)>& visit);

struct OracleResult {
  Index enumerated = 0;
  Index feasible_count = 0;
  std::optional<Schedule> best;     // fewest changeovers; first found on ties
  std::optional<Index> best_changeovers;
  std::vector<Schedule> feasible;  // filled when collect_feasible is set
};

OracleResult oracle_enumerate(const Instance& instance, const OracleConfig& config);

}  // namespace crudesched
