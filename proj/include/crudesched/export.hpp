#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crudesched/instance.hpp"
#include "crudesched/simulator.hpp"
#include "crudesched/solver.hpp"
#include "crudesched/stats.hpp"

namespace crudesched {

/// Long-format trajectory: `period,kind,entity,key,value`, one row per
/// quantity. Period 0 carries the initial state.
std::string trajectory_csv(const Instance& instance, const Trajectory& trajectory);

/// Same rows as trajectory_csv as a JSON array of objects.
std::string trajectory_json(const Instance& instance, const Trajectory& trajectory);

/// `stage,generation,best_cvn,best_cv,best_objective,evaluations`.
std::string trace_csv(const std::vector<TraceRow>& trace);

/// Run summary. Deterministic: wall time is not included.
std::string report_json(const Instance& instance, const RunReport& report, const Trajectory& trajectory);

/// Chart model shared by the JSON export and the SVG renderer. Periods are
/// one-based and intervals inclusive.
struct GanttChart {
  struct Bar {
    std::string row;    // tank or CDU name
    std::string label;  // vessel, CDU or residue name
    std::string kind;   // "receive", "charge" or "mode"
    Index start = 0;
    Index end = 0;
    double mass = 0.0;
  };
  struct Marker {
    std::string cdu;
    Index period = 0;
  };

  Index periods = 0;
  std::vector<std::string> tanks;
  std::vector<std::string> cdus;
  std::vector<Bar> bars;
  std::vector<Marker> changeovers;
};

/// Builds the chart from a trajectory; consecutive periods with the same
/// tank/partner pair are merged into one bar.
GanttChart gantt_from_trajectory(const Instance& instance, const Trajectory& trajectory);

std::string gantt_to_json(const GanttChart& chart);

/// Throws ParseError on malformed input.
GanttChart parse_gantt(const std::string& text);

/// Static SVG: one row per tank, then one row per CDU; changeovers are
/// drawn on the CDU rows as elements with class "changeover".
std::string render_gantt_svg(const GanttChart& chart);

struct BenchRow {
  std::string variant;
  AggregateStats stats;
};

std::string bench_table_csv(const std::vector<BenchRow>& rows);
std::string bench_table_json(const std::vector<BenchRow>& rows, const std::vector<RunReport>& runs);

}  // namespace crudesched
