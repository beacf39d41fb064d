#include <gtest/gtest.h>

#include <json.hpp>

#include "crudesched/export.hpp"
#include "crudesched/instance_io.hpp"
#include "crudesched/simulator.hpp"
#include "fixtures.hpp"

using namespace crudesched;

namespace {

Index count_occurrences(const std::string& text, const std::string& needle) {
  Index n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

struct Reference {
  Instance inst = crudesched::testing::refinery4();
  Trajectory traj = simulate(inst, crudesched::testing::refinery4_schedule(inst));
};

}  // namespace

TEST(TrajectoryCsv, HeaderAndInitialState) {
  const Reference ref;
  const std::string csv = trajectory_csv(ref.inst, ref.traj);
  EXPECT_EQ(csv.rfind("period,kind,entity,key,value\n", 0), 0u);
  EXPECT_NE(csv.find("0,tank,T1,C3,50\n"), std::string::npos);
  EXPECT_NE(csv.find("0,residue,R1,inventory,20\n"), std::string::npos);
  EXPECT_NE(csv.find("3,unload,V1>T3,C2,60\n"), std::string::npos);
  EXPECT_NE(csv.find("1,cdu,CDU1,feed,9\n"), std::string::npos);
  EXPECT_EQ(count_occurrences(csv, ",changeover,CDU1,flag,1\n"), 2u);
}

TEST(TrajectoryJson, SameRowsAsCsv) {
  const Reference ref;
  const std::string csv = trajectory_csv(ref.inst, ref.traj);
  const auto doc = nlohmann::json::parse(trajectory_json(ref.inst, ref.traj));
  EXPECT_EQ(doc.at("rows").size() + 1, count_occurrences(csv, "\n"));
}

TEST(Report, DeterministicAndWithoutWallTime) {
  const Reference ref;
  RunReport rep;
  rep.seed = 3;
  rep.best = encode_schedule(crudesched::testing::refinery4_schedule(ref.inst), ref.inst);
  rep.fitness = evaluate(ref.inst, rep.best);
  rep.wall_seconds = 1.5;
  const std::string a = report_json(ref.inst, rep, ref.traj);
  rep.wall_seconds = 99.0;
  EXPECT_EQ(a, report_json(ref.inst, rep, ref.traj));
  const auto doc = nlohmann::json::parse(a);
  EXPECT_EQ(doc.at("changeovers"), 2);
  EXPECT_EQ(doc.at("feasible"), true);
  EXPECT_TRUE(doc.at("violations").empty());
}

TEST(TraceCsv, OneRowPerPoint) {
  const std::vector<TraceRow> rows{{"global", {0, {1, 0.5, 0.0}, 100}}, {"local", {1, {0, 0.0, 3.0}, 60}}};
  const std::string csv = trace_csv(rows);
  EXPECT_EQ(csv.rfind("stage,generation,best_cvn,best_cv,best_objective,evaluations\n", 0), 0u);
  EXPECT_NE(csv.find("local,1,0,0,3,60\n"), std::string::npos);
}

TEST(Gantt, MergesConsecutivePeriods) {
  const Reference ref;
  const GanttChart chart = gantt_from_trajectory(ref.inst, ref.traj);
  EXPECT_EQ(chart.periods, 6u);
  EXPECT_EQ(chart.changeovers.size(), 2u);
  Index charge_bars = 0;
  for (const auto& b : chart.bars) {
    if (b.kind != "charge") continue;
    ++charge_bars;
    if (b.row == "T2") {
      EXPECT_EQ(b.start, 1u);
      EXPECT_EQ(b.end, 4u);
      EXPECT_DOUBLE_EQ(b.mass, 20.0);
    }
  }
  // T1 twice (P1-2, P5-6), T2 once (P1-4), T4 once, T3 once.
  EXPECT_EQ(charge_bars, 5u);
}

TEST(Gantt, JsonRoundTripAndSvgMarkers) {
  const Reference ref;
  const GanttChart chart = gantt_from_trajectory(ref.inst, ref.traj);
  const std::string json = gantt_to_json(chart);
  EXPECT_EQ(gantt_to_json(parse_gantt(json)), json);
  const std::string svg = render_gantt_svg(parse_gantt(json));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count_occurrences(svg, "class=\"changeover\""), 2u);
}

TEST(Gantt, MalformedInputThrows) {
  EXPECT_THROW(parse_gantt("{}"), ParseError);
  EXPECT_THROW(parse_gantt("not json"), ParseError);
  EXPECT_THROW(
      parse_gantt(R"({"periods":2,"tanks":["T1"],"cdus":[],"bars":[{"row":"T1","label":"x","kind":"charge",)"
                  R"("start":1,"end":3,"mass":1}],"changeovers":[]})"),
      ParseError);
}

TEST(Bench, CsvTable) {
  const std::vector<Fitness> runs{{0, 0.0, 2.0}, {0, 0.0, 4.0}};
  const std::vector<BenchRow> rows{{"dsea-hr", aggregate(runs)}, {"v2", aggregate(std::vector<Fitness>{{1, 1.0, 0.0}})}};
  const std::string csv = bench_table_csv(rows);
  EXPECT_EQ(csv.rfind("variant,runs,feasible_runs,fr,mean,std\n", 0), 0u);
  EXPECT_NE(csv.find("dsea-hr,2,2,1,3,1.4142135623730951\n"), std::string::npos);
  EXPECT_NE(csv.find("v2,1,0,0,,\n"), std::string::npos);
}

TEST(Bench, JsonCarriesRuns) {
  RunReport r;
  r.variant = Variant::kV1;
  r.seed = 4;
  r.fitness = {0, 0.0, 3.0};
  const std::vector<BenchRow> rows{{"v1", aggregate(std::vector<Fitness>{r.fitness})}};
  const auto doc = nlohmann::json::parse(bench_table_json(rows, {r}));
  EXPECT_EQ(doc.at("summary").at(0).at("variant"), "v1");
  EXPECT_EQ(doc.at("runs").at(0).at("seed"), 4);
  EXPECT_EQ(doc.at("runs").at(0).at("feasible"), true);
}

TEST(Gantt, EmptyChartDrawsAxesOnly) {
  GanttChart chart;
  chart.periods = 3;
  chart.tanks = {"T1", "T2"};
  chart.cdus = {"CDU1"};
  const std::string svg = render_gantt_svg(chart);
  EXPECT_EQ(count_occurrences(svg, "class=\"grid\""), 4u + 3u);
  EXPECT_EQ(count_occurrences(svg, "class=\"changeover\""), 0u);
  EXPECT_EQ(count_occurrences(svg, "class=\"charge\""), 0u);
  EXPECT_EQ(svg, render_gantt_svg(parse_gantt(gantt_to_json(chart))));
}

TEST(ScheduleCsv, OneRowPerTank) {
  const Reference ref;
  const std::string csv = schedule_to_csv(crudesched::testing::refinery4_schedule(ref.inst), ref.inst);
  EXPECT_EQ(csv.rfind("period,action,unit,tank,amount\n", 0), 0u);
  EXPECT_NE(csv.find("3,receive,V1,T3,60\n"), std::string::npos);
  EXPECT_NE(csv.find("5,charge,CDU1,T3,7\n"), std::string::npos);
  EXPECT_EQ(count_occurrences(csv, "\n"), 1u + 1u + 12u);
}
