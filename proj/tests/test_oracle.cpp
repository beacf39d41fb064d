#include <gtest/gtest.h>

#include <cmath>

#include "crudesched/genome.hpp"
#include "crudesched/heuristics.hpp"
#include "crudesched/oracle.hpp"
#include "crudesched/rng.hpp"
#include "crudesched/simulator.hpp"
#include "crudesched/solver.hpp"
#include "fixtures.hpp"

using namespace crudesched;
using crudesched::testing::small_instance;
using crudesched::testing::refinery4_cut;

TEST(OracleSpace, ClosedFormSize) {
  // Two tanks, MT 2, grid 3: 1 + 2*3 + 1*9 = 16 choices per period.
  EXPECT_DOUBLE_EQ(oracle_space_size(small_instance(2, 2), 3), 256.0);
  // Four tanks: 1 + 4*3 + 6*9 = 67.
  EXPECT_DOUBLE_EQ(oracle_space_size(refinery4_cut(2), 3), 67.0 * 67.0);
  // The full four-tank instance adds 1 + 16 receipt options in periods 3-6.
  EXPECT_DOUBLE_EQ(oracle_space_size(crudesched::testing::refinery4(), 1), std::pow(11.0, 6) * std::pow(17.0, 4));
}

TEST(OracleSpace, EnumerationVisitsEverySchedule) {
  const Instance inst = small_instance(2, 2);
  Index visited = 0;
  enumerate_schedules(inst, {}, [&](const Schedule& s) {
    ASSERT_EQ(s.size(), 2u);
    ++visited;
  });
  EXPECT_EQ(visited, 256u);
}

TEST(OracleSpace, GuardRefusesLargeSpaces) {
  OracleConfig c;
  c.guard = 100.0;
  EXPECT_THROW(oracle_enumerate(small_instance(2, 2), c), GuardExceeded);
}

// The reference checker and the simulator are written independently; they
// must agree on every schedule of the tiny spaces.
TEST(ReferenceCheck, AgreesWithSimulatorOnEnumeratedSpaces) {
  for (const Instance& inst : {small_instance(2, 2), small_instance(3, 2, 2, true), refinery4_cut(2)}) {
    Index feasible = 0;
    enumerate_schedules(inst, {}, [&](const Schedule& s) {
      const Trajectory t = simulate(inst, s);
      const ReferenceVerdict v = reference_check(inst, s);
      ASSERT_EQ(v.feasible, t.violations.empty());
      if (v.feasible) {
        ASSERT_EQ(v.changeovers, t.changeovers);
        ++feasible;
      }
    });
    EXPECT_GT(feasible, 0u) << inst.name;
  }
}

TEST(ReferenceCheck, AgreesWithSimulatorOnRandomGenomes) {
  const Instance inst = crudesched::testing::refinery4();
  const GenomeBounds b = genome_bounds(inst);
  Rng rng(13);
  auto check = [&](const Genome& g) {
    const Schedule s = decode_genome(g, inst);
    const Trajectory t = simulate(inst, s);
    const ReferenceVerdict v = reference_check(inst, s);
    ASSERT_EQ(v.feasible, t.violations.empty());
    ASSERT_EQ(v.changeovers, t.changeovers);
  };
  for (int i = 0; i < 300; ++i) {
    Genome g(b.lower.size());
    for (Index d = 0; d < g.size(); ++d) g[d] = rng.uniform(b.lower[d], b.upper[d]);
    check(g);
  }
  for (const auto& g : initialize_population(inst, 100, 4)) check(g);
  check(encode_schedule(crudesched::testing::refinery4_schedule(inst), inst));
}

TEST(ReferenceCheck, ReferenceScheduleFeasible) {
  const Instance inst = crudesched::testing::refinery4();
  const ReferenceVerdict v = reference_check(inst, crudesched::testing::refinery4_schedule(inst));
  EXPECT_TRUE(v.feasible);
  EXPECT_EQ(v.changeovers, 2u);
}

TEST(OracleEnumerate, BestIsMinimalAndFeasible) {
  const Instance inst = refinery4_cut(2);
  OracleConfig c;
  c.collect_feasible = true;
  const OracleResult r = oracle_enumerate(inst, c);
  EXPECT_EQ(r.enumerated, 67u * 67u);
  ASSERT_TRUE(r.best.has_value());
  EXPECT_EQ(r.feasible.size(), r.feasible_count);
  for (const auto& s : r.feasible) EXPECT_GE(simulate(inst, s).changeovers, *r.best_changeovers);
  EXPECT_TRUE(simulate(inst, *r.best).violations.empty());
}

TEST(OracleEnumerate, SolverMatchesOptimum) {
  const Instance inst = refinery4_cut(3);
  const OracleResult r = oracle_enumerate(inst, {});
  ASSERT_TRUE(r.best_changeovers.has_value());
  SolverConfig c;
  c.seed = 2;
  c.global.swarm_size = 40;
  c.global.max_evaluations = 8000;
  c.local.population_size = 20;
  c.local.max_evaluations = 3000;
  const RunReport rep = solve(inst, c);
  EXPECT_TRUE(rep.feasible());
  EXPECT_LE(rep.fitness.objective, static_cast<double>(*r.best_changeovers) * inst.changeover_cost);
}

TEST(OracleEnumerate, ImpossiblePropertyBoundsGiveEmptySet) {
  Instance inst = small_instance(2, 2);
  inst.cdus[0].property_bounds[0] = {5.0, 6.0};  // both crudes are far lighter
  finalize_instance(inst);
  OracleConfig c;
  c.collect_feasible = true;
  const OracleResult r = oracle_enumerate(inst, c);
  EXPECT_EQ(r.feasible_count, 0u);
  EXPECT_TRUE(r.feasible.empty());
  EXPECT_FALSE(r.best.has_value());
}

TEST(OracleEnumerate, Refinery4TwoPeriodsCoarseGrid) {
  OracleConfig c;
  c.flow_grid = 2;
  const OracleResult r = oracle_enumerate(refinery4_cut(2), c);
  ASSERT_TRUE(r.best_changeovers.has_value());
  EXPECT_LE(*r.best_changeovers, 2u);
}
