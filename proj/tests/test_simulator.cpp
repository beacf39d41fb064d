#include <gtest/gtest.h>

#include <cmath>

#include "crudesched/genome.hpp"
#include "crudesched/heuristics.hpp"
#include "crudesched/rng.hpp"
#include "crudesched/simulator.hpp"
#include "fixtures.hpp"

using namespace crudesched;
using crudesched::testing::charge_only;
using crudesched::testing::small_instance;

namespace {

Index count_kind(const Trajectory& t, ConstraintKind kind) {
  Index n = 0;
  for (const auto& v : t.violations) n += v.kind == kind ? 1 : 0;
  return n;
}

const Violation* find_kind(const Trajectory& t, ConstraintKind kind) {
  for (const auto& v : t.violations) {
    if (v.kind == kind) return &v;
  }
  return nullptr;
}

}  // namespace

TEST(Withdrawal, ProportionalToContents) {
  const std::vector<double> contents{30.0, 10.0};
  const Withdrawal w = proportional_withdrawal(contents, 4.0);
  EXPECT_DOUBLE_EQ(w.by_crude[0], 3.0);
  EXPECT_DOUBLE_EQ(w.by_crude[1], 1.0);
  EXPECT_DOUBLE_EQ(w.drawn, 4.0);
  EXPECT_DOUBLE_EQ(w.shortfall, 0.0);
}

TEST(Withdrawal, OverdrawIsTruncated) {
  const std::vector<double> contents{3.0, 1.0};
  const Withdrawal w = proportional_withdrawal(contents, 10.0);
  EXPECT_DOUBLE_EQ(w.drawn, 4.0);
  EXPECT_DOUBLE_EQ(w.shortfall, 6.0);
  EXPECT_DOUBLE_EQ(w.by_crude[0], 3.0);
}

TEST(Withdrawal, EmptyTankYieldsNothing) {
  const std::vector<double> contents{0.0, 0.0};
  const Withdrawal w = proportional_withdrawal(contents, 2.0);
  EXPECT_DOUBLE_EQ(w.drawn, 0.0);
  EXPECT_DOUBLE_EQ(w.shortfall, 2.0);
}

TEST(FeedProperties, MassWeightedMean) {
  const Instance inst = crudesched::testing::refinery4();
  const std::vector<double> half{5.0, 5.0, 0.0};
  EXPECT_NEAR((*feed_properties(half, inst))[0], 0.8, 1e-12);
  const std::vector<double> none{0.0, 0.0, 0.0};
  EXPECT_FALSE(feed_properties(none, inst).has_value());
}

TEST(ResidueMode, IntersectionAndHeadroom) {
  const Instance inst = crudesched::testing::refinery4();
  const std::vector<double> inv{20.0, 9.0};  // headroom 15 and 5
  const std::vector<double> c1c2{1.0, 1.0, 0.0};
  EXPECT_EQ(select_residue_mode(c1c2, inst, inv), Index{1});
  const std::vector<double> with_c3{1.0, 0.0, 1.0};
  EXPECT_EQ(select_residue_mode(with_c3, inst, inv), Index{0});
  const std::vector<double> tight{6.0, 9.0};  // headroom 1 and 5
  EXPECT_EQ(select_residue_mode(c1c2, inst, tight), Index{0});
  const std::vector<double> tie{6.0, 5.0};  // headroom 1 and 1
  EXPECT_EQ(select_residue_mode(c1c2, inst, tie), Index{0});
}

TEST(ResidueMode, EmptyCandidateSet) {
  Instance inst = small_instance(2, 1, 2, true);
  inst.residues[0].allowed_crudes = {0};
  inst.residues[1].allowed_crudes = {1};
  finalize_instance(inst);
  const std::vector<double> both{1.0, 1.0};
  const std::vector<double> inv{20.0, 30.0};
  EXPECT_FALSE(select_residue_mode(both, inst, inv).has_value());

  const Trajectory t = simulate(inst, {charge_only(inst, {{{0, 3.0}, {1, 4.0}}})});
  const Violation* v = find_kind(t, ConstraintKind::kResidueCompatibility);
  ASSERT_NE(v, nullptr);
  EXPECT_DOUBLE_EQ(v->magnitude, 7.0);
}

TEST(Simulate, ReferenceScheduleIsFeasibleWithTwoChangeovers) {
  const Instance inst = crudesched::testing::refinery4();
  const Trajectory t = simulate(inst, crudesched::testing::refinery4_schedule(inst));
  for (const auto& v : t.violations) {
    ADD_FAILURE() << constraint_name(v.kind) << " period " << v.period << " magnitude " << v.magnitude;
  }
  EXPECT_EQ(t.changeovers, 2u);
  EXPECT_EQ(count_changeovers(t, inst), 2u);
  const Fitness f = evaluate(inst, encode_schedule(crudesched::testing::refinery4_schedule(inst), inst));
  EXPECT_EQ(f, (Fitness{0, 0.0, 2.0}));
}

TEST(Simulate, ReferenceTrajectoryValues) {
  const Instance inst = crudesched::testing::refinery4();
  const Trajectory t = simulate(inst, crudesched::testing::refinery4_schedule(inst));
  const auto& p1 = t.periods[0];
  EXPECT_DOUBLE_EQ(p1.cdu_feed[0], 9.0);
  EXPECT_NEAR(p1.feed_properties[0], (3 * 2.7 + 6 * 0.5) / 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(p1.tank_totals[0], 47.0);
  EXPECT_DOUBLE_EQ(p1.tank_totals[1], 24.0);
  // The vessel arrives in period 3 and empties into T3 in one go.
  EXPECT_DOUBLE_EQ(t.periods[2].tank_totals[2], 80.0);
  EXPECT_DOUBLE_EQ(t.periods[2].vessel_inventory[1], 0.0);
  ASSERT_EQ(t.periods[2].unloads.size(), 1u);
  EXPECT_DOUBLE_EQ(t.periods[2].unloads[0].mass, 60.0);
}

TEST(Simulate, AllEmptyDecisionsBreachFeedLowerBound) {
  const Instance inst = crudesched::testing::refinery4();
  const Trajectory t = simulate(inst, decode_genome(Genome(genome_dimension(inst), 0.0), inst));
  EXPECT_EQ(count_kind(t, ConstraintKind::kFeedBounds), inst.horizon);
  const Violation* v = find_kind(t, ConstraintKind::kFeedBounds);
  EXPECT_DOUBLE_EQ(v->magnitude, 8.0);
  EXPECT_DOUBLE_EQ(v->normalized, 1.0);
  // Nothing unloads, so the cargo is still aboard at the end.
  EXPECT_EQ(count_kind(t, ConstraintKind::kVesselUnloaded), 1u);
  EXPECT_EQ(t.changeovers, 0u);
}

TEST(Simulate, OverdrawMagnitudeIsShortfall) {
  Instance inst = small_instance(2, 1);
  const Trajectory t = simulate(inst, {charge_only(inst, {{{0, 45.0}}})});
  const Violation* v = find_kind(t, ConstraintKind::kTankOverdraw);
  ASSERT_NE(v, nullptr);
  EXPECT_DOUBLE_EQ(v->magnitude, 5.0);
  EXPECT_DOUBLE_EQ(t.periods[0].tank_totals[0], 0.0);
  EXPECT_DOUBLE_EQ(t.periods[0].cdu_feed[0], 40.0);
}

TEST(Simulate, SharedTankOverdrawScalesBothCdus) {
  Instance inst = small_instance(2, 1);
  inst.cdus.push_back(inst.cdus[0]);
  inst.cdus[1].name = "CDU2";
  for (auto& c : inst.crudes) c.yields.push_back(c.yields[0]);
  inst.initial_connections.resize(2);
  finalize_instance(inst);
  const Trajectory t = simulate(inst, {charge_only(inst, {{{0, 30.0}}, {{0, 30.0}}})});
  const Violation* v = find_kind(t, ConstraintKind::kTankOverdraw);
  ASSERT_NE(v, nullptr);
  EXPECT_DOUBLE_EQ(v->magnitude, 20.0);
  EXPECT_DOUBLE_EQ(t.periods[0].cdu_feed[0], 20.0);
  EXPECT_DOUBLE_EQ(t.periods[0].cdu_feed[1], 20.0);
}

TEST(Simulate, LowerBoundOnlyForChargingTanks) {
  Instance inst = small_instance(2, 1);
  inst.tanks[1].capacity.lo = 39.0;
  finalize_instance(inst);
  const Trajectory idle = simulate(inst, {charge_only(inst, {{{0, 8.0}}})});
  EXPECT_EQ(count_kind(idle, ConstraintKind::kTankLowerBound), 0u);
  const Trajectory drawn = simulate(inst, {charge_only(inst, {{{1, 8.0}}})});
  const Violation* v = find_kind(drawn, ConstraintKind::kTankLowerBound);
  ASSERT_NE(v, nullptr);
  EXPECT_DOUBLE_EQ(v->magnitude, 7.0);
}

TEST(Simulate, ChargingTankLimit) {
  const Instance inst = small_instance(3, 1, 2);
  const Trajectory t = simulate(inst, {charge_only(inst, {{{0, 3.0}, {1, 3.0}, {2, 3.0}}})});
  EXPECT_EQ(count_kind(t, ConstraintKind::kChargingTankLimit), 1u);
  const Trajectory zero = simulate(inst, {charge_only(inst, {{{0, 3.0}, {1, 3.0}, {2, 0.0}}})});
  EXPECT_EQ(count_kind(zero, ConstraintKind::kChargingTankLimit), 0u);
}

TEST(Simulate, ReceiveWhileChargingAndSingleSource) {
  Instance inst = small_instance(2, 2);
  Vessel v;
  v.name = "V1";
  v.arrival_period = 0;
  v.cargo = {{1, 10.0}};
  inst.vessels = {v, v};
  inst.vessels[1].name = "V2";
  inst.berth_count = 2;
  finalize_instance(inst);

  PeriodDecision pd = charge_only(inst, {{{0, 6.0}}});
  pd.receiving = {{0, {{0, 10.0}}}};
  Trajectory t = simulate(inst, {pd, charge_only(inst, {{{1, 6.0}}})});
  EXPECT_EQ(count_kind(t, ConstraintKind::kReceiveWhileCharging), 1u);

  PeriodDecision both = charge_only(inst, {{{1, 6.0}}});
  both.receiving = {{0, {{0, 10.0}}}, {1, {{0, 10.0}}}};
  t = simulate(inst, {both, charge_only(inst, {{{1, 6.0}}})});
  EXPECT_EQ(count_kind(t, ConstraintKind::kReceiveSingleSource), 1u);
  EXPECT_EQ(count_kind(t, ConstraintKind::kVesselUnloaded), 0u);
}

TEST(Simulate, BerthLimit) {
  Instance inst = small_instance(3, 2);
  Vessel v;
  v.name = "V1";
  v.arrival_period = 0;
  v.cargo = {{1, 5.0}};
  inst.vessels = {v, v};
  inst.vessels[1].name = "V2";
  finalize_instance(inst);
  PeriodDecision pd = charge_only(inst, {{{2, 6.0}}});
  pd.receiving = {{0, {{0, 5.0}}}, {1, {{1, 5.0}}}};
  const Trajectory t = simulate(inst, {pd, charge_only(inst, {{{2, 6.0}}})});
  EXPECT_EQ(count_kind(t, ConstraintKind::kBerthLimit), 1u);
}

TEST(Simulate, UnloadRespectsHeadroomAndRate) {
  Instance inst = small_instance(2, 2);
  inst.tanks[0].capacity.hi = 50.0;
  Vessel v;
  v.name = "V1";
  v.arrival_period = 0;
  v.cargo = {{0, 30.0}};
  v.unload_rate = 25.0;
  inst.vessels = {v};
  finalize_instance(inst);
  PeriodDecision pd = charge_only(inst, {{{1, 6.0}}});
  pd.receiving = {{0, {{0, 30.0}}}};
  const Trajectory t = simulate(inst, {pd, pd});
  EXPECT_DOUBLE_EQ(t.periods[0].tank_totals[0], 50.0);
  EXPECT_DOUBLE_EQ(t.periods[1].tank_totals[0], 50.0);
  EXPECT_DOUBLE_EQ(t.periods[1].vessel_inventory[0], 20.0);
  const Violation* left = find_kind(t, ConstraintKind::kVesselUnloaded);
  ASSERT_NE(left, nullptr);
  EXPECT_DOUBLE_EQ(left->magnitude, 20.0);
}

TEST(Simulate, ResidueInventoryChecked) {
  Instance inst = small_instance(1, 3);
  inst.residues[0].consumption = {12.0, 12.0, 12.0};
  finalize_instance(inst);
  // R1 has less headroom and is chosen every period, but production of 3.6
  // per period cannot keep up with consumption of 12.
  const Trajectory t = simulate(inst, Schedule(3, charge_only(inst, {{{0, 12.0}}})));
  EXPECT_GE(count_kind(t, ConstraintKind::kResidueInventory), 1u);
}

TEST(Simulate, ChangeoverOnSetOrModeChange) {
  const Instance inst = small_instance(3, 4);
  const Schedule s{charge_only(inst, {{{0, 6.0}}}), charge_only(inst, {{{0, 6.0}}}),
                   charge_only(inst, {{{0, 3.0}, {1, 3.0}}}), charge_only(inst, {{{1, 3.0}, {0, 3.0}}})};
  const Trajectory t = simulate(inst, s);
  EXPECT_EQ(t.changeovers, 1u);
  EXPECT_TRUE(t.periods[2].changeover[0]);
  EXPECT_FALSE(t.periods[0].changeover[0]);
}

TEST(Simulate, FirstPeriodComparesAgainstInitialConnection) {
  Instance inst = small_instance(2, 1);
  inst.initial_connections = {InitialConnection{{1}, Index{0}}};
  finalize_instance(inst);
  EXPECT_EQ(simulate(inst, {charge_only(inst, {{{0, 6.0}}})}).changeovers, 1u);
  EXPECT_EQ(simulate(inst, {charge_only(inst, {{{1, 6.0}}})}).changeovers, 0u);
}

TEST(Simulate, TogglesSilenceFamilies) {
  const Instance inst = crudesched::testing::refinery4();
  const Schedule s = decode_genome(Genome(genome_dimension(inst), 0.0), inst);
  ConstraintToggles off;
  off.set(ConstraintKind::kFeedBounds, false);
  const Trajectory t = simulate(inst, s, off);
  EXPECT_EQ(count_kind(t, ConstraintKind::kFeedBounds), 0u);
}

TEST(Simulate, ScheduleLengthMismatchThrows) {
  const Instance inst = crudesched::testing::refinery4();
  EXPECT_THROW(simulate(inst, Schedule(2)), EncodingError);
}

TEST(Fitness, FeasibleIffNoViolation) {
  std::vector<Violation> none;
  EXPECT_EQ(fitness_from(none, 3.0), (Fitness{0, 0.0, 3.0}));
  std::vector<Violation> two{{ConstraintKind::kFeedBounds, 0, 0, 0, 2.0, 0.25},
                             {ConstraintKind::kBerthLimit, 1, 0, 0, 1.0, 1.0}};
  const Fitness f = fitness_from(two, 0.0);
  EXPECT_EQ(f.cvn, 2u);
  EXPECT_DOUBLE_EQ(f.cv, 1.25);
}

// Property checks over random genomes: mass is conserved, blended properties
// match the feed composition, and cvn == 0 exactly when cv == 0.
class SimulatorProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(SimulatorProperties, ConservationAndBlending) {
  const Instance inst = crudesched::testing::refinery4();
  const GenomeBounds b = genome_bounds(inst);
  const Index C = inst.crude_count();
  Rng rng(GetParam());
  for (int trial = 0; trial < 200; ++trial) {
    Genome g(b.lower.size());
    for (Index i = 0; i < g.size(); ++i) g[i] = rng.uniform(b.lower[i], b.upper[i]);
    const Trajectory t = simulate(inst, decode_genome(g, inst));

    double initial = 0.0;
    for (double m : t.initial_vessel_inventory) initial += m;
    for (double m : t.initial_tank_contents) initial += m;
    double charged = 0.0;
    for (const auto& p : t.periods) {
      for (double f : p.cdu_feed) charged += f;
      double now = 0.0;
      for (double m : p.vessel_inventory) now += m;
      for (double m : p.tank_contents) now += m;
      ASSERT_LT(std::abs(initial - charged - now), 1e-9 * std::max(1.0, initial));
      for (Index u = 0; u < inst.cdu_count(); ++u) {
        if (p.cdu_feed[u] <= 0.0) continue;
        double expect = 0.0;
        for (Index c = 0; c < C; ++c) expect += p.cdu_feed_by_crude[u * C + c] * inst.crudes[c].properties[0];
        expect /= p.cdu_feed[u];
        ASSERT_LT(std::abs(expect - p.feed_properties[u]), 1e-9);
      }
      for (double m : p.tank_contents) ASSERT_GE(m, -1e-12);
    }
    const Fitness f = fitness_from(t.violations, 0.0);
    ASSERT_EQ(f.cvn == 0, f.cv == 0.0);
  }
}

TEST_P(SimulatorProperties, EvaluateIsDeterministic) {
  const Instance inst = crudesched::testing::refinery4();
  Rng rng(GetParam());
  const Genome g = initialize_individual(inst, rng);
  EXPECT_EQ(evaluate(inst, g), evaluate(inst, g));
}

INSTANTIATE_TEST_SUITE_P(Seeds, SimulatorProperties, ::testing::Values(1u, 2u, 3u, 42u));
