#include <gtest/gtest.h>

#include <json.hpp>

#include "crudesched/instance.hpp"
#include "crudesched/instance_io.hpp"
#include "fixtures.hpp"

using namespace crudesched;
using crudesched::testing::data_path;

namespace {

std::string refinery4_text() { return read_text_file(data_path("refinery4.instance")); }

std::string mutate(const std::function<void(nlohmann::json&)>& edit) {
  auto doc = nlohmann::json::parse(refinery4_text());
  edit(doc);
  return doc.dump();
}

bool mentions(const InstanceError& e, const std::string& needle) {
  for (const auto& d : e.diagnostics()) {
    if (d.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(InstanceLoad, Refinery4Contents) {
  const Instance inst = crudesched::testing::refinery4();
  EXPECT_EQ(inst.horizon, 6u);
  ASSERT_EQ(inst.vessel_count(), 1u);
  EXPECT_EQ(inst.vessels[0].arrival_period, 2u);  // day 2 starts at the third 12 h period
  ASSERT_EQ(inst.vessels[0].cargo.size(), 1u);
  EXPECT_EQ(inst.vessels[0].cargo[0].crude, 1u);
  EXPECT_DOUBLE_EQ(inst.vessels[0].cargo[0].mass, 60.0);

  ASSERT_EQ(inst.tank_count(), 4u);
  const double totals[] = {50, 30, 20, 20};
  for (Index t = 0; t < 4; ++t) EXPECT_DOUBLE_EQ(inst.tanks[t].initial_total(), totals[t]);

  const double sulfur[] = {0.5, 1.1, 2.7};
  const double residue_yield[] = {0.3364, 0.1365, 0.2965};
  for (Index c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(inst.crudes[c].properties[0], sulfur[c]);
    EXPECT_DOUBLE_EQ(inst.crudes[c].yields[0][inst.residue_product], residue_yield[c]);
  }
  EXPECT_EQ(inst.residues[0].allowed_crudes, (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(inst.residues[1].allowed_crudes, (std::vector<Index>{0, 1}));
}

TEST(InstanceLoad, ProducibleSetsInvertResidueSets) {
  const Instance inst = crudesched::testing::refinery4();
  for (Index c = 0; c < inst.crude_count(); ++c) {
    for (Index r = 0; r < inst.residue_count(); ++r) {
      const auto& rc = inst.residues[r].allowed_crudes;
      const bool in_rc = std::find(rc.begin(), rc.end(), c) != rc.end();
      EXPECT_EQ(inst.crudes[c].producible.contains(r), in_rc) << "crude " << c << " residue " << r;
    }
  }
  EXPECT_EQ(inst.crudes[2].producible, ResidueSet(0b01));
  EXPECT_EQ(inst.crudes[0].producible, ResidueSet(0b11));
}

TEST(InstanceLoad, ReversedCapacityNamesTheTank) {
  const std::string text = mutate([](auto& d) { d["tanks"][2]["capacity"] = {50, 10}; });
  try {
    parse_instance(text);
    FAIL() << "expected InstanceError";
  } catch (const InstanceError& e) {
    EXPECT_TRUE(mentions(e, "tanks[2] (T3).capacity"));
  }
}

TEST(InstanceLoad, ReportsEveryFailingField) {
  const std::string text = mutate([](auto& d) {
    d["tanks"][0]["capacity"] = {10, 5};
    d["cdus"][0]["max_tanks"] = 0;
    d["residues"][1]["initial"] = 100;
  });
  try {
    parse_instance(text);
    FAIL() << "expected InstanceError";
  } catch (const InstanceError& e) {
    EXPECT_TRUE(mentions(e, "tanks[0]"));
    EXPECT_TRUE(mentions(e, "max_tanks"));
    EXPECT_TRUE(mentions(e, "residues[1] (R2).initial"));
  }
}

TEST(InstanceLoad, EmptyVesselListIsValid) {
  const Instance inst = parse_instance(mutate([](auto& d) { d["vessels"] = nlohmann::json::array(); }));
  EXPECT_EQ(inst.vessel_count(), 0u);
}

TEST(InstanceLoad, CrudeOutsideEveryResidueIsRejected) {
  const std::string text = mutate([](auto& d) { d["residues"][0]["crudes"] = {"C1", "C2"}; });
  EXPECT_THROW(parse_instance(text), InstanceError);
}

TEST(InstanceLoad, SyntaxAndReferenceErrors) {
  EXPECT_THROW(parse_instance("{not json"), ParseError);
  EXPECT_THROW(parse_instance(mutate([](auto& d) { d.erase("horizon"); })), ParseError);
  EXPECT_THROW(parse_instance(mutate([](auto& d) { d["vessels"][0]["cargo"][0]["crude"] = "C9"; })), ParseError);
  EXPECT_THROW(parse_instance(mutate([](auto& d) { d["format_version"] = 99; })), ParseError);
  EXPECT_THROW(load_instance("/nonexistent/file.instance"), ParseError);
}

TEST(InstanceLoad, ConsumptionMayBeAPerPeriodArray) {
  const Instance inst =
      parse_instance(mutate([](auto& d) { d["residues"][0]["consumption"] = {1, 2, 3, 4, 5, 6}; }));
  EXPECT_EQ(inst.residues[0].consumption, (std::vector<double>{1, 2, 3, 4, 5, 6}));
}

TEST(InstanceLoad, SerializationRoundTrips) {
  const Instance a = crudesched::testing::refinery4();
  const std::string text = instance_to_json(a);
  const Instance b = parse_instance(text);
  EXPECT_EQ(instance_to_json(b), text);
}

TEST(InstanceLoad, InitialConnectionsRoundTrip) {
  const std::string text = mutate([](auto& d) {
    d["initial_connections"] = nlohmann::json::array({{{"cdu", "CDU1"}, {"tanks", {"T2", "T1"}}, {"mode", "R1"}}});
  });
  const Instance inst = parse_instance(text);
  ASSERT_TRUE(inst.initial_connections[0].has_value());
  EXPECT_EQ(inst.initial_connections[0]->tanks, (std::vector<Index>{0, 1}));
  EXPECT_EQ(inst.initial_connections[0]->mode, Index{0});
  EXPECT_EQ(instance_to_json(parse_instance(instance_to_json(inst))), instance_to_json(inst));
}

TEST(Bounds, SpanFallsBackForDegenerateIntervals) {
  EXPECT_DOUBLE_EQ((Bounds{2, 10}.span()), 8.0);
  EXPECT_DOUBLE_EQ((Bounds{5, 5}.span()), 5.0);
  EXPECT_DOUBLE_EQ((Bounds{0, 0}.span()), 1.0);
  EXPECT_DOUBLE_EQ((Bounds{0, kUnlimited}.span()), 1.0);
}

TEST(ResidueSetTest, MaskOperations) {
  ResidueSet s;
  s.insert(0);
  s.insert(3);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(1));
  EXPECT_EQ((s & ResidueSet(0b1000)).members(), (std::vector<Index>{3}));
  EXPECT_EQ(ResidueSet::all(64).size(), 64u);
}
