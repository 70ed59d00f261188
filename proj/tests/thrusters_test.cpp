#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "safer/thrusters.hpp"
#include "test_support.hpp"

namespace {

using namespace safer;
using enum AxisCommand;
using enum ThrusterName;

const ThrusterData& data() { return safer::testing::shipped_config().thrusters; }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ThrusterNames, TwentyFourDistinctRoundTrippingNames) {
  std::set<std::string_view> names;
  for (int i = 0; i < kThrusterCount; ++i) {
    const auto n = thruster_at(i);
    names.insert(to_string(n));
    EXPECT_EQ(parse_thruster_name(to_string(n)), n);
  }
  EXPECT_EQ(names.size(), 24u);
  EXPECT_FALSE(parse_thruster_name("F5").has_value());
}

TEST(ThrusterSetTest, Operations) {
  ThrusterSet a{B1, F2, D4R};
  EXPECT_EQ(a.size(), 3);
  EXPECT_TRUE(a.contains(F2));
  EXPECT_EQ(join(a, ";"), "B1;F2;D4R");
  EXPECT_EQ(a.minus({F2}), (ThrusterSet{B1, D4R}));
  EXPECT_EQ((a & ThrusterSet{F2, F3}), ThrusterSet{F2});
  EXPECT_EQ((a | ThrusterSet{F3}).size(), 4);
}

TEST(SelectionTables, QuotedBfRows) {
  EXPECT_EQ(bf_thrusters(data().tables, Neg, Zero, Zero), (SelectionRow{{B4}, {B2, B3}}));
  EXPECT_EQ(bf_thrusters(data().tables, Zero, Zero, Zero), (SelectionRow{}));
  EXPECT_EQ(bf_thrusters(data().tables, Pos, Neg, Zero), (SelectionRow{{F1, F2}, {}}));
}

TEST(SelectionTables, QuotedLrudRows) {
  EXPECT_EQ(lrud_thrusters(data().tables, Neg, Neg, Zero), (SelectionRow{}));
  EXPECT_EQ(lrud_thrusters(data().tables, Neg, Zero, Zero), (SelectionRow{{L1R, L3R}, {L1F, L3F}}));
  EXPECT_EQ(lrud_thrusters(data().tables, Pos, Zero, Pos), (SelectionRow{{R2R}, {R2F, R4F}}));
}

TEST(SelectionTables, ShippedTablesReproduceAnchors) {
  EXPECT_TRUE(check_anchor_rows(data().tables).empty());
}

TEST(SelectionTables, ShippedFileMatchesDerivationFromShippedGeometry) {
  for (auto g : {ThrusterGroup::BF, ThrusterGroup::LRUD}) {
    const auto derived = derive_table_from_geometry(data().geometry, g);
    EXPECT_TRUE(derived.ok());
    EXPECT_EQ(derived.table, data().tables[g]) << to_string(g);
  }
}

TEST(SelectionTables, ShippedGeometryIsTheDefault) {
  for (int i = 0; i < kThrusterCount; ++i) {
    const auto& a = data().geometry.thrusters[i];
    const auto& b = default_geometry().thrusters[i];
    EXPECT_EQ(a.position, b.position);
    EXPECT_EQ(a.direction, b.direction);
    EXPECT_EQ(a.thrust, b.thrust);
  }
}

TEST(SelectionTablesProperty, TotalDisjointAndNeutral) {
  for (auto g : {ThrusterGroup::BF, ThrusterGroup::LRUD}) {
    const auto& t = data().tables[g];
    EXPECT_TRUE(table_problems(t).empty());
    EXPECT_EQ(t.at({Zero, Zero, Zero}), SelectionRow{});
    for (int i = 0; i < SelectionTable::kRows; ++i) {
      const auto& row = t.at(SelectionTable::triple(i));
      EXPECT_TRUE((row.mandatory & row.optional).empty());
      EXPECT_LE((row.mandatory | row.optional).size(), kMaxFiredThrusters);
      for (auto n : (row.mandatory | row.optional).members()) EXPECT_EQ(group_of(n), g);
    }
  }
}

TEST(SelectionTablesProperty, TripleIndexRoundTrip) {
  for (int i = 0; i < SelectionTable::kRows; ++i)
    EXPECT_EQ(SelectionTable::index(SelectionTable::triple(i)), i);
}

TEST(SelectionTablesProperty, MirrorSymmetryOfOneAxisRows) {
  for (auto g : {ThrusterGroup::BF, ThrusterGroup::LRUD}) {
    const auto& t = data().tables[g];
    for (int slot = 0; slot < 3; ++slot) {
      CommandTriple pos, neg;
      AxisCommand* p[3] = {&pos.a, &pos.b, &pos.c};
      AxisCommand* n[3] = {&neg.a, &neg.b, &neg.c};
      *p[slot] = Pos;
      *n[slot] = Neg;
      EXPECT_EQ(t.at(pos).mandatory.size(), t.at(neg).mandatory.size())
          << to_string(g) << " slot " << slot;
      EXPECT_FALSE(t.at(pos).mandatory.empty());
    }
  }
}

TEST(SelectionTablesProperty, MandatoryWrenchMatchesCommandedSigns) {
  constexpr double tol = 1e-9;
  for (auto g : {ThrusterGroup::BF, ThrusterGroup::LRUD}) {
    const std::array<int, 3> axes = g == ThrusterGroup::BF ? std::array{0, 4, 5}
                                                           : std::array{1, 2, 3};
    for (int i = 0; i < SelectionTable::kRows; ++i) {
      const auto triple = SelectionTable::triple(i);
      const auto& row = data().tables[g].at(triple);
      if (row.mandatory.empty()) continue;
      const auto w = net_force_torque(row.mandatory | row.optional, data().geometry);
      const std::array<double, 6> c{w.force.x, w.force.y, w.force.z,
                                    w.torque.x, w.torque.y, w.torque.z};
      const std::array<int, 3> signs{sign(triple.a), sign(triple.b), sign(triple.c)};
      for (int k = 0; k < 3; ++k) {
        if (signs[k] == 0)
          EXPECT_NEAR(c[axes[k]], 0.0, tol) << to_string(g) << " " << to_string(triple);
        else
          EXPECT_GT(signs[k] * c[axes[k]], tol) << to_string(g) << " " << to_string(triple);
      }
    }
  }
}

TEST(DeriveTable, QuotedRowsFromDefaultGeometry) {
  const auto bf = derive_table_from_geometry(default_geometry(), ThrusterGroup::BF);
  const auto lrud = derive_table_from_geometry(default_geometry(), ThrusterGroup::LRUD);
  EXPECT_TRUE(bf.ok());
  EXPECT_TRUE(lrud.ok());
  EXPECT_EQ(bf.table.at({Zero, Zero, Zero}), SelectionRow{});
  EXPECT_EQ(bf.table.at({Neg, Zero, Zero}), (SelectionRow{{B4}, {B2, B3}}));
  EXPECT_EQ(lrud.table.at({Pos, Zero, Pos}), (SelectionRow{{R2R}, {R2F, R4F}}));
}

TEST(DeriveTable, ReportsDivergentAnchor) {
  auto g = default_geometry();
  // Moving B4 off-center gives it a torque, so it can no longer translate alone.
  g[B4].position = {0.1, 0.2, 0.0};
  const auto bf = derive_table_from_geometry(g, ThrusterGroup::BF);
  ASSERT_FALSE(bf.divergent.empty());
  EXPECT_EQ(bf.divergent.front().anchor.triple, (CommandTriple{Neg, Zero, Zero}));
  EXPECT_FALSE(bf.ok());
}

TEST(DeriveTable, ReportsUnsatisfiableRows) {
  auto g = default_geometry();
  // All back/forward jets on the x axis: no pitch or yaw authority.
  for (auto n : {B1, B2, B3, B4, F1, F2, F3, F4}) g[n].position.y = g[n].position.z = 0.0;
  const auto bf = derive_table_from_geometry(g, ThrusterGroup::BF);
  EXPECT_FALSE(bf.unsatisfiable.empty());
  for (const auto& t : bf.unsatisfiable) EXPECT_TRUE(t.b != Zero || t.c != Zero);
}

TEST(NetForceTorque, EmptySelection) {
  const auto w = net_force_torque({}, data().geometry, {F2});
  EXPECT_EQ(w.force, Vec3{});
  EXPECT_EQ(w.torque, Vec3{});
}

TEST(NetForceTorque, CrossProductIdentity) {
  ThrusterGeometry g = default_geometry();
  g[B1] = {{0, 1, 0}, {-1, 0, 0}, 1.0};
  const auto w = net_force_torque({B1}, g);
  EXPECT_EQ(w.force, (Vec3{1, 0, 0}));
  EXPECT_EQ(w.torque, (Vec3{0, 0, -1}));
}

TEST(NetForceTorque, SymmetricForwardQuadIsTorqueFree) {
  ThrusterGeometry g = default_geometry();
  const Vec3 aft{-1, 0, 0};
  g[F1] = {{-0.15, 0.2, 0.3}, aft, 3.6};
  g[F2] = {{-0.15, -0.2, 0.3}, aft, 3.6};
  g[F3] = {{-0.15, 0.2, -0.3}, aft, 3.6};
  g[F4] = {{-0.15, -0.2, -0.3}, aft, 3.6};
  const auto w = net_force_torque({F1, F2, F3, F4}, g);
  EXPECT_NEAR(w.force.x, 14.4, 1e-12);
  EXPECT_EQ(w.force.y, 0.0);
  EXPECT_EQ(w.force.z, 0.0);
  EXPECT_NEAR(norm(w.torque), 0.0, 1e-12);
}

TEST(NetForceTorque, FailedThrustersContributeNothing) {
  const auto all = net_force_torque({F2, F3, F4}, data().geometry);
  const auto broken = net_force_torque({F2, F3, F4}, data().geometry, {F2});
  const auto without = net_force_torque({F3, F4}, data().geometry);
  EXPECT_EQ(broken, without);
  EXPECT_NE(all, broken);
}

TEST(NetForceTorqueProperty, AdditiveOverDisjointSets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint32_t bits = static_cast<std::uint32_t>(rng()) & 0xFFFFFF;
    const std::uint32_t mask = static_cast<std::uint32_t>(rng());
    const auto a = ThrusterSet::from_bits(bits & mask);
    const auto b = ThrusterSet::from_bits(bits & ~mask);
    const auto whole = net_force_torque(a | b, data().geometry);
    const auto wa = net_force_torque(a, data().geometry);
    const auto wb = net_force_torque(b, data().geometry);
    EXPECT_LT(norm(whole.force - (wa.force + wb.force)), 1e-12);
    EXPECT_LT(norm(whole.torque - (wa.torque + wb.torque)), 1e-12);
  }
}

TEST(SelectedThrusters, NullCommandFiresNothing) {
  EXPECT_TRUE(selected_thrusters(data().tables, {}, {}, {}, {}).empty());
  const auto w = net_force_torque(selected_thrusters(data().tables, {}, {}, {}, {}), data().geometry);
  EXPECT_EQ(w.force, Vec3{});
  EXPECT_EQ(w.torque, Vec3{});
}

TEST(SelectedThrusters, BackwardUnionsOptional) {
  SixDofCommand hcm{{Neg, Zero, Zero}, {}};
  EXPECT_EQ(selected_thrusters(data().tables, hcm, {}, {}, {}), (ThrusterSet{B2, B3, B4}));
}

TEST(SelectedThrusters, PitchSuppressesTranslation) {
  SixDofCommand hcm{{Pos, Zero, Zero}, {Zero, Neg, Zero}};
  const auto row = bf_thrusters(data().tables, Zero, Neg, Zero);
  EXPECT_EQ(selected_thrusters(data().tables, hcm, {}, {}, {}), row.mandatory | row.optional);
}

TEST(SelectedThrusters, RollDropsBfOptional) {
  // X and roll together never survive integration, so check the rule with
  // roll from the grip and pitch/yaw empty: the BF row is (ZERO, ZERO, ZERO).
  SixDofCommand hcm{{}, {Pos, Zero, Zero}};
  const auto lrud = lrud_thrusters(data().tables, Zero, Zero, Pos);
  EXPECT_EQ(selected_thrusters(data().tables, hcm, {}, {}, {}), lrud.mandatory | lrud.optional);
}

TEST(SelectedThrusters, YawDropsLrudOptional) {
  SixDofCommand hcm{{}, {Pos, Zero, Pos}};
  const auto bf = bf_thrusters(data().tables, Zero, Zero, Pos);
  const auto lrud = lrud_thrusters(data().tables, Zero, Zero, Pos);
  EXPECT_EQ(selected_thrusters(data().tables, hcm, {}, {}, {}), bf.mandatory | lrud.mandatory);
}

TEST(Consistency, Examples) {
  EXPECT_TRUE(thruster_consistency({}, data().geometry));
  EXPECT_FALSE(thruster_consistency({B1, F1}, data().geometry));
  EXPECT_FALSE(thruster_consistency({B4, F4}, data().geometry));
  EXPECT_TRUE(thruster_consistency({B1, F2}, data().geometry));
}

TEST(Consistency, QuotedRowsAreConsistent) {
  for (const auto& a : anchor_rows())
    EXPECT_TRUE(thruster_consistency(a.expected.mandatory | a.expected.optional, data().geometry));
}

TEST(DataFile, FormatParseRoundTrip) {
  const std::string text = format_thruster_data(data());
  const auto back = parse_thruster_data(text, text);
  EXPECT_EQ(back.tables, data().tables);
  EXPECT_EQ(format_thruster_data(back), text);
}

TEST(DataFile, ShippedFileIsCanonical) {
  const auto text = read_text(std::filesystem::path(SAFER_DATA_DIR) / "thrusters.dat");
  EXPECT_EQ(text, format_thruster_data(data()));
}

std::string replace_line(std::string text, const std::string& prefix, const std::string& with) {
  const auto pos = text.find(prefix);
  const auto end = text.find('\n', pos);
  return text.replace(pos, end - pos, with);
}

int line_of(const std::string& text, const std::string& prefix) {
  const auto pos = text.find(prefix);
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

TEST(DataFile, ErrorsNameTheLine) {
  const std::string text = format_thruster_data(data());
  const std::string bad = replace_line(text, "thruster F2", "thruster F2 0 0 zero 1 0 0 3.6");
  try {
    parse_thruster_data(bad, bad, "t.dat");
    FAIL();
  } catch (const DataFormatError& e) {
    EXPECT_EQ(e.line(), line_of(text, "thruster F2"));
    EXPECT_NE(std::string(e.what()).find("zero"), std::string::npos);
  }
}

TEST(DataFile, RejectsStructuralProblems) {
  const std::string text = format_thruster_data(data());
  const std::string missing = replace_line(text, "thruster D4R", "");
  EXPECT_THROW(parse_thruster_data(missing, missing), DataFormatError);
  const std::string not_unit = replace_line(text, "thruster D4R", "thruster D4R 0 0.2 0.35 0 0 2 3.6");
  EXPECT_THROW(parse_thruster_data(not_unit, not_unit), DataFormatError);
  const std::string overlap =
      replace_line(text, "row BF   NEG  ZERO ZERO", "row BF NEG ZERO ZERO : B4 : B4 B2");
  EXPECT_THROW(parse_thruster_data(overlap, overlap), DataFormatError);
  const std::string dup = text + "row BF ZERO ZERO ZERO : - : -\n";
  EXPECT_THROW(parse_thruster_data(dup, dup), DataFormatError);
  const std::string no_row = replace_line(text, "row LRUD POS  POS  POS", "");
  EXPECT_THROW(parse_thruster_data(no_row, no_row), DataFormatError);
}

}  // namespace
