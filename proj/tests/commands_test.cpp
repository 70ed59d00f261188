#include <gtest/gtest.h>

#include <set>

#include "safer/commands.hpp"

namespace {

using namespace safer;
using enum AxisCommand;

HandGripPosition grip(AxisCommand a, AxisCommand b, AxisCommand c, AxisCommand d) {
  return {{a, b, c, d}};
}

std::vector<RotAxisSet> all_axis_sets() {
  std::vector<RotAxisSet> out;
  for (int bits = 0; bits < 8; ++bits) {
    RotAxisSet s;
    for (int i = 0; i < 3; ++i)
      if (bits & (1 << i)) s.insert(kRotAxes[i]);
    out.push_back(s);
  }
  return out;
}

std::vector<RotCommand> all_rot() {
  std::vector<RotCommand> out;
  for (auto a : kAxisCommands)
    for (auto b : kAxisCommands)
      for (auto c : kAxisCommands) out.emplace_back(a, b, c);
  return out;
}

std::vector<TranCommand> all_tran() {
  std::vector<TranCommand> out;
  for (auto a : kAxisCommands)
    for (auto b : kAxisCommands)
      for (auto c : kAxisCommands) out.emplace_back(a, b, c);
  return out;
}

TEST(GripCommand, RightInTranslationMode) {
  const auto cmd = grip_command(grip(Zero, Zero, Pos, Zero), ControlMode::Tran);
  EXPECT_EQ(cmd.tran, TranCommand(Zero, Pos, Zero));
  EXPECT_TRUE(cmd.rot.is_null());
}

TEST(GripCommand, YawInRotationMode) {
  const auto cmd = grip_command(grip(Zero, Zero, Pos, Zero), ControlMode::Rot);
  EXPECT_EQ(cmd.rot, RotCommand(Zero, Zero, Pos));
  EXPECT_TRUE(cmd.tran.is_null());
}

TEST(GripCommand, NullGripInBothModes) {
  for (auto mode : {ControlMode::Tran, ControlMode::Rot}) {
    const auto cmd = grip_command(HandGripPosition{}, mode);
    EXPECT_TRUE(cmd.tran.is_null());
    EXPECT_TRUE(cmd.rot.is_null());
  }
}

TEST(GripCommand, XAndPitchAvailableInBothModes) {
  for (auto mode : {ControlMode::Tran, ControlMode::Rot}) {
    const auto cmd = grip_command(grip(Zero, Neg, Zero, Pos), mode);
    EXPECT_EQ(cmd.tran, TranCommand(Pos, Zero, Zero));
    EXPECT_EQ(cmd.rot, RotCommand(Zero, Neg, Zero));
  }
}

TEST(GripCommand, SlotAssignment) {
  const auto tran = grip_command(grip(Pos, Zero, Neg, Zero), ControlMode::Tran);
  EXPECT_EQ(tran.tran, TranCommand(Zero, Neg, Pos));
  const auto rot = grip_command(grip(Pos, Zero, Neg, Zero), ControlMode::Rot);
  EXPECT_EQ(rot.rot, RotCommand(Pos, Zero, Neg));
  EXPECT_TRUE(rot.tran.is_null());
}

TEST(GripCommandProperty, InjectivePerMode) {
  for (auto mode : {ControlMode::Tran, ControlMode::Rot}) {
    std::set<std::pair<TranCommand, RotCommand>> seen;
    for (auto a : kAxisCommands)
      for (auto b : kAxisCommands)
        for (auto c : kAxisCommands)
          for (auto d : kAxisCommands) {
            const auto cmd = grip_command(grip(a, b, c, d), mode);
            EXPECT_TRUE(seen.insert({cmd.tran, cmd.rot}).second);
          }
    EXPECT_EQ(seen.size(), 81u);
  }
}

TEST(IntegratedCommands, TranslationPriorityXThenYThenZ) {
  SixDofCommand hcm{{Pos, Pos, Neg}, {}};
  const auto out = integrated_commands(hcm, {}, {}, {});
  EXPECT_EQ(out.tran, TranCommand(Pos, Zero, Zero));
  hcm.tran = {Zero, Neg, Pos};
  EXPECT_EQ(integrated_commands(hcm, {}, {}, {}).tran, TranCommand(Zero, Neg, Zero));
}

TEST(IntegratedCommands, RotationSuppressesTranslation) {
  SixDofCommand hcm{{Pos, Zero, Zero}, {Zero, Pos, Zero}};
  const auto out = integrated_commands(hcm, {}, {}, {});
  EXPECT_TRUE(out.tran.is_null());
  EXPECT_EQ(out.rot, RotCommand(Zero, Pos, Zero));
}

TEST(IntegratedCommands, IgnoredAxisReadsAah) {
  SixDofCommand hcm{{}, {Neg, Zero, Zero}};
  const auto out = integrated_commands(hcm, {Pos, Zero, Zero}, {RotAxis::Roll}, {RotAxis::Roll});
  EXPECT_EQ(out.rot, RotCommand(Pos, Zero, Zero));
}

TEST(IntegratedCommands, IgnoredButInactiveAxisIsZero) {
  SixDofCommand hcm{{}, {Neg, Zero, Zero}};
  const auto out = integrated_commands(hcm, {Pos, Zero, Zero}, {}, {RotAxis::Roll});
  EXPECT_TRUE(out.rot.is_null());
}

TEST(IntegratedCommands, GripShadowsAahOnNonIgnoredAxis) {
  SixDofCommand hcm{{}, {Zero, Zero, Neg}};
  const auto out = integrated_commands(hcm, {Pos, Pos, Pos}, RotAxisSet::all(), {});
  EXPECT_EQ(out.rot, RotCommand(Pos, Pos, Neg));
}

TEST(IntegratedCommands, AahRotationSuppressesGripTranslation) {
  SixDofCommand hcm{{Pos, Zero, Zero}, {}};
  const auto out = integrated_commands(hcm, {Zero, Zero, Neg}, RotAxisSet::all(), {});
  EXPECT_TRUE(out.tran.is_null());
  EXPECT_EQ(out.rot, RotCommand(Zero, Zero, Neg));
}

TEST(IntegratedCommandsProperty, OutputShapeOverWholeInputSpace) {
  const auto sets = all_axis_sets();
  const auto rots = all_rot();
  const auto trans = all_tran();
  for (const auto& t : trans)
    for (const auto& r : rots)
      for (const auto& aah : rots)
        for (RotAxisSet active : sets)
          for (RotAxisSet ignore : sets) {
            const auto out = integrated_commands({t, r}, aah, active, ignore);
            int nonzero_tran = 0;
            for (TranAxis a : kTranAxes) nonzero_tran += out.tran[a] != Zero;
            ASSERT_LE(nonzero_tran, 1);
            if (!out.rot.is_null()) ASSERT_TRUE(out.tran.is_null());
            for (RotAxis a : kRotAxes)
              if (!active.contains(a) && (ignore.contains(a) || r[a] == Zero))
                ASSERT_EQ(out.rot[a], Zero);
          }
}

TEST(IntegratedCommandsProperty, WithoutAahDependsOnlyOnHcm) {
  const auto rots = all_rot();
  for (const auto& t : all_tran())
    for (const auto& r : rots) {
      const SixDofCommand hcm{t, r};
      const auto base = integrated_commands(hcm, {}, {}, {});
      for (const auto& aah : rots) EXPECT_EQ(integrated_commands(hcm, aah, {}, {}), base);
      EXPECT_EQ(base.rot, r);
    }
}

TEST(Parsing, AxisCommandSpellings) {
  EXPECT_EQ(parse_axis_command("NEG"), Neg);
  EXPECT_EQ(parse_axis_command("-"), Neg);
  EXPECT_EQ(parse_axis_command("ZERO"), Zero);
  EXPECT_EQ(parse_axis_command("+"), Pos);
  EXPECT_FALSE(parse_axis_command("pos").has_value());
  EXPECT_EQ(parse_control_mode("ROT"), ControlMode::Rot);
  EXPECT_FALSE(parse_control_mode("rot").has_value());
  EXPECT_EQ(parse_aah_button("DOWN"), AahButton::Down);
}

TEST(RotAxisSetTest, Rendering) {
  EXPECT_EQ(to_string(RotAxisSet{RotAxis::Yaw, RotAxis::Roll}), "ROLL;YAW");
  EXPECT_EQ(to_string(RotAxisSet{}), "");
  EXPECT_EQ(RotAxisSet::all().size(), 3);
  EXPECT_TRUE(RotAxisSet{RotAxis::Pitch}.is_subset_of(RotAxisSet::all()));
}

}  // namespace
