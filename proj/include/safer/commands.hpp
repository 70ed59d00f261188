#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "safer/contracts.hpp"

namespace safer {

enum class AxisCommand : std::int8_t { Neg = -1, Zero = 0, Pos = 1 };

enum class TranAxis : std::uint8_t { X, Y, Z };
enum class RotAxis : std::uint8_t { Roll, Pitch, Yaw };

inline constexpr std::array<AxisCommand, 3> kAxisCommands{AxisCommand::Neg, AxisCommand::Zero,
                                                          AxisCommand::Pos};
inline constexpr std::array<TranAxis, 3> kTranAxes{TranAxis::X, TranAxis::Y, TranAxis::Z};
inline constexpr std::array<RotAxis, 3> kRotAxes{RotAxis::Roll, RotAxis::Pitch, RotAxis::Yaw};

constexpr int sign(AxisCommand c) { return static_cast<int>(c); }
constexpr AxisCommand negate(AxisCommand c) { return static_cast<AxisCommand>(-sign(c)); }

std::string_view to_string(AxisCommand c);
std::string_view to_string(TranAxis a);
std::string_view to_string(RotAxis a);
std::optional<AxisCommand> parse_axis_command(std::string_view text);  // NEG/ZERO/POS or -,0,+
std::optional<RotAxis> parse_rot_axis(std::string_view text);

// Total map from an axis enum to AxisCommand. Totality holds by construction;
// from_map() is the checked entry point for the partial-map representation.
template <typename Axis>
class AxisMap {
 public:
  constexpr AxisMap() = default;
  constexpr AxisMap(AxisCommand a, AxisCommand b, AxisCommand c) : values_{a, b, c} {}

  constexpr AxisCommand operator[](Axis axis) const { return values_[static_cast<int>(axis)]; }
  constexpr AxisCommand& operator[](Axis axis) { return values_[static_cast<int>(axis)]; }

  constexpr bool is_null() const {
    return values_[0] == AxisCommand::Zero && values_[1] == AxisCommand::Zero &&
           values_[2] == AxisCommand::Zero;
  }

  friend constexpr bool operator==(const AxisMap&, const AxisMap&) = default;
  friend constexpr auto operator<=>(const AxisMap&, const AxisMap&) = default;

 private:
  std::array<AxisCommand, 3> values_{AxisCommand::Zero, AxisCommand::Zero, AxisCommand::Zero};
};

using TranCommand = AxisMap<TranAxis>;
using RotCommand = AxisMap<RotAxis>;

// The raw, possibly partial, maps these types are built from.
using TranCommandMap = std::map<TranAxis, AxisCommand>;
using RotCommandMap = std::map<RotAxis, AxisCommand>;

contracts::Checked<TranCommand> tran_command_from_map(const TranCommandMap& map);
contracts::Checked<RotCommand> rot_command_from_map(const RotCommandMap& map);

struct SixDofCommand {
  TranCommand tran;
  RotCommand rot;
  friend constexpr bool operator==(const SixDofCommand&, const SixDofCommand&) = default;
};

// Small value set of rotation axes.
class RotAxisSet {
 public:
  constexpr RotAxisSet() = default;
  constexpr RotAxisSet(std::initializer_list<RotAxis> axes) {
    for (RotAxis a : axes) insert(a);
  }
  static constexpr RotAxisSet all() { return {RotAxis::Roll, RotAxis::Pitch, RotAxis::Yaw}; }

  constexpr bool contains(RotAxis a) const { return (bits_ >> static_cast<int>(a)) & 1U; }
  constexpr void insert(RotAxis a) { bits_ |= static_cast<std::uint8_t>(1U << static_cast<int>(a)); }
  constexpr void erase(RotAxis a) { bits_ &= static_cast<std::uint8_t>(~(1U << static_cast<int>(a))); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1); }
  constexpr bool is_subset_of(RotAxisSet other) const { return (bits_ & ~other.bits_) == 0; }

  friend constexpr bool operator==(RotAxisSet, RotAxisSet) = default;
  friend constexpr auto operator<=>(RotAxisSet, RotAxisSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

std::string to_string(RotAxisSet set);  // e.g. "ROLL;YAW", empty string for none

enum class ControlMode : std::uint8_t { Tran, Rot };
enum class AahButton : std::uint8_t { Up, Down };

std::string_view to_string(ControlMode m);
std::string_view to_string(AahButton b);
std::optional<ControlMode> parse_control_mode(std::string_view text);
std::optional<AahButton> parse_aah_button(std::string_view text);

struct SwitchPositions {
  ControlMode mode = ControlMode::Tran;
  AahButton aah_button = AahButton::Up;
  friend constexpr bool operator==(const SwitchPositions&, const SwitchPositions&) = default;
  friend constexpr auto operator<=>(const SwitchPositions&, const SwitchPositions&) = default;
};

// Tri-state hand grip. Slot 1 vertical deflection, slot 2 twist, slot 3
// lateral deflection, slot 4 longitudinal deflection.
struct HandGripPosition {
  std::array<AxisCommand, 4> slots{AxisCommand::Zero, AxisCommand::Zero, AxisCommand::Zero,
                                   AxisCommand::Zero};

  constexpr AxisCommand vertical() const { return slots[0]; }
  constexpr AxisCommand twist() const { return slots[1]; }
  constexpr AxisCommand lateral() const { return slots[2]; }
  constexpr AxisCommand longitudinal() const { return slots[3]; }

  friend constexpr bool operator==(const HandGripPosition&, const HandGripPosition&) = default;
  friend constexpr auto operator<=>(const HandGripPosition&, const HandGripPosition&) = default;
};

std::string to_string(const TranCommand& c);
std::string to_string(const RotCommand& c);
std::string to_string(const SixDofCommand& c);
std::string to_string(const HandGripPosition& g);

// Maps the grip onto six degrees of freedom for the selected mode. X and
// pitch are available in both modes.
SixDofCommand grip_command(const HandGripPosition& grip, ControlMode mode);

// Merges hand-controller and AAH commands. Grip rotations shadow the AAH
// except on ignored axes; any resulting rotation suppresses translation;
// otherwise a single translation axis survives with priority X, Y, Z.
SixDofCommand integrated_commands(const SixDofCommand& hcm, const RotCommand& aah,
                                  RotAxisSet active_axes, RotAxisSet ignore_hcm);

}  // namespace safer
