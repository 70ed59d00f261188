#include "safer/commands.hpp"

#include <fmt/format.h>

namespace safer {

std::string_view to_string(AxisCommand c) {
  switch (c) {
    case AxisCommand::Neg: return "NEG";
    case AxisCommand::Zero: return "ZERO";
    case AxisCommand::Pos: return "POS";
  }
  return "?";
}

std::string_view to_string(TranAxis a) {
  switch (a) {
    case TranAxis::X: return "X";
    case TranAxis::Y: return "Y";
    case TranAxis::Z: return "Z";
  }
  return "?";
}

std::string_view to_string(RotAxis a) {
  switch (a) {
    case RotAxis::Roll: return "ROLL";
    case RotAxis::Pitch: return "PITCH";
    case RotAxis::Yaw: return "YAW";
  }
  return "?";
}

std::optional<AxisCommand> parse_axis_command(std::string_view text) {
  if (text == "NEG" || text == "-" || text == "-1") return AxisCommand::Neg;
  if (text == "ZERO" || text == "0") return AxisCommand::Zero;
  if (text == "POS" || text == "+" || text == "1" || text == "+1") return AxisCommand::Pos;
  return std::nullopt;
}

std::optional<RotAxis> parse_rot_axis(std::string_view text) {
  for (RotAxis a : kRotAxes)
    if (to_string(a) == text) return a;
  return std::nullopt;
}

namespace {

template <typename Axis, std::size_t N>
contracts::Checked<AxisMap<Axis>> from_map(const std::map<Axis, AxisCommand>& map,
                                           const std::array<Axis, N>& axes, const char* type) {
  AxisMap<Axis> out;
  for (Axis a : axes) {
    auto it = map.find(a);
    if (it == map.end())
      return contracts::ContractViolation{contracts::ViolationKind::Invariant, type,
                                          fmt::format("axis {} missing from domain", to_string(a))};
    out[a] = it->second;
  }
  return out;
}

}  // namespace

contracts::Checked<TranCommand> tran_command_from_map(const TranCommandMap& map) {
  return from_map(map, kTranAxes, "TranCommand");
}

contracts::Checked<RotCommand> rot_command_from_map(const RotCommandMap& map) {
  return from_map(map, kRotAxes, "RotCommand");
}

std::string to_string(RotAxisSet set) {
  std::string out;
  for (RotAxis a : kRotAxes) {
    if (!set.contains(a)) continue;
    if (!out.empty()) out += ';';
    out += to_string(a);
  }
  return out;
}

std::string_view to_string(ControlMode m) { return m == ControlMode::Tran ? "TRAN" : "ROT"; }
std::string_view to_string(AahButton b) { return b == AahButton::Up ? "UP" : "DOWN"; }

std::optional<ControlMode> parse_control_mode(std::string_view text) {
  if (text == "TRAN") return ControlMode::Tran;
  if (text == "ROT") return ControlMode::Rot;
  return std::nullopt;
}

std::optional<AahButton> parse_aah_button(std::string_view text) {
  if (text == "UP") return AahButton::Up;
  if (text == "DOWN") return AahButton::Down;
  return std::nullopt;
}

std::string to_string(const TranCommand& c) {
  return fmt::format("tran{{X:{},Y:{},Z:{}}}", to_string(c[TranAxis::X]), to_string(c[TranAxis::Y]),
                     to_string(c[TranAxis::Z]));
}

std::string to_string(const RotCommand& c) {
  return fmt::format("rot{{ROLL:{},PITCH:{},YAW:{}}}", to_string(c[RotAxis::Roll]),
                     to_string(c[RotAxis::Pitch]), to_string(c[RotAxis::Yaw]));
}

std::string to_string(const SixDofCommand& c) { return to_string(c.tran) + " " + to_string(c.rot); }

std::string to_string(const HandGripPosition& g) {
  return fmt::format("grip[{},{},{},{}]", to_string(g.slots[0]), to_string(g.slots[1]),
                     to_string(g.slots[2]), to_string(g.slots[3]));
}

SixDofCommand grip_command(const HandGripPosition& grip, ControlMode mode) {
  SixDofCommand cmd;
  cmd.tran[TranAxis::X] = grip.longitudinal();
  cmd.rot[RotAxis::Pitch] = grip.twist();
  if (mode == ControlMode::Tran) {
    cmd.tran[TranAxis::Z] = grip.vertical();
    cmd.tran[TranAxis::Y] = grip.lateral();
  } else {
    cmd.rot[RotAxis::Roll] = grip.vertical();
    cmd.rot[RotAxis::Yaw] = grip.lateral();
  }
  return cmd;
}

SixDofCommand integrated_commands(const SixDofCommand& hcm, const RotCommand& aah,
                                  RotAxisSet active_axes, RotAxisSet ignore_hcm) {
  SixDofCommand out;
  for (RotAxis a : kRotAxes) {
    const AxisCommand from_aah = active_axes.contains(a) ? aah[a] : AxisCommand::Zero;
    if (ignore_hcm.contains(a))
      out.rot[a] = from_aah;
    else if (hcm.rot[a] != AxisCommand::Zero)
      out.rot[a] = hcm.rot[a];
    else
      out.rot[a] = from_aah;
  }
  if (!out.rot.is_null()) return out;

  for (TranAxis t : kTranAxes) {
    if (hcm.tran[t] != AxisCommand::Zero) {
      out.tran[t] = hcm.tran[t];
      break;
    }
  }
  return out;
}

}  // namespace safer
