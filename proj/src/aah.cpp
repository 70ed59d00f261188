#include "safer/aah.hpp"

#include <cmath>
#include <stdexcept>

namespace safer {

std::string_view to_string(AahEngageState s) {
  switch (s) {
    case AahEngageState::Off: return "OFF";
    case AahEngageState::Started: return "STARTED";
    case AahEngageState::On: return "ON";
    case AahEngageState::PressedOnce: return "PRESSED_ONCE";
    case AahEngageState::Closing: return "CLOSING";
  }
  return "?";
}

bool aah_state_valid(const AahState& s) {
  if (s.engage == AahEngageState::Off) return s.active_axes.empty() && s.ignore_hcm.empty();
  return true;
}

bool sensors_finite(const InertialRefSensors& s) {
  return std::isfinite(s.roll_rate) && std::isfinite(s.pitch_rate) && std::isfinite(s.yaw_rate) &&
         is_finite(s.velocity) && is_finite(s.acceleration);
}

AahState aah_transition(const AahState& state, AahButton button, const SixDofCommand& grip_cmd,
                        std::uint64_t clock, int double_click_cycles) {
  if (double_click_cycles < 1) throw std::invalid_argument("double_click_cycles must be >= 1");
  const bool down = button == AahButton::Down;
  const bool in_window = clock - state.press_clock <= static_cast<std::uint64_t>(double_click_cycles);
  AahState next = state;

  switch (state.engage) {
    case AahEngageState::Off:
      if (down) {
        next.engage = AahEngageState::Started;
        next.press_clock = clock;
        next.active_axes = RotAxisSet::all();
        next.ignore_hcm = {};
        for (RotAxis a : kRotAxes)
          if (grip_cmd.rot[a] != AxisCommand::Zero) next.ignore_hcm.insert(a);
      }
      return next;
    case AahEngageState::Started:
      if (!down) next.engage = AahEngageState::On;
      break;
    case AahEngageState::On:
      if (down) {
        next.engage = AahEngageState::PressedOnce;
        next.press_clock = clock;
      }
      break;
    case AahEngageState::PressedOnce:
      if (!down) next.engage = in_window ? AahEngageState::Closing : AahEngageState::On;
      break;
    case AahEngageState::Closing:
      if (down && in_window) return AahState{};
      if (down) {
        // Too late for a double click: this press starts a new one.
        next.engage = AahEngageState::PressedOnce;
        next.press_clock = clock;
      } else if (!in_window) {
        next.engage = AahEngageState::On;
      }
      break;
  }

  for (RotAxis a : kRotAxes)
    if (!next.ignore_hcm.contains(a) && grip_cmd.rot[a] != AxisCommand::Zero)
      next.active_axes.erase(a);
  return next;
}

RotCommand aah_control_out(const InertialRefSensors& sensors, const AahThresholds& thresholds) {
  auto law = [](double rate, double eps) {
    if (rate <= -eps) return AxisCommand::Pos;
    if (rate >= eps) return AxisCommand::Neg;
    return AxisCommand::Zero;
  };
  return {law(sensors.roll_rate, thresholds.eps_roll), law(sensors.pitch_rate, thresholds.eps_pitch),
          law(sensors.yaw_rate, thresholds.eps_yaw)};
}

}  // namespace safer
