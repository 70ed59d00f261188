#pragma once

#include <cstdint>
#include <string_view>

#include "safer/commands.hpp"
#include "safer/linalg.hpp"

namespace safer {

enum class AahEngageState : std::uint8_t { Off, Started, On, PressedOnce, Closing };

std::string_view to_string(AahEngageState s);

struct AahState {
  AahEngageState engage = AahEngageState::Off;
  RotAxisSet active_axes;
  RotAxisSet ignore_hcm;
  std::uint64_t press_clock = 0;  // cycle of the most recent button-down edge

  bool engaged() const { return engage != AahEngageState::Off; }
  friend bool operator==(const AahState&, const AahState&) = default;
};

// OFF implies both axis sets are empty.
bool aah_state_valid(const AahState& s);

// Simulated inertial reference unit. Rates are body frame; velocity and
// acceleration are fixed frame.
struct InertialRefSensors {
  double roll_rate = 0.0;
  double pitch_rate = 0.0;
  double yaw_rate = 0.0;
  Vec3 velocity;
  Vec3 acceleration;

  friend bool operator==(const InertialRefSensors&, const InertialRefSensors&) = default;
};

bool sensors_finite(const InertialRefSensors& s);

struct AahThresholds {
  double eps_roll = 0.05;   // rad/s
  double eps_pitch = 0.05;
  double eps_yaw = 0.05;
};

// The button is sampled once per cycle; a DOWN sample in a state that is
// waiting for a release does not count as a new press.
AahState aah_transition(const AahState& state, AahButton button, const SixDofCommand& grip_cmd,
                        std::uint64_t clock, int double_click_cycles);

// Bang-bang law: fire against any rate at or beyond its threshold.
RotCommand aah_control_out(const InertialRefSensors& sensors, const AahThresholds& thresholds);

}  // namespace safer
