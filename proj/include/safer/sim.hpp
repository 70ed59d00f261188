#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "safer/aah.hpp"
#include "safer/commands.hpp"
#include "safer/config.hpp"
#include "safer/contracts.hpp"
#include "safer/dynamics.hpp"
#include "safer/thrusters.hpp"

namespace safer {

struct SaferState {
  std::uint64_t clock = 0;  // completed cycles since reset
  KinematicState kinematics;
  InertialRefSensors sensors;
  double step = 0.25;
  std::vector<PositionData> history;  // starts with the initial state
  AahState aah;
  ThrusterSet failed;
  ThrusterSet last_fired;

  friend bool operator==(const SaferState&, const SaferState&) = default;
};

SaferState reset(double step = 0.25);

// Empty when the state invariants hold.
std::vector<std::string> state_problems(const SaferState& s);

struct CycleReport {
  std::uint64_t clock = 0;  // clock after the cycle, i.e. the 1-based cycle number
  ThrusterSet fired;
  AahEngageState engage = AahEngageState::Off;
  RotAxisSet active_axes;
  RotAxisSet ignore_hcm;
  PositionData position{};
  InertialRefSensors sensors;
  ThrusterSet failed;
  std::vector<contracts::ContractViolation> violations;
};

// One control cycle: select thrusters from the grip and the given AAH
// command under the current AAH bookkeeping, transition the AAH, advance the
// clock and integrate. The selection is contract-checked for card <= 4 and
// consistency; a violation is reported and the cycle still completes.
CycleReport control_cycle(SaferState& state, const SimConfig& cfg, const SwitchPositions& switches,
                          const HandGripPosition& grip, const RotCommand& aah_cmd,
                          const InertialRefSensors& sensors);

// control_cycle driven by the AAH law on the previous cycle's sensors.
CycleReport sensor_control_cycle(SaferState& state, const SimConfig& cfg,
                                 const SwitchPositions& switches, const HandGripPosition& grip);

// Integrates one cycle with the net wrench of `thrusters` minus the failed
// ones, appends to the history and refreshes the sensors.
PositionData calc_new_position(SaferState& state, const SimConfig& cfg, ThrusterSet thrusters);

void set_fault(SaferState& state, ThrusterName thruster, bool broken);

struct ScenarioStep {
  SwitchPositions switches;
  HandGripPosition grip;
  std::optional<RotCommand> aah_override;
  int repeat = 1;
  friend bool operator==(const ScenarioStep&, const ScenarioStep&) = default;
};

struct FaultChange {
  std::uint64_t before_cycle = 1;  // applied just before this 1-based cycle
  ThrusterName thruster = ThrusterName::B1;
  bool broken = true;
  friend bool operator==(const FaultChange&, const FaultChange&) = default;
};

struct Scenario {
  std::vector<ScenarioStep> steps;
  std::vector<FaultChange> faults;
  std::uint64_t total_cycles() const;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

// Runs every step `repeat` times, applying scheduled faults on the way.
// Cycles with violations are reported and execution continues.
std::vector<CycleReport> run_scenario(SaferState& state, const SimConfig& cfg,
                                      const Scenario& scenario);

// Fixed AAH snapshot used by control_cycle_test.
inline constexpr RotAxisSet kTestActiveAxes = RotAxisSet::all();
inline constexpr RotAxisSet kTestIgnoreHcm{};

contracts::Checked<ThrusterSet> control_cycle_test(const ThrusterData& data,
                                                   const SwitchPositions& switches,
                                                   const HandGripPosition& grip,
                                                   const RotCommand& aah_cmd);

using EnumerationKey = std::tuple<SwitchPositions, HandGripPosition, RotCommand>;

struct EnumerationOutcome {
  ThrusterSet fired;
  std::optional<contracts::ContractViolation> violation;
  friend bool operator==(const EnumerationOutcome&, const EnumerationOutcome&) = default;
};

struct EnumerationResult {
  std::map<EnumerationKey, EnumerationOutcome> entries;
  std::size_t violations = 0;
};

std::vector<SwitchPositions> all_switch_positions();
std::vector<HandGripPosition> single_axis_grips();  // 9
std::vector<HandGripPosition> all_grips();          // 81
std::vector<RotCommand> all_rot_commands();         // 27

EnumerationResult enumerate_logic(const ThrusterData& data,
                                  const std::vector<HandGripPosition>& grips);
EnumerationResult big_test(const ThrusterData& data);
EnumerationResult huge_test(const ThrusterData& data);

// Frozen trajectory columns.
inline constexpr const char* kTrajectoryHeader =
    "clock,t,x,y,z,vx,vy,vz,phi,theta,psi,omega1,omega2,omega3,fired,aah_active";

std::string trajectory_row(const CycleReport& r, double step);
void write_trajectory(std::ostream& out, const std::vector<CycleReport>& reports, double step);
void write_enumeration(std::ostream& out, const EnumerationResult& result);

}  // namespace safer
