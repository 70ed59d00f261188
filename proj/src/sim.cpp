#include "safer/sim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace safer {

using contracts::Checked;
using contracts::ContractViolation;
using contracts::ViolationKind;

SaferState reset(double step) {
  SaferState s;
  s.step = step;
  s.history.push_back(to_position_data(s.kinematics));
  return s;
}

std::vector<std::string> state_problems(const SaferState& s) {
  std::vector<std::string> out;
  if (!(s.step > 0.0)) out.emplace_back("step must be positive");
  if (s.history.size() != s.clock + 1) out.emplace_back("history length differs from clock + 1");
  if (!s.history.empty() && s.history.back() != to_position_data(s.kinematics))
    out.emplace_back("last history entry differs from the current position data");
  if (!is_finite(s.kinematics)) out.emplace_back("non-finite kinematic state");
  if (!sensors_finite(s.sensors)) out.emplace_back("non-finite sensors");
  if (!aah_state_valid(s.aah)) out.emplace_back("AAH is OFF but holds axes");
  return out;
}

namespace {

struct SelectionInput {
  SixDofCommand grip_cmd;
  RotCommand aah_cmd;
  RotAxisSet active_axes;
  RotAxisSet ignore_hcm;
};

Checked<ThrusterSet> checked_selection(const ThrusterData& data, const SelectionInput& input,
                                       const std::string& name) {
  contracts::GuardedOperation<SelectionInput, ThrusterSet> op;
  op.name = name;
  op.body = [&data](const SelectionInput& in) {
    return selected_thrusters(data.tables, in.grip_cmd, in.aah_cmd, in.active_axes, in.ignore_hcm);
  };
  op.postcondition = [&data](const SelectionInput&, const ThrusterSet& result) {
    return result.size() <= kMaxFiredThrusters && thruster_consistency(result, data.geometry);
  };
  op.result_invariants = {"ThrusterSet"};
  op.render_input = [](const SelectionInput& in) {
    return fmt::format("hcm {} aah {} active [{}] ignore [{}]", to_string(in.grip_cmd),
                       to_string(in.aah_cmd), to_string(in.active_axes), to_string(in.ignore_hcm));
  };
  op.render_result = [](const ThrusterSet& s) { return fmt::format("{{{}}}", join(s, ",")); };
  return contracts::evaluate_guarded(op, input);
}

}  // namespace

PositionData calc_new_position(SaferState& state, const SimConfig& cfg, ThrusterSet thrusters) {
  const Wrench w = net_force_torque(thrusters, cfg.thrusters.geometry, state.failed);
  const Mat3 b_start = body_to_fixed(state.kinematics.angles);
  state.kinematics = integrate_cycle(state.kinematics, w.force, w.torque, cfg.body, state.step,
                                     cfg.substeps, cfg.integrator);
  const KinematicState& k = state.kinematics;
  state.sensors.roll_rate = k.omega.x;
  state.sensors.pitch_rate = k.omega.y;
  state.sensors.yaw_rate = k.omega.z;
  state.sensors.velocity = k.velocity;
  state.sensors.acceleration = b_start * w.force / cfg.body.mass + cfg.integrator.gravity;
  const PositionData p = to_position_data(k);
  state.history.push_back(p);
  return p;
}

CycleReport control_cycle(SaferState& state, const SimConfig& cfg, const SwitchPositions& switches,
                          const HandGripPosition& grip, const RotCommand& aah_cmd,
                          const InertialRefSensors& sensors) {
  (void)sensors;  // the AAH transition itself does not read the sensors
  const SixDofCommand grip_cmd = grip_command(grip, switches.mode);
  CycleReport report;

  ThrusterSet fired;
  auto checked = checked_selection(
      cfg.thrusters, {grip_cmd, aah_cmd, state.aah.active_axes, state.aah.ignore_hcm},
      "control_cycle");
  if (checked.ok()) {
    fired = checked.value();
  } else {
    report.violations.push_back(checked.violation());
    fired = selected_thrusters(cfg.thrusters.tables, grip_cmd, aah_cmd, state.aah.active_axes,
                               state.aah.ignore_hcm);
  }

  state.aah = aah_transition(state.aah, switches.aah_button, grip_cmd, state.clock,
                             cfg.double_click_cycles);
  state.clock += 1;
  state.last_fired = fired;
  calc_new_position(state, cfg, fired);

  report.clock = state.clock;
  report.fired = fired;
  report.engage = state.aah.engage;
  report.active_axes = state.aah.active_axes;
  report.ignore_hcm = state.aah.ignore_hcm;
  report.position = state.history.back();
  report.sensors = state.sensors;
  report.failed = state.failed;
  return report;
}

CycleReport sensor_control_cycle(SaferState& state, const SimConfig& cfg,
                                 const SwitchPositions& switches, const HandGripPosition& grip) {
  const InertialRefSensors sensors = state.sensors;
  return control_cycle(state, cfg, switches, grip, aah_control_out(sensors, cfg.thresholds),
                       sensors);
}

void set_fault(SaferState& state, ThrusterName thruster, bool broken) {
  if (broken)
    state.failed.insert(thruster);
  else
    state.failed.erase(thruster);
}

std::uint64_t Scenario::total_cycles() const {
  std::uint64_t n = 0;
  for (const auto& s : steps) n += static_cast<std::uint64_t>(s.repeat);
  return n;
}

ScenarioError::ScenarioError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, what)), line_(line) {}

Scenario parse_scenario(std::string_view text, const std::string& source) {
  Scenario sc;
  std::uint64_t cycles = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream words(raw);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& what) { throw ScenarioError(source, line_no, what); };

    if (tok[0] == "fault") {
      if (tok.size() != 3) fail("expected: fault <thruster> on|off");
      auto name = parse_thruster_name(tok[1]);
      if (!name) fail(fmt::format("unknown thruster '{}'", tok[1]));
      if (tok[2] != "on" && tok[2] != "off") fail(fmt::format("expected on|off, got '{}'", tok[2]));
      sc.faults.push_back({cycles + 1, *name, tok[2] == "on"});
      continue;
    }

    if (tok.size() != 7 && tok.size() != 11)
      fail("expected: <TRAN|ROT> <UP|DOWN> <4 grip slots> [aah <r> <p> <y>] <repeat>");
    ScenarioStep step;
    auto mode = parse_control_mode(tok[0]);
    if (!mode) fail(fmt::format("bad mode '{}'", tok[0]));
    auto button = parse_aah_button(tok[1]);
    if (!button) fail(fmt::format("bad AAH button '{}'", tok[1]));
    step.switches = {*mode, *button};
    for (int i = 0; i < 4; ++i) {
      auto c = parse_axis_command(tok[2 + i]);
      if (!c) fail(fmt::format("bad grip slot {} '{}'", i + 1, tok[2 + i]));
      step.grip.slots[i] = *c;
    }
    if (tok.size() == 11) {
      if (tok[6] != "aah") fail(fmt::format("expected 'aah', got '{}'", tok[6]));
      RotCommand r;
      for (int i = 0; i < 3; ++i) {
        auto c = parse_axis_command(tok[7 + i]);
        if (!c) fail(fmt::format("bad AAH override '{}'", tok[7 + i]));
        r[kRotAxes[i]] = *c;
      }
      step.aah_override = r;
    }
    const std::string& rep = tok.back();
    int repeat = 0;
    auto [ptr, ec] = std::from_chars(rep.data(), rep.data() + rep.size(), repeat);
    if (ec != std::errc() || ptr != rep.data() + rep.size() || repeat < 1)
      fail(fmt::format("repeat must be a positive integer, got '{}'", rep));
    step.repeat = repeat;
    cycles += static_cast<std::uint64_t>(repeat);
    sc.steps.push_back(step);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read scenario '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

std::vector<CycleReport> run_scenario(SaferState& state, const SimConfig& cfg,
                                      const Scenario& scenario) {
  std::vector<FaultChange> faults = scenario.faults;
  std::stable_sort(faults.begin(), faults.end(), [](const FaultChange& a, const FaultChange& b) {
    return a.before_cycle < b.before_cycle;
  });
  auto next_fault = faults.begin();
  std::uint64_t cycle = 0;
  auto apply_faults = [&](std::uint64_t upto) {
    for (; next_fault != faults.end() && next_fault->before_cycle <= upto; ++next_fault)
      set_fault(state, next_fault->thruster, next_fault->broken);
  };

  std::vector<CycleReport> reports;
  for (const ScenarioStep& step : scenario.steps) {
    for (int i = 0; i < step.repeat; ++i) {
      apply_faults(++cycle);
      if (step.aah_override)
        reports.push_back(
            control_cycle(state, cfg, step.switches, step.grip, *step.aah_override, state.sensors));
      else
        reports.push_back(sensor_control_cycle(state, cfg, step.switches, step.grip));
    }
  }
  apply_faults(cycle + 1);
  return reports;
}

Checked<ThrusterSet> control_cycle_test(const ThrusterData& data, const SwitchPositions& switches,
                                        const HandGripPosition& grip, const RotCommand& aah_cmd) {
  return checked_selection(
      data, {grip_command(grip, switches.mode), aah_cmd, kTestActiveAxes, kTestIgnoreHcm},
      "control_cycle_test");
}

std::vector<SwitchPositions> all_switch_positions() {
  std::vector<SwitchPositions> out;
  for (ControlMode m : {ControlMode::Tran, ControlMode::Rot})
    for (AahButton b : {AahButton::Up, AahButton::Down}) out.push_back({m, b});
  return out;
}

std::vector<HandGripPosition> single_axis_grips() {
  std::vector<HandGripPosition> out{HandGripPosition{}};
  for (int slot = 0; slot < 4; ++slot)
    for (AxisCommand c : {AxisCommand::Neg, AxisCommand::Pos}) {
      HandGripPosition g;
      g.slots[slot] = c;
      out.push_back(g);
    }
  return out;
}

std::vector<HandGripPosition> all_grips() {
  std::vector<HandGripPosition> out;
  for (AxisCommand a : kAxisCommands)
    for (AxisCommand b : kAxisCommands)
      for (AxisCommand c : kAxisCommands)
        for (AxisCommand d : kAxisCommands) out.push_back({{a, b, c, d}});
  return out;
}

std::vector<RotCommand> all_rot_commands() {
  std::vector<RotCommand> out;
  for (AxisCommand a : kAxisCommands)
    for (AxisCommand b : kAxisCommands)
      for (AxisCommand c : kAxisCommands) out.emplace_back(a, b, c);
  return out;
}

EnumerationResult enumerate_logic(const ThrusterData& data,
                                  const std::vector<HandGripPosition>& grips) {
  using contracts::Domain;
  auto built = contracts::comprehend<contracts::Target::Map>(
      [](const SwitchPositions&, const HandGripPosition&, const RotCommand&) { return true; },
      [&data](const SwitchPositions& sw, const HandGripPosition& g, const RotCommand& aah) {
        auto checked = control_cycle_test(data, sw, g, aah);
        EnumerationOutcome outcome;
        if (checked.ok()) {
          outcome.fired = checked.value();
        } else {
          outcome.violation = checked.violation();
          outcome.fired = selected_thrusters(data.tables, grip_command(g, sw.mode), aah,
                                             kTestActiveAxes, kTestIgnoreHcm);
        }
        return std::pair{EnumerationKey{sw, g, aah}, outcome};
      },
      Domain<SwitchPositions>(all_switch_positions()), Domain<HandGripPosition>(grips),
      Domain<RotCommand>(all_rot_commands()));

  EnumerationResult result;
  result.entries = std::move(built).value();
  for (const auto& [key, outcome] : result.entries)
    if (outcome.violation) ++result.violations;
  return result;
}

EnumerationResult big_test(const ThrusterData& data) {
  return enumerate_logic(data, single_axis_grips());
}

EnumerationResult huge_test(const ThrusterData& data) { return enumerate_logic(data, all_grips()); }

std::string trajectory_row(const CycleReport& r, double step) {
  const PositionData& p = r.position;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.clock,
                     static_cast<double>(r.clock) * step, p[0], p[1], p[2], p[3], p[4], p[5], p[6],
                     p[7], p[8], p[9], p[10], p[11], join(r.fired, ";"), to_string(r.active_axes));
}

void write_trajectory(std::ostream& out, const std::vector<CycleReport>& reports, double step) {
  out << kTrajectoryHeader << '\n';
  for (const CycleReport& r : reports) out << trajectory_row(r, step) << '\n';
}

void write_enumeration(std::ostream& out, const EnumerationResult& result) {
  out << "mode,aah_button,grip,aah,fired,violation\n";
  for (const auto& [key, outcome] : result.entries) {
    const auto& [sw, grip, aah] = key;
    std::string grip_text;
    for (AxisCommand c : grip.slots) {
      if (!grip_text.empty()) grip_text += ' ';
      grip_text += to_string(c);
    }
    out << fmt::format("{},{},{},{} {} {},{},{}\n", to_string(sw.mode), to_string(sw.aah_button),
                       grip_text, to_string(aah[RotAxis::Roll]), to_string(aah[RotAxis::Pitch]),
                       to_string(aah[RotAxis::Yaw]), join(outcome.fired, ";"),
                       outcome.violation ? "\"" + outcome.violation->describe() + "\"" : std::string());
  }
  out << "violations: " << result.violations << '\n';
}

}  // namespace safer
