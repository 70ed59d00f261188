// Registry of the simulator's named types and their data invariants.

#include <fmt/format.h>

#include "safer/aah.hpp"
#include "safer/commands.hpp"
#include "safer/contracts.hpp"
#include "safer/dynamics.hpp"
#include "safer/thrusters.hpp"

namespace safer::contracts {

namespace {

template <typename Axis>
bool total_over(const std::map<Axis, AxisCommand>& m) {
  if (m.size() != 3) return false;
  for (int i = 0; i < 3; ++i)
    if (!m.contains(static_cast<Axis>(i))) return false;
  return true;
}

template <typename Axis>
std::string render_domain(const std::map<Axis, AxisCommand>& m) {
  std::string keys;
  for (const auto& [axis, cmd] : m) {
    if (!keys.empty()) keys += ",";
    keys += to_string(axis);
  }
  return "dom = {" + keys + "}";
}

bool valid_axis_command(AxisCommand c) { return sign(c) >= -1 && sign(c) <= 1; }

template <typename Axis>
bool valid_axis_map(const AxisMap<Axis>& m) {
  for (int i = 0; i < 3; ++i)
    if (!valid_axis_command(m[static_cast<Axis>(i)])) return false;
  return true;
}

void populate(InvariantRegistry& r) {
  r.define<AxisCommand>("AxisCommand", valid_axis_command,
                        [](const AxisCommand& c) { return fmt::format("{}", sign(c)); });

  r.define<TranCommand>("TranCommand", valid_axis_map<TranAxis>,
                        [](const TranCommand& c) { return to_string(c); });
  r.define<TranCommandMap>("TranCommand", total_over<TranAxis>, render_domain<TranAxis>);
  r.define<RotCommand>("RotCommand", valid_axis_map<RotAxis>,
                       [](const RotCommand& c) { return to_string(c); });
  r.define<RotCommandMap>("RotCommand", total_over<RotAxis>, render_domain<RotAxis>);

  r.define<SixDofCommand>(
      "SixDofCommand",
      [](const SixDofCommand& c) { return valid_axis_map(c.tran) && valid_axis_map(c.rot); },
      [](const SixDofCommand& c) { return to_string(c); });

  r.define<HandGripPosition>(
      "HandGripPosition",
      [](const HandGripPosition& g) {
        for (AxisCommand c : g.slots)
          if (!valid_axis_command(c)) return false;
        return true;
      },
      [](const HandGripPosition& g) { return to_string(g); });

  r.define<ThrusterSet>(
      "ThrusterSet", [](const ThrusterSet& s) { return s.size() <= kThrusterCount; },
      [](const ThrusterSet& s) { return "{" + join(s, ",") + "}"; });

  r.define<ThrusterGeometry>(
      "ThrusterGeometry", [](const ThrusterGeometry& g) { return geometry_problems(g).empty(); },
      [](const ThrusterGeometry& g) { return geometry_problems(g).front(); });

  r.define<SelectionTable>(
      "SelectionTable", [](const SelectionTable& t) { return table_problems(t).empty(); },
      [](const SelectionTable& t) { return table_problems(t).front(); });

  r.define<AahState>("AahState", aah_state_valid, [](const AahState& s) {
    return fmt::format("{} active [{}] ignore [{}]", to_string(s.engage), to_string(s.active_axes),
                       to_string(s.ignore_hcm));
  });

  r.define<InertialRefSensors>("InertialRefSensors", sensors_finite);

  r.define<AahThresholds>("AahThresholds", [](const AahThresholds& t) {
    return t.eps_roll > 0 && t.eps_pitch > 0 && t.eps_yaw > 0;
  });

  r.define<BodyParams>(
      "BodyParams", [](const BodyParams& p) { return body_params_problem(p).empty(); },
      [](const BodyParams& p) { return body_params_problem(p); });

  r.define<KinematicState>("KinematicState",
                           [](const KinematicState& s) { return is_finite(s); });

  r.define<ContractViolation>(
      "ContractViolation", [](const ContractViolation& v) { return !v.location.empty(); });
}

}  // namespace

const InvariantRegistry& domain_registry() {
  static const InvariantRegistry& registry = *[] {
    auto* r = new InvariantRegistry;
    populate(*r);
    return r;
  }();
  return registry;
}

}  // namespace safer::contracts
