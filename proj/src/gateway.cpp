#include "safer/gateway.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <random>

namespace safer::gateway {

namespace {

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json names(ThrusterSet s) {
  json out = json::array();
  for (ThrusterName n : s.members()) out.push_back(std::string(to_string(n)));
  return out;
}

json axes(RotAxisSet s) {
  json out = json::array();
  for (RotAxis a : kRotAxes)
    if (s.contains(a)) out.push_back(std::string(to_string(a)));
  return out;
}

json sensors_json(const InertialRefSensors& s) {
  return {{"roll_rate", s.roll_rate},   {"pitch_rate", s.pitch_rate},
          {"yaw_rate", s.yaw_rate},     {"velocity", vec(s.velocity)},
          {"acceleration", vec(s.acceleration)}};
}

json position_json(const PositionData& p) {
  const KinematicState k = from_position_data(p);
  return {{"position", vec(k.position)},
          {"velocity", vec(k.velocity)},
          {"angles", {{"phi", k.angles.phi}, {"theta", k.angles.theta}, {"psi", k.angles.psi}}},
          {"omega", vec(k.omega)}};
}

}  // namespace

json to_json(const SaferState& s) {
  json j = position_json(to_position_data(s.kinematics));
  j["clock"] = s.clock;
  j["t"] = static_cast<double>(s.clock) * s.step;
  j["step"] = s.step;
  j["sensors"] = sensors_json(s.sensors);
  j["aah"] = {{"engage", std::string(to_string(s.aah.engage))},
              {"active_axes", axes(s.aah.active_axes)},
              {"ignore_hcm", axes(s.aah.ignore_hcm)},
              {"press_clock", s.aah.press_clock}};
  j["failed"] = names(s.failed);
  j["last_fired"] = names(s.last_fired);
  j["history_length"] = s.history.size();
  return j;
}

json to_json(const CycleReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"kind", std::string(contracts::to_string(v.kind))},
                          {"location", v.location},
                          {"detail", v.detail}});
  json j = position_json(r.position);
  j["clock"] = r.clock;
  j["fired"] = names(r.fired);
  j["engage"] = std::string(to_string(r.engage));
  j["active_axes"] = axes(r.active_axes);
  j["ignore_hcm"] = axes(r.ignore_hcm);
  j["sensors"] = sensors_json(r.sensors);
  j["failed"] = names(r.failed);
  j["violations"] = std::move(violations);
  return j;
}

json trajectory_columns() {
  return {"clock", "t",     "x",   "y",      "z",      "vx",     "vy",    "vz",
          "phi",   "theta", "psi", "omega1", "omega2", "omega3", "fired", "aah_active"};
}

json trajectory_row_json(const CycleReport& r, double step) {
  const PositionData& p = r.position;
  return {{"clock", r.clock},  {"t", static_cast<double>(r.clock) * step},
          {"x", p[0]},         {"y", p[1]},
          {"z", p[2]},         {"vx", p[3]},
          {"vy", p[4]},        {"vz", p[5]},
          {"phi", p[6]},       {"theta", p[7]},
          {"psi", p[8]},       {"omega1", p[9]},
          {"omega2", p[10]},   {"omega3", p[11]},
          {"fired", names(r.fired)}, {"aah_active", axes(r.active_axes)}};
}

SessionManager::SessionManager(SimConfig cfg, std::chrono::seconds idle_limit)
    : cfg_(std::move(cfg)), idle_limit_(idle_limit) {}

std::string SessionManager::create() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  auto entry = std::make_shared<Entry>();
  entry->session.state = reset(cfg_.step);
  entry->last_used = Clock::now();
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    id = fmt::format("{:016x}{:04x}", rng(), ++counter_ & 0xffff);
  } while (sessions_.contains(id));
  sessions_.emplace(id, std::move(entry));
  return id;
}

bool SessionManager::with_session(const std::string& id, const std::function<void(Session&)>& fn) {
  std::shared_ptr<Entry> entry;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return false;
    entry = it->second;
  }
  std::lock_guard lock(entry->mutex);
  entry->last_used = Clock::now();
  fn(entry->session);
  return true;
}

std::size_t SessionManager::expire_idle(Clock::time_point now) {
  std::lock_guard lock(mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      std::lock_guard entry_lock(it->second->mutex);
      idle = now - it->second->last_used > idle_limit_;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

namespace {

AxisCommand axis_value(const json& v, const std::string& field) {
  if (v.is_number_integer()) {
    const auto i = v.get<long long>();
    if (i >= -1 && i <= 1) return static_cast<AxisCommand>(i);
  } else if (v.is_string()) {
    if (auto c = parse_axis_command(v.get<std::string>())) return *c;
  }
  throw BadRequest(field, fmt::format("{}: expected -1, 0, 1 or NEG, ZERO, POS", field));
}

}  // namespace

CycleRequest parse_cycle_request(const json& body) {
  if (!body.is_object()) throw BadRequest("body", "body must be a JSON object");
  CycleRequest req;

  if (!body.contains("mode") || !body["mode"].is_string())
    throw BadRequest("mode", "mode: expected \"TRAN\" or \"ROT\"");
  auto mode = parse_control_mode(body["mode"].get<std::string>());
  if (!mode) throw BadRequest("mode", "mode: expected \"TRAN\" or \"ROT\"");
  req.step.switches.mode = *mode;

  if (body.contains("aahButton")) {
    const json& b = body["aahButton"];
    auto button = b.is_string() ? parse_aah_button(b.get<std::string>()) : std::nullopt;
    if (!button) throw BadRequest("aahButton", "aahButton: expected \"UP\" or \"DOWN\"");
    req.step.switches.aah_button = *button;
  }

  if (!body.contains("grip") || !body["grip"].is_array() || body["grip"].size() != 4)
    throw BadRequest("grip", "grip: expected an array of 4 slots");
  for (int i = 0; i < 4; ++i)
    req.step.grip.slots[i] = axis_value(body["grip"][i], fmt::format("grip[{}]", i));

  if (body.contains("aahOverride") && !body["aahOverride"].is_null()) {
    const json& o = body["aahOverride"];
    if (!o.is_array() || o.size() != 3)
      throw BadRequest("aahOverride", "aahOverride: expected [roll, pitch, yaw]");
    RotCommand r;
    for (int i = 0; i < 3; ++i) r[kRotAxes[i]] = axis_value(o[i], fmt::format("aahOverride[{}]", i));
    req.step.aah_override = r;
  }

  req.step.repeat = 1;
  if (body.contains("count")) {
    const json& c = body["count"];
    if (!c.is_number_integer() || c.get<long long>() < 1 || c.get<long long>() > 100000)
      throw BadRequest("count", "count: expected an integer in [1, 100000]");
    req.step.repeat = c.get<int>();
  }
  return req;
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message,
                 const std::string& field = {}) {
  json body{{"error", message}};
  if (!field.empty()) body["field"] = field;
  reply(res, status, body);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    throw BadRequest("body", "body is not valid JSON");
  }
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions) {
  // Every handler sweeps idle sessions first.
  auto session_route = [&sessions](auto handler) {
    return [&sessions, handler](const httplib::Request& req, httplib::Response& res) {
      sessions.expire_idle();
      const std::string id = req.matches[1];
      try {
        const json body = req.method == "POST" ? parse_body(req) : json::object();
        bool found = sessions.with_session(id, [&](Session& s) { handler(s, body, res); });
        if (!found) reply_error(res, 404, fmt::format("unknown session '{}'", id));
      } catch (const BadRequest& e) {
        reply_error(res, 400, e.what(), e.field());
      }
    };
  };

  server.Post("/api/session", [&sessions](const httplib::Request&, httplib::Response& res) {
    sessions.expire_idle();
    const std::string id = sessions.create();
    json state;
    sessions.with_session(id, [&](Session& s) { state = to_json(s.state); });
    reply(res, 201, {{"sessionId", id}, {"state", state}});
  });

  server.Get(R"(/api/session/([^/]+)/state)",
             session_route([](Session& s, const json&, httplib::Response& res) {
               reply(res, 200, to_json(s.state));
             }));

  server.Post(R"(/api/session/([^/]+)/cycle)",
              session_route([&sessions](Session& s, const json& body, httplib::Response& res) {
                const CycleRequest req = parse_cycle_request(body);
                Scenario one;
                one.steps.push_back(req.step);
                auto reports = run_scenario(s.state, sessions.config(), one);
                json out = json::array();
                for (const auto& r : reports) out.push_back(to_json(r));
                s.reports.insert(s.reports.end(), reports.begin(), reports.end());
                reply(res, 200, {{"reports", out}});
              }));

  server.Post(R"(/api/session/([^/]+)/fault)",
              session_route([](Session& s, const json& body, httplib::Response& res) {
                if (!body.contains("thruster") || !body["thruster"].is_string())
                  throw BadRequest("thruster", "thruster: expected a thruster name");
                auto name = parse_thruster_name(body["thruster"].get<std::string>());
                if (!name) throw BadRequest("thruster", "thruster: unknown thruster name");
                if (!body.contains("broken") || !body["broken"].is_boolean())
                  throw BadRequest("broken", "broken: expected true or false");
                set_fault(s.state, *name, body["broken"].get<bool>());
                reply(res, 200, to_json(s.state));
              }));

  server.Post(R"(/api/session/([^/]+)/reset)",
              session_route([&sessions](Session& s, const json&, httplib::Response& res) {
                s.state = reset(sessions.config().step);
                s.reports.clear();
                reply(res, 200, to_json(s.state));
              }));

  server.Get(R"(/api/session/([^/]+)/trajectory)",
             session_route([](Session& s, const json&, httplib::Response& res) {
               json rows = json::array();
               for (const auto& r : s.reports) rows.push_back(trajectory_row_json(r, s.state.step));
               reply(res, 200, {{"columns", trajectory_columns()}, {"rows", rows}});
             }));
}

}  // namespace safer::gateway
