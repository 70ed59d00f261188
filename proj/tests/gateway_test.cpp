#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "safer/gateway.hpp"
#include "test_support.hpp"

namespace {

using namespace safer;
using namespace safer::gateway;
using safer::testing::shipped_config;

class GatewayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    install_routes(server_, sessions_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }

  json post(const std::string& path, const json& body, int expected_status) {
    auto res = client().Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected_status) << path << " " << res->body;
    return json::parse(res->body);
  }
  json get(const std::string& path, int expected_status) {
    auto res = client().Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected_status) << path << " " << res->body;
    return json::parse(res->body);
  }
  std::string create() { return post("/api/session", json::object(), 201)["sessionId"]; }
  std::string base(const std::string& id) { return "/api/session/" + id; }

  SessionManager sessions_{shipped_config()};
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

const json kRightBody = {{"mode", "TRAN"}, {"grip", {0, 0, 1, 0}}};
const json kNullBody = {{"mode", "TRAN"}, {"grip", {0, 0, 0, 0}}};

TEST_F(GatewayTest, CreateReturnsAFreshState) {
  const json r = post("/api/session", json::object(), 201);
  ASSERT_TRUE(r.contains("sessionId"));
  EXPECT_EQ(r["state"]["clock"], 0);
  EXPECT_EQ(r["state"]["position"], json::array({0.0, 0.0, 0.0}));
  EXPECT_EQ(r["state"]["aah"]["engage"], "OFF");
  EXPECT_EQ(r["state"]["history_length"], 1);
  EXPECT_EQ(sessions_.size(), 1u);
}

TEST_F(GatewayTest, NullCycleFiresNothing) {
  const std::string id = create();
  const json r = post(base(id) + "/cycle", kNullBody, 200);
  ASSERT_EQ(r["reports"].size(), 1u);
  EXPECT_EQ(r["reports"][0]["fired"], json::array());
  EXPECT_EQ(r["reports"][0]["clock"], 1);
  EXPECT_EQ(r["reports"][0]["violations"], json::array());
}

TEST_F(GatewayTest, RightRunMovesRight) {
  const std::string id = create();
  json body = kRightBody;
  body["count"] = 15;
  const json r = post(base(id) + "/cycle", body, 200);
  ASSERT_EQ(r["reports"].size(), 15u);
  double previous = 0.0;
  for (const auto& rep : r["reports"]) {
    EXPECT_EQ(rep["fired"], json::array({"R2R", "R4R"}));
    const double y = rep["position"][1];
    EXPECT_GT(y, previous);
    previous = y;
  }
  const json state = get(base(id) + "/state", 200);
  EXPECT_EQ(state["clock"], 15);
  EXPECT_EQ(state["last_fired"], json::array({"R2R", "R4R"}));
}

TEST_F(GatewayTest, StringSlotsAndOverride) {
  const std::string id = create();
  const json body = {{"mode", "ROT"},
                     {"aahButton", "UP"},
                     {"grip", {"ZERO", "ZERO", "ZERO", "ZERO"}},
                     {"aahOverride", {"ZERO", "ZERO", "POS"}}};
  const json r = post(base(id) + "/cycle", body, 200);
  // AAH is off, so the override is masked.
  EXPECT_EQ(r["reports"][0]["fired"], json::array());
}

TEST_F(GatewayTest, UnknownSessionIs404) {
  EXPECT_TRUE(get("/api/session/nope/state", 404).contains("error"));
  EXPECT_TRUE(post("/api/session/nope/cycle", kNullBody, 404).contains("error"));
}

TEST_F(GatewayTest, BadBodiesAre400WithTheField) {
  const std::string id = create();
  EXPECT_EQ(post(base(id) + "/cycle", {{"grip", {0, 0, 0, 0}}}, 400)["field"], "mode");
  EXPECT_EQ(post(base(id) + "/cycle", {{"mode", "TRAN"}, {"grip", {0, 0, 2, 0}}}, 400)["field"],
            "grip[2]");
  EXPECT_EQ(post(base(id) + "/cycle", {{"mode", "TRAN"}, {"grip", {0, 0}}}, 400)["field"], "grip");
  json body = kNullBody;
  body["count"] = 0;
  EXPECT_EQ(post(base(id) + "/cycle", body, 400)["field"], "count");
  auto res = client().Post(base(id) + "/cycle", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["field"], "body");
  // Nothing ran.
  EXPECT_EQ(get(base(id) + "/state", 200)["clock"], 0);
}

TEST_F(GatewayTest, FaultEndpoint) {
  const std::string id = create();
  const json s = post(base(id) + "/fault", {{"thruster", "F2"}, {"broken", true}}, 200);
  EXPECT_EQ(s["failed"], json::array({"F2"}));
  EXPECT_EQ(post(base(id) + "/fault", {{"thruster", "Q1"}, {"broken", true}}, 400)["field"],
            "thruster");
  EXPECT_EQ(post(base(id) + "/fault", {{"thruster", "F2"}}, 400)["field"], "broken");
  json body = {{"mode", "TRAN"}, {"grip", {0, 0, 0, 1}}};
  const json r = post(base(id) + "/cycle", body, 200);
  const json omega = r["reports"][0]["omega"];
  EXPECT_GT(std::abs(omega[1].get<double>()) + std::abs(omega[2].get<double>()), 0.0);
  EXPECT_EQ(post(base(id) + "/fault", {{"thruster", "F2"}, {"broken", false}}, 200)["failed"],
            json::array());
}

TEST_F(GatewayTest, ResetClearsEverything) {
  const std::string id = create();
  post(base(id) + "/fault", {{"thruster", "F2"}, {"broken", true}}, 200);
  post(base(id) + "/cycle", kRightBody, 200);
  const json s = post(base(id) + "/reset", json::object(), 200);
  EXPECT_EQ(s["clock"], 0);
  EXPECT_EQ(s["failed"], json::array());
  EXPECT_EQ(get(base(id) + "/trajectory", 200)["rows"], json::array());
}

TEST_F(GatewayTest, ReadsAreIdempotent) {
  const std::string id = create();
  post(base(id) + "/cycle", kRightBody, 200);
  const json a = get(base(id) + "/state", 200);
  const json b = get(base(id) + "/state", 200);
  EXPECT_EQ(a, b);
  EXPECT_EQ(get(base(id) + "/trajectory", 200), get(base(id) + "/trajectory", 200));
}

TEST_F(GatewayTest, TrajectoryMatchesTheFileColumns) {
  const std::string id = create();
  json body = kRightBody;
  body["count"] = 3;
  post(base(id) + "/cycle", body, 200);
  const json t = get(base(id) + "/trajectory", 200);
  ASSERT_EQ(t["columns"].size(), 16u);
  EXPECT_EQ(t["columns"][0], "clock");
  EXPECT_EQ(t["columns"][15], "aah_active");
  ASSERT_EQ(t["rows"].size(), 3u);
  EXPECT_EQ(t["rows"][2]["clock"], 3);
  EXPECT_EQ(t["rows"][2]["fired"], json::array({"R2R", "R4R"}));
}

TEST_F(GatewayTest, ConcurrentCyclesAreSerialisedPerSession) {
  const std::string id = create();
  constexpr int kClients = 8, kPerClient = 5;
  std::vector<std::thread> threads;
  for (int i = 0; i < kClients; ++i)
    threads.emplace_back([&] {
      for (int k = 0; k < kPerClient; ++k) {
        auto res = client().Post(base(id) + "/cycle", kRightBody.dump(), "application/json");
        ASSERT_TRUE(res);
        ASSERT_EQ(res->status, 200);
      }
    });
  for (auto& t : threads) t.join();
  const json s = get(base(id) + "/state", 200);
  EXPECT_EQ(s["clock"], kClients * kPerClient);
  EXPECT_EQ(s["history_length"], kClients * kPerClient + 1);
  // Same end state as a sequential run of the same commands.
  SaferState ref = reset();
  for (int i = 0; i < kClients * kPerClient; ++i)
    sensor_control_cycle(ref, shipped_config(), {}, HandGripPosition{{AxisCommand::Zero, AxisCommand::Zero, AxisCommand::Pos, AxisCommand::Zero}});
  EXPECT_EQ(s["position"][1].get<double>(), ref.kinematics.position.y);
  const json t = get(base(id) + "/trajectory", 200);
  for (std::size_t i = 0; i < t["rows"].size(); ++i) EXPECT_EQ(t["rows"][i]["clock"], i + 1);
}

TEST(SessionManager, ExpiresIdleSessions) {
  SessionManager m(shipped_config(), std::chrono::seconds(60));
  const std::string a = m.create();
  const std::string b = m.create();
  EXPECT_NE(a, b);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.expire_idle(SessionManager::Clock::now()), 0u);
  EXPECT_EQ(m.expire_idle(SessionManager::Clock::now() + std::chrono::seconds(61)), 2u);
  EXPECT_EQ(m.size(), 0u);
  EXPECT_FALSE(m.with_session(a, [](Session&) {}));
}

TEST(ParseCycleRequest, DefaultsAndValues) {
  const CycleRequest r = parse_cycle_request(kRightBody);
  EXPECT_EQ(r.step.switches, (SwitchPositions{ControlMode::Tran, AahButton::Up}));
  EXPECT_EQ(r.step.grip.lateral(), AxisCommand::Pos);
  EXPECT_FALSE(r.step.aah_override.has_value());
  EXPECT_EQ(r.step.repeat, 1);
  const CycleRequest o = parse_cycle_request(
      {{"mode", "ROT"}, {"aahButton", "DOWN"}, {"grip", {-1, "+", "0", "NEG"}}, {"aahOverride", {1, 0, -1}}, {"count", 7}});
  EXPECT_EQ(o.step.switches.aah_button, AahButton::Down);
  EXPECT_EQ(o.step.grip, (HandGripPosition{{AxisCommand::Neg, AxisCommand::Pos, AxisCommand::Zero, AxisCommand::Neg}}));
  EXPECT_EQ(*o.step.aah_override, (RotCommand{AxisCommand::Pos, AxisCommand::Zero, AxisCommand::Neg}));
  EXPECT_EQ(o.step.repeat, 7);
}

TEST(ParseCycleRequest, RejectsNamingTheField) {
  auto field_of = [](const json& body) {
    try {
      parse_cycle_request(body);
    } catch (const BadRequest& e) {
      return e.field();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(field_of(json::array()), "body");
  EXPECT_EQ(field_of({{"mode", "HOVER"}, {"grip", {0, 0, 0, 0}}}), "mode");
  EXPECT_EQ(field_of({{"mode", "TRAN"}, {"aahButton", "SIDE"}, {"grip", {0, 0, 0, 0}}}), "aahButton");
  EXPECT_EQ(field_of({{"mode", "TRAN"}, {"grip", {0, 0, 0, 0}}, {"aahOverride", {0, 0}}}), "aahOverride");
  EXPECT_EQ(field_of({{"mode", "TRAN"}, {"grip", {0, 0, 0, 0}}, {"count", 100001}}), "count");
  EXPECT_EQ(field_of({{"mode", "TRAN"}, {"grip", {0, 0, 0, 0}}, {"count", 1.5}}), "count");
}

TEST(JsonEncoding, ReportCarriesViolations) {
  CycleReport r;
  r.violations.push_back({contracts::ViolationKind::Postcondition, "control_cycle", "x"});
  const json j = to_json(r);
  ASSERT_EQ(j["violations"].size(), 1u);
  EXPECT_EQ(j["violations"][0]["kind"], "Postcondition");
  EXPECT_EQ(j["violations"][0]["location"], "control_cycle");
}

}  // namespace
