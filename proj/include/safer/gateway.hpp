#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "safer/sim.hpp"

namespace httplib {
class Server;
}

namespace safer::gateway {

using nlohmann::json;

json to_json(const SaferState& s);
json to_json(const CycleReport& r);
// One object per trajectory row with the file's column names.
json trajectory_row_json(const CycleReport& r, double step);
json trajectory_columns();

struct Session {
  SaferState state;
  std::vector<CycleReport> reports;
};

class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionManager(SimConfig cfg, std::chrono::seconds idle_limit = std::chrono::minutes(30));

  const SimConfig& config() const { return cfg_; }

  std::string create();

  // Runs fn under the session's lock; false when the id is unknown.
  bool with_session(const std::string& id, const std::function<void(Session&)>& fn);

  // Drops sessions idle since before now - idle_limit; returns how many.
  std::size_t expire_idle(Clock::time_point now = Clock::now());
  std::size_t size() const;

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
    Clock::time_point last_used;
  };

  SimConfig cfg_;
  std::chrono::seconds idle_limit_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

// Thrown while decoding a request body; names the offending field.
class BadRequest : public std::runtime_error {
 public:
  BadRequest(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct CycleRequest {
  ScenarioStep step;  // repeat holds the cycle count
};

CycleRequest parse_cycle_request(const json& body);

void install_routes(httplib::Server& server, SessionManager& sessions);

}  // namespace safer::gateway
