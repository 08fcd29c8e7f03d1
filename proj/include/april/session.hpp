#pragma once

#include <atomic>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "april/loops.hpp"
#include "april/serialization.hpp"

namespace httplib {
class Server;
}

namespace april {

/// Request-level failure carrying the HTTP status it maps to.
class SessionError : public std::runtime_error {
 public:
  SessionError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// APRIL loops driven by a human expert, one per session, checkpointed to `directory/<id>.json` after
/// creation and after every verdict. Candidate selection runs on a background thread; while it runs
/// the session has no comparison to offer.
class SessionManager {
 public:
  /// Loads every checkpoint found in `directory` and resumes it.
  explicit SessionManager(std::filesystem::path directory, LoopConfig base = LoopConfig::defaults(Environment::mountain_car));
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Body: {environment, overrides (or config), seed}. Returns {session_id, iteration}.
  json create(const json& request);
  /// Pending comparison, or nothing while the next candidate is being computed.
  std::optional<json> comparison(const std::string& id);
  /// Body: {comparison_id, winner: "candidate" | "incumbent"}. Re-posting the verdict already applied to
  /// a comparison is acknowledged without effect.
  json verdict(const std::string& id, const json& body);
  json progress(const std::string& id);
  json archive(const std::string& id);
  std::vector<std::string> ids() const;
  /// Blocks until the session's background computation (if any) has finished.
  void wait_idle(const std::string& id);

 private:
  struct Session {
    Session(std::string id_, LoopConfig config_, AprilState state_)
        : id(std::move(id_)), config(std::move(config_)), state(std::move(state_)) {}

    std::string id;
    LoopConfig config;
    AprilState state;
    std::optional<Proposal> pending;
    std::future<void> worker;
    std::atomic<bool> computing{false};
    std::string last_comparison;
    std::string last_winner;
    json history = json::array();
    std::vector<double> incumbent_scores;
    std::vector<Eigen::Index> dimensions;
    std::vector<double> sigmas;
    std::mutex mutex;
  };

  Session& find(const std::string& id);
  void start_proposal(Session& session);
  void checkpoint(const Session& session) const;
  std::unique_ptr<Session> load(const std::filesystem::path& file) const;
  static std::string comparison_id(const Session& session, int iteration);

  std::filesystem::path directory_;
  LoopConfig base_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  int next_number_ = 1;
};

/// Binds the session API routes onto a server.
void register_routes(httplib::Server& server, SessionManager& manager);

/// Blocking service on host:port. Returns a nonzero status when the address cannot be bound.
int serve(const std::filesystem::path& directory, const LoopConfig& base, const std::string& host, int port);

}  // namespace april
