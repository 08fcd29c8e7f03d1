#include "april/session.hpp"

#include <cstdio>
#include <fstream>

#include <httplib.h>

namespace april {

namespace fs = std::filesystem;

namespace {

json trajectory_record(const Trajectory& t) { return to_json(t); }

std::string session_name(int number) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%04d", number);
  return buf;
}

}  // namespace

SessionManager::SessionManager(fs::path directory, LoopConfig base)
    : directory_(std::move(directory)), base_(std::move(base)) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (!fs::is_directory(directory_)) throw std::runtime_error("session directory unusable: " + directory_.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory_)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto session = load(file);
    const int number = std::atoi(session->id.c_str() + 1);
    next_number_ = std::max(next_number_, number + 1);
    Session& s = *session;
    sessions_.emplace(s.id, std::move(session));
    start_proposal(s);
  }
}

SessionManager::~SessionManager() {
  const std::lock_guard lock(sessions_mutex_);
  for (auto& [id, s] : sessions_) {
    if (s->worker.valid()) s->worker.wait();
  }
}

std::string SessionManager::comparison_id(const Session& session, int iteration) {
  return session.id + "-" + std::to_string(iteration);
}

SessionManager::Session& SessionManager::find(const std::string& id) {
  const std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError(404, "unknown session '" + id + "'");
  return *it->second;
}

std::vector<std::string> SessionManager::ids() const {
  const std::lock_guard lock(sessions_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

void SessionManager::start_proposal(Session& s) {
  s.computing = true;
  s.worker = std::async(std::launch::async, [&s] {
    std::unique_lock lock(s.mutex);
    AprilState copy = s.state;
    const LoopConfig config = s.config;
    lock.unlock();
    Proposal proposal = april_propose(copy, config);
    lock.lock();
    s.state.book = std::move(copy.book);
    s.pending = std::move(proposal);
    s.computing = false;
  });
}

void SessionManager::wait_idle(const std::string& id) {
  Session& s = find(id);
  std::future<void>* worker = nullptr;
  {
    const std::lock_guard lock(s.mutex);
    worker = &s.worker;
  }
  if (worker->valid()) worker->wait();
}

void SessionManager::checkpoint(const Session& s) const {
  const json doc = {{"schema_version", schema_version},
                    {"session_id", s.id},
                    {"config", to_json(s.config)},
                    {"state", to_json(s.state)},
                    {"history", s.history},
                    {"incumbent_scores", s.incumbent_scores},
                    {"dimensions", s.dimensions},
                    {"sigmas", s.sigmas}};
  const fs::path target = directory_ / (s.id + ".json");
  const fs::path tmp = directory_ / (s.id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw SessionError(500, "cannot write checkpoint " + tmp.string());
    out << doc.dump() << "\n";
  }
  fs::rename(tmp, target);
}

std::unique_ptr<SessionManager::Session> SessionManager::load(const fs::path& file) const {
  std::ifstream in(file);
  const json doc = json::parse(in);
  check_schema(doc, "session checkpoint");
  auto s = std::make_unique<Session>(doc.at("session_id").get<std::string>(), loop_config_from_json(doc.at("config")),
                                     april_state_from_json(doc.at("state")));
  s->history = doc.at("history");
  s->incumbent_scores = doc.at("incumbent_scores").get<std::vector<double>>();
  s->dimensions = doc.at("dimensions").get<std::vector<Eigen::Index>>();
  s->sigmas = doc.at("sigmas").get<std::vector<double>>();
  if (!s->history.empty()) {
    s->last_comparison = s->history.back().at("comparison_id").get<std::string>();
    s->last_winner = s->history.back().at("winner").get<std::string>();
  }
  return s;
}

json SessionManager::create(const json& request) {
  if (!request.is_object()) throw SessionError(400, "request body must be a JSON object");
  LoopConfig config = base_;
  std::uint64_t seed = 0;
  bool have_seed = false;
  try {
    if (request.contains("environment")) {
      const Environment env = parse_environment(request.at("environment").get<std::string>());
      if (env != config.env.environment) config = LoopConfig::defaults(env);
    }
    for (const char* key : {"overrides", "config"}) {
      if (request.contains(key)) config = loop_config_from_json(request.at(key), config);
    }
    if (request.contains("seed")) {
      seed = request.at("seed").get<std::uint64_t>();
      have_seed = true;
    }
  } catch (const std::exception& e) {
    throw SessionError(400, e.what());
  }

  int number = 0;
  {
    const std::lock_guard lock(sessions_mutex_);
    number = next_number_++;
  }
  if (!have_seed) seed = 1000 + static_cast<std::uint64_t>(number);
  auto s = std::make_unique<Session>(session_name(number), config, april_initialize(config, seed));
  s->incumbent_scores.push_back(trajectory_score(s->state.incumbent_trajectory(), config.env));
  s->dimensions.push_back(s->state.book.size());
  s->sigmas.push_back(s->state.step.sigma);
  checkpoint(*s);

  Session& ref = *s;
  {
    const std::lock_guard lock(sessions_mutex_);
    sessions_.emplace(ref.id, std::move(s));
  }
  start_proposal(ref);
  return {{"session_id", ref.id}, {"iteration", 1}};
}

std::optional<json> SessionManager::comparison(const std::string& id) {
  Session& s = find(id);
  if (s.computing) return std::nullopt;
  const std::lock_guard lock(s.mutex);
  if (!s.pending) {
    if (s.worker.valid()) {
      try {
        s.worker.get();
      } catch (const std::exception& e) {
        throw SessionError(500, std::string("candidate selection failed: ") + e.what());
      }
    }
    throw SessionError(500, "no comparison pending");
  }
  return json{{"comparison_id", comparison_id(s, s.pending->iteration)},
              {"iteration", s.pending->iteration},
              {"candidate", trajectory_record(s.pending->trajectory)},
              {"incumbent", trajectory_record(s.state.incumbent_trajectory())}};
}

json SessionManager::verdict(const std::string& id, const json& body) {
  Session& s = find(id);
  std::string cid;
  std::string winner;
  try {
    cid = body.at("comparison_id").get<std::string>();
    winner = body.at("winner").get<std::string>();
  } catch (const std::exception&) {
    throw SessionError(400, "verdict needs string fields comparison_id and winner");
  }
  if (winner != "candidate" && winner != "incumbent") {
    throw SessionError(400, "winner must be 'candidate' or 'incumbent'");
  }

  const std::lock_guard lock(s.mutex);
  if (cid == s.last_comparison) {
    if (winner != s.last_winner) throw SessionError(409, "comparison " + cid + " was already decided differently");
    return {{"accepted", true}, {"duplicate", true}, {"next_iteration", s.state.iteration + 1}};
  }
  if (!s.pending) throw SessionError(409, "no comparison pending; the next candidate is still being computed");
  if (cid != comparison_id(s, s.pending->iteration)) throw SessionError(409, "stale or unknown comparison " + cid);

  const bool wins = winner == "candidate";
  Proposal proposal = std::move(*s.pending);
  s.pending.reset();
  const IterationRecord record = april_apply(s.state, s.config, std::move(proposal), wins);
  s.last_comparison = cid;
  s.last_winner = winner;
  s.history.push_back({{"comparison_id", cid}, {"winner", winner}, {"iteration", record.iteration}});
  s.incumbent_scores.push_back(record.incumbent_score);
  s.dimensions.push_back(record.dimension);
  s.sigmas.push_back(record.sigma);
  checkpoint(s);
  if (s.worker.valid()) s.worker.get();
  // The worker takes the session lock itself, so it proceeds once this call returns.
  start_proposal(s);
  return {{"accepted", true}, {"duplicate", false}, {"next_iteration", s.state.iteration + 1}};
}

json SessionManager::progress(const std::string& id) {
  Session& s = find(id);
  const std::lock_guard lock(s.mutex);
  return {{"session_id", s.id},
          {"environment", to_string(s.config.env.environment)},
          {"iterations", s.state.iteration},
          {"incumbent_scores", s.incumbent_scores},
          {"dimensions", s.dimensions},
          {"sigmas", s.sigmas},
          {"D", s.state.book.size()},
          {"sigma", s.state.step.sigma},
          {"verdicts", s.history},
          {"computing", s.computing.load()}};
}

json SessionManager::archive(const std::string& id) {
  Session& s = find(id);
  const std::lock_guard lock(s.mutex);
  json demos = json::array();
  for (std::size_t i = 0; i < s.state.trajectories.size(); ++i) {
    demos.push_back({{"index", i},
                     {"incumbent", i == s.state.ranking.incumbent()},
                     {"score", trajectory_score(s.state.trajectories[i], s.config.env)},
                     {"policy", to_json(s.state.policies[i])},
                     {"trajectory", trajectory_record(s.state.trajectories[i])}});
  }
  json constraints = json::array();
  for (const auto& c : s.state.ranking.constraints()) constraints.push_back({{"loser", c.loser}, {"winner", c.winner}});
  return {{"session_id", s.id},
          {"schema_version", schema_version},
          {"incumbent", s.state.ranking.incumbent()},
          {"demonstrations", std::move(demos)},
          {"constraints", std::move(constraints)}};
}

void register_routes(httplib::Server& server, SessionManager& manager) {
  const auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const SessionError& e) {
        res.status = e.status();
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", std::string("malformed JSON: ") + e.what()}}.dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    };
  };
  const auto reply = [](httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };

  server.Post("/sessions", guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
                const json body = req.body.empty() ? json::object() : json::parse(req.body);
                reply(res, manager.create(body), 201);
              }));
  server.Get(R"(/sessions/([^/]+)/comparison)",
             guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
               const auto c = manager.comparison(req.matches[1]);
               if (!c) {
                 res.status = 204;
                 return;
               }
               reply(res, *c);
             }));
  server.Post(R"(/sessions/([^/]+)/verdict)",
              guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, manager.verdict(req.matches[1], json::parse(req.body)));
              }));
  server.Get(R"(/sessions/([^/]+)/progress)",
             guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, manager.progress(req.matches[1]));
             }));
  server.Get(R"(/sessions/([^/]+)/archive)",
             guarded([&manager, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, manager.archive(req.matches[1]));
             }));
}

int serve(const fs::path& directory, const LoopConfig& base, const std::string& host, int port) {
  SessionManager manager(directory, base);
  httplib::Server server;
  // SO_REUSEADDR only: SO_REUSEPORT would let a second server share a busy port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  register_routes(server, manager);
  if (!server.bind_to_port(host, port)) {
    std::fprintf(stderr, "serve: cannot bind %s:%d\n", host.c_str(), port);
    return 1;
  }
  std::fprintf(stderr, "serving %zu session(s) from %s on %s:%d\n", manager.ids().size(), directory.string().c_str(),
               host.c_str(), port);
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace april
