#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spcdt/scene.hpp"

namespace httplib {
class Server;
}

namespace spcdt {

struct ServiceConfig {
  std::filesystem::path data_dir;  // dataset_id "iris" resolves to <data_dir>/iris.csv
};

struct Response {
  int status = 200;
  std::string body;  // JSON
};

/// Immutable state published after every accepted edit.
struct SessionSnapshot {
  SceneGraph scene;
  std::string scene_json;
  std::optional<std::string> dataset_id;
  std::shared_ptr<const Dataset> validation;
};

/// Session store and request handlers. `handle` is the whole API and needs
/// no sockets; HttpServer only forwards requests to it.
///
/// Edits on one session are serialized; readers load the current snapshot
/// atomically and never block on writers.
class Service {
 public:
  explicit Service(ServiceConfig config);

  Response handle(const std::string& method, const std::string& path, const std::string& body = {},
                  const std::map<std::string, std::string>& query = {});

  std::size_t session_count() const;

 private:
  struct Session {
    std::mutex write;
    std::shared_ptr<const SessionSnapshot> current;
    std::vector<std::shared_ptr<const SessionSnapshot>> undo;

    std::shared_ptr<const SessionSnapshot> load() const { return std::atomic_load(&current); }
    void publish(std::shared_ptr<const SessionSnapshot> next) { std::atomic_store(&current, std::move(next)); }
  };

  Response create_session(const std::string& body);
  Response patch_threshold(Session& s, const std::string& body);
  Response patch_layout(Session& s, const std::string& body);
  Response undo(Session& s);
  Response report(const SessionSnapshot& snap, const std::string& kind,
                  const std::map<std::string, std::string>& query) const;
  Response workspace(const SessionSnapshot& snap) const;

  std::shared_ptr<Session> find(const std::string& id) const;
  Dataset load_dataset_id(const std::string& id) const;

  ServiceConfig config_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 1;
};

/// HTTP/1.1 front end. Optionally serves a static directory (the UI bundle).
class HttpServer {
 public:
  explicit HttpServer(Service& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port`, or to a free port when it is 0. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void run();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace spcdt
