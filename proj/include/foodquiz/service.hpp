#ifndef FOODQUIZ_SERVICE_HPP_
#define FOODQUIZ_SERVICE_HPP_

#include <filesystem>
#include <memory>
#include <string>

#include "foodquiz/common.hpp"
#include "foodquiz/engine.hpp"
#include "foodquiz/session_store.hpp"

namespace foodquiz {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path quiz_path;
  std::filesystem::path data_dir = "data";
  std::string export_salt;
  std::string admin_token;
  double cutoff = kDefaultBmiCutoff;
};

struct ApiResponse {
  int status = 200;
  /// JSON body unless `raw` is set.
  json body = json::object();
  std::optional<std::string> raw;
  std::string content_type = "application/json";
};

/// Endpoint logic independent of the HTTP transport.
class QuizService {
 public:
  QuizService(QuizSpec spec, const ServiceConfig& config, Clock clock = wall_clock_ms);

  ApiResponse create_session();
  ApiResponse next(const std::string& id) const;
  ApiResponse answer(const std::string& id, const std::string& body);
  ApiResponse result(const std::string& id) const;
  ApiResponse demographics(const std::string& id, const std::string& body);
  /// `authorization` is the raw Authorization header ("Bearer <token>").
  ApiResponse admin_export(const std::string& authorization) const;

  const QuizEngine& engine() const { return engine_; }
  SessionStore& store() { return *store_; }
  const ServiceConfig& config() const { return config_; }

 private:
  ServiceConfig config_;
  QuizEngine engine_;
  std::unique_ptr<SessionStore> store_;
};

/// Reads and validates the quiz at config.quiz_path.
QuizSpec load_service_quiz(const ServiceConfig& config);

/// cpp-httplib front end for QuizService.
class HttpServer {
 public:
  explicit HttpServer(QuizService& service);
  ~HttpServer();

  /// Binds and serves on a background thread; returns the bound port
  /// (useful with port 0).
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace foodquiz

#endif  // FOODQUIZ_SERVICE_HPP_
