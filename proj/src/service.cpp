#include "foodquiz/service.hpp"

#include <httplib.h>

#include <cmath>
#include <thread>

namespace foodquiz {

namespace {

ApiResponse reply(int status, json body) {
  ApiResponse r;
  r.status = status;
  r.body = std::move(body);
  return r;
}

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return reply(status, {{"error", code}, {"message", message}});
}

int status_for(const Error& e) {
  const std::string& c = e.code();
  if (c == "not_found") return 404;
  if (c == "already_answered" || c == "session_complete" || c == "incomplete" ||
      c == "already_submitted") {
    return 409;
  }
  return 422;
}

template <typename F>
ApiResponse guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_response(status_for(e), e.code(), e.what());
  }
}

std::optional<json> parse_body(const std::string& body) {
  if (trim(body).empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

json question_json(const Question& q) {
  json choices = json::array();
  for (const auto& c : q.choices) choices.push_back(c.label);
  json out{{"id", q.id}, {"text", q.text}, {"choices", std::move(choices)}};
  if (q.image) out["image"] = *q.image;
  return out;
}

}  // namespace

QuizSpec load_service_quiz(const ServiceConfig& config) {
  return quiz_from_json(read_json_file(config.quiz_path));
}

QuizService::QuizService(QuizSpec spec, const ServiceConfig& config, Clock clock)
    : config_(config), engine_(std::move(spec)) {
  store_ = std::make_unique<SessionStore>(engine_, config_.data_dir, config_.export_salt,
                                          config_.cutoff, std::move(clock));
}

ApiResponse QuizService::create_session() {
  return guarded([&] {
    std::string id = store_->create_session();
    return reply(201, {{"session_id", id}});
  });
}

ApiResponse QuizService::next(const std::string& id) const {
  return guarded([&] {
    Session s = store_->snapshot(id);
    const Question* q = engine_.next_question(s);
    if (!q) return reply(200, {{"done", true}});
    return reply(200, {{"question", question_json(*q)},
                       {"answered", s.transcript.size()}});
  });
}

ApiResponse QuizService::answer(const std::string& id, const std::string& body) {
  auto parsed = parse_body(body);
  if (!parsed) return error_response(400, "bad_json", "request body is not JSON");
  const json& j = *parsed;
  if (!j.is_object() || !j.contains("question_id") || !j["question_id"].is_string() ||
      !j.contains("choice_index") || !j["choice_index"].is_number_integer()) {
    return error_response(422, "bad_answer", "need string question_id and integer choice_index");
  }
  return guarded([&] {
    Session s = store_->answer(id, j["question_id"].get<std::string>(),
                               j["choice_index"].get<int>());
    return reply(200, {{"accepted", true}, {"complete", s.complete()}});
  });
}

ApiResponse QuizService::result(const std::string& id) const {
  return guarded([&] {
    Vote v = store_->result(id);
    return reply(200, {{"prediction", v.label ? "overweight" : "not_overweight"},
                       {"votes_true", v.votes_true},
                       {"votes_total", v.votes_total}});
  });
}

ApiResponse QuizService::demographics(const std::string& id, const std::string& body) {
  auto parsed = parse_body(body);
  if (!parsed) return error_response(400, "bad_json", "request body is not JSON");
  return guarded([&] {
    DemographicsResult r = store_->submit_demographics(id, demographics_from_json(*parsed));
    json out = json::object();
    if (r.bmi) out["bmi"] = std::round(*r.bmi * 100.0) / 100.0;
    if (r.agreed) out["agreed"] = *r.agreed;
    return reply(200, out);
  });
}

ApiResponse QuizService::admin_export(const std::string& authorization) const {
  if (config_.admin_token.empty() || authorization != "Bearer " + config_.admin_token) {
    return error_response(401, "unauthorized", "missing or invalid admin token");
  }
  ApiResponse r;
  r.raw = export_anonymized(store_->completed_records(), config_.export_salt);
  r.content_type = "application/x-ndjson";
  return r;
}

struct HttpServer::Impl {
  QuizService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(QuizService& s) : service(s) {
    auto send = [](httplib::Response& res, const ApiResponse& api) {
      res.status = api.status;
      if (api.raw) {
        res.set_content(*api.raw, api.content_type);
      } else {
        res.set_content(api.body.dump(), api.content_type);
      }
    };
    server.Post("/api/sessions", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, service.create_session());
    });
    server.Get(R"(/api/sessions/([^/]+)/next)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.next(req.matches[1]));
               });
    server.Post(R"(/api/sessions/([^/]+)/answers)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, service.answer(req.matches[1], req.body));
                });
    server.Get(R"(/api/sessions/([^/]+)/result)",
               [this, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.result(req.matches[1]));
               });
    server.Post(R"(/api/sessions/([^/]+)/demographics)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, service.demographics(req.matches[1], req.body));
                });
    server.Get("/api/admin/export", [this, send](const httplib::Request& req,
                                                 httplib::Response& res) {
      send(res, service.admin_export(req.get_header_value("Authorization")));
    });
  }
};

HttpServer::HttpServer(QuizService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->server.bind_to_port(host, port)) bound = -1;
  if (bound < 0) throw io_error("bind_failed", "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw io_error("bind_failed", "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace foodquiz
