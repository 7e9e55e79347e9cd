#include "pbpoll/http.hpp"

#include <httplib.h>

#include "pbpoll/error.hpp"

namespace pbpoll {

int http_status(Errc code) {
  switch (code) {
    case Errc::WrongQuestion:
    case Errc::SessionNotActive:
    case Errc::PollClosed:
      return 409;
    case Errc::ParticipantBlocked:
    case Errc::SessionBlocked:
      return 403;
    case Errc::ValidationFailed:
    case Errc::ScreenedOut:
      return 422;
    case Errc::Unauthorized:
      return 401;
    case Errc::UnknownPoll:
    case Errc::UnknownSession:
      return 404;
    case Errc::IoError:
      return 500;
    default:
      return 400;
  }
}

Json next_question_to_json(const NextQuestion& next) {
  Json out{{"state", std::string(session_state_name(next.state))},
           {"position", next.position},
           {"total", next.total}};
  if (next.question) {
    const Question& q = *next.question;
    Json options = Json::array();
    for (const auto& o : q.options) options.push_back(option_to_json(o));
    out["question"] = Json{{"question_id", q.id},
                           {"kind", std::string(question_kind_name(q.kind))},
                           {"options", options},
                           {"position", next.position},
                           {"total", next.total}};
  }
  return out;
}

namespace {

std::string bearer(const httplib::Request& req) {
  const std::string h = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (h.size() > prefix.size() && h.compare(0, prefix.size(), prefix) == 0) return h.substr(prefix.size());
  return {};
}

Json body_json(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = parse_json(req.body);
  if (!j.is_object()) throw Error(Errc::ParseError, "request body must be a JSON object");
  return j;
}

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, Errc code, const std::string& message) {
  send(res, http_status(code), Json{{"error", std::string(errc_name(code))}, {"message", message}});
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const Json::exception& e) {
      send_error(res, Errc::ParseError, e.what());
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(Json{{"error", "Internal"}, {"message", e.what()}}.dump(), "application/json");
    }
  };
}

std::vector<Amount> amounts_from(const Json& body, const char* key) {
  if (!body.contains(key) || !body.at(key).is_array()) {
    throw Error(Errc::ValidationFailed, std::string("'") + key + "' must be an array of numbers");
  }
  std::vector<Amount> out;
  try {
    for (const auto& x : body.at(key)) out.push_back(amount_from_json(x));
  } catch (const Error& e) {
    throw Error(Errc::ValidationFailed, e.what());
  }
  return out;
}

}  // namespace

struct HttpServer::Impl {
  PollService& service;
  httplib::Server server;
  bool bound = false;

  explicit Impl(PollService& s) : service(s) {}
};

HttpServer::HttpServer(PollService& service, std::string static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  PollService& svc = service;

  srv.Post("/polls", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             send(res, 201, svc.create_poll(body_json(req), bearer(req)));
           }));
  srv.Get("/polls/:id", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, svc.poll_view(req.path_params.at("id")));
          }));
  srv.Post("/polls/:id/close", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             send(res, 200, svc.close_poll(req.path_params.at("id"), bearer(req)));
           }));
  srv.Post("/polls/:id/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const Json body = body_json(req);
             if (!body.contains("participant_id") || !body.at("participant_id").is_string()) {
               throw Error(Errc::InvalidConfig, "participant_id is required");
             }
             const auto ticket = svc.start_session(req.path_params.at("id"), body.at("participant_id"));
             send(res, 201,
                  Json{{"session_id", ticket.session_id},
                       {"token", ticket.token},
                       {"state", std::string(session_state_name(ticket.state))}});
           }));
  srv.Get("/polls/:id/export", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            res.status = 200;
            res.set_content(svc.export_responses(req.path_params.at("id"), bearer(req)), "application/x-ndjson");
          }));
  srv.Get("/sessions/:id", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, svc.session_view(req.path_params.at("id"), bearer(req)));
          }));
  srv.Post("/sessions/:id/ideal", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const Json body = body_json(req);
             const bool use_rescale = body.contains("rescale") && body.at("rescale").is_boolean() &&
                                      body.at("rescale").get<bool>();
             const std::string& sid = req.path_params.at("id");
             const auto ideal = svc.submit_ideal(sid, bearer(req), amounts_from(body, "values"), use_rescale);
             Json view = svc.session_view(sid, bearer(req));
             view["ideal"] = allocation_to_json(ideal);
             send(res, 200, view);
           }));
  srv.Get("/sessions/:id/next", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, next_question_to_json(svc.next_question(req.path_params.at("id"), bearer(req))));
          }));
  srv.Post("/sessions/:id/answers", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const Json body = body_json(req);
             if (!body.contains("question_id") || !body.at("question_id").is_string()) {
               throw Error(Errc::MalformedAnswer, "question_id is required");
             }
             Answer answer;
             if (body.contains("choice") && body.at("choice").is_number_integer()) {
               answer = body.at("choice").get<int>();
             } else if (body.contains("ranking") && body.at("ranking").is_array()) {
               try {
                 answer = body.at("ranking").get<std::vector<int>>();
               } catch (const Json::exception&) {
                 throw Error(Errc::MalformedAnswer, "ranking must list option indices");
               }
             } else {
               throw Error(Errc::MalformedAnswer, "answer needs an integer 'choice' or a 'ranking' array");
             }
             const std::string& sid = req.path_params.at("id");
             const auto state = svc.submit_answer(sid, bearer(req), body.at("question_id"), answer);
             Json view = svc.session_view(sid, bearer(req));
             view["accepted"] = true;
             view["state"] = std::string(session_state_name(state));
             send(res, 200, view);
           }));
  srv.Post("/rescale", guarded([](const httplib::Request& req, httplib::Response& res) {
             const auto raw = amounts_from(body_json(req), "values");
             BudgetAllocation ideal;
             try {
               ideal = rescale(raw);
             } catch (const Error& e) {
               throw Error(Errc::ValidationFailed, e.what());
             }
             send(res, 200, Json{{"ideal", allocation_to_json(ideal)}});
           }));

  if (!static_dir.empty() && !srv.set_mount_point("/", static_dir)) {
    throw Error(Errc::IoError, "cannot serve static files from " + static_dir);
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(Errc::IoError, "cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void HttpServer::listen() {
  if (!impl_->bound) throw Error(Errc::IoError, "listen() before bind()");
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace pbpoll
