#pragma once

// HTTP front end for PollService. Bodies are JSON; participants authenticate
// with the bearer token returned at session start, operators with the admin
// token.

#include <memory>
#include <string>

#include "pbpoll/error.hpp"
#include "pbpoll/service.hpp"

namespace pbpoll {

/// HTTP status for a service error code.
int http_status(Errc code);

/// {"state", "question": {"question_id", "kind", "options", "position",
/// "total"}}; the question is omitted once the session is completed.
Json next_question_to_json(const NextQuestion& next);

class HttpServer {
 public:
  /// `static_dir`, when non-empty, is served at "/".
  HttpServer(PollService& service, std::string static_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without serving. Port 0 picks a free port; returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires bind().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pbpoll
