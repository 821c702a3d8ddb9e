#pragma once

// Binds an Api to an HTTP listener. Requests are served concurrently on the
// listener's thread pool.

#include <memory>
#include <string>

#include "urbanflow/detail/http.hpp"
#include "urbanflow/service/api.hpp"

namespace urbanflow::service {

class Server {
 public:
  explicit Server(std::shared_ptr<const ServiceState> state) : api_(std::move(state)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      Request r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      r.body = req.body;
      const auto out = api_.handle(r);
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
    http_.Get(R"(/.*)", handler);
    http_.Post(R"(/.*)", handler);
    http_.Put(R"(/.*)", handler);
    http_.Delete(R"(/.*)", handler);
    http_.set_payload_max_length(16 * 1024 * 1024);
  }

  /// Binds without serving. Port 0 picks a free port. Returns the bound port
  /// or -1.
  int bind(const std::string& host, int port) {
    if (port == 0) {
      port_ = http_.bind_to_any_port(host);
    } else {
      port_ = http_.bind_to_port(host, port) ? port : -1;
    }
    return port_;
  }

  /// Serves until stop(); blocks.
  bool serve() { return http_.listen_after_bind(); }
  void stop() { http_.stop(); }
  void wait_until_ready() const { http_.wait_until_ready(); }
  int port() const { return port_; }
  const Api& api() const { return api_; }

 private:
  Api api_;
  httplib::Server http_;
  int port_ = -1;
};

}  // namespace urbanflow::service
