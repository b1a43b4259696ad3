// SPDX-License-Identifier: Apache-2.0
#include <mutex>

#include "httplib.h"
#include "qviz/service/service.hpp"

namespace qviz::service {

namespace {

std::mutex gMutex;
httplib::Server* gServer = nullptr;

}  // namespace

bool serve(const ServeOptions& options, const std::function<void(int)>& onReady) {
  httplib::Server server;
  // SO_REUSEADDR only: the library default (SO_REUSEPORT) would let two
  // servers share a port silently.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  const render::StyleConfig style = options.style;
  server.Post("/api/visualize", [style](const httplib::Request& req, httplib::Response& res) {
    const HttpReply reply = handle_visualize(req.body, style);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    const HttpReply reply = handle_health();
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  if (!options.staticDir.empty() && !server.set_mount_point("/", options.staticDir)) return false;

  int port = options.port;
  if (port == 0) {
    port = server.bind_to_any_port(options.host);
    if (port < 0) return false;
  } else if (!server.bind_to_port(options.host, port)) {
    return false;
  }
  {
    std::lock_guard<std::mutex> lock(gMutex);
    gServer = &server;
  }
  if (onReady) onReady(port);
  const bool ok = server.listen_after_bind();
  std::lock_guard<std::mutex> lock(gMutex);
  gServer = nullptr;
  return ok;
}

void stop_server() {
  std::lock_guard<std::mutex> lock(gMutex);
  if (gServer == nullptr) return;
  // A stop issued before listening starts would be lost.
  gServer->wait_until_ready();
  gServer->stop();
}

}  // namespace qviz::service
