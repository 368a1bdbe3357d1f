#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "wornsim/scenario.hpp"

namespace wornsim::bridge {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  double publish_rate = 30.0;  // snapshots per simulated second
  bool start_paused = false;
  std::size_t client_queue_limit = 64;  // queued snapshots per client
};

/// WebSocket endpoint /sim plus GET /healthz. One loop thread owns the
/// simulation and paces it at 1/dt of wall time; one I/O thread owns every
/// connection. They exchange messages through a locked inbound queue and
/// handlers posted to the I/O thread.
class Server {
 public:
  /// Throws ConfigError for an invalid scenario or publish rate.
  Server(Scenario scenario, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Bind, listen and start both threads; returns the bound port. Throws
  /// Error when the address cannot be bound.
  unsigned short start();
  void stop();

  long tick() const;
  /// Message of the error that stopped the loop, empty while healthy.
  std::string failure() const;

  struct Impl;  // defined in server.cpp

 private:
  std::unique_ptr<Impl> impl_;
};

/// Run until SIGINT/SIGTERM. Returns 0, or 3 when the server cannot start or
/// the loop fails.
int serve(const Scenario& scenario, const ServerOptions& options, std::ostream& out, std::ostream& err);

}  // namespace wornsim::bridge
