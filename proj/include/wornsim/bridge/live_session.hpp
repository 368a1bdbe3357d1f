#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "wornsim/bridge/messages.hpp"
#include "wornsim/simulation.hpp"

namespace wornsim::bridge {

using ClientId = std::uint64_t;

struct Reply {
  ClientId client = 0;
  ServerMessage message;
};

/// Simulation state owned by the live loop. Everything here is driven from
/// one thread and is deterministic: the same message stream at the same tick
/// boundaries gives the same states as a batch run.
class LiveSession {
 public:
  /// Throws ConfigError for an invalid scenario or publish_rate <= 0.
  LiveSession(Scenario scenario, double publish_rate, bool start_paused = false);

  /// Handle one client message at the current tick boundary. Pause, resume
  /// and set_config take effect at once and are acknowledged here; limb
  /// commands are queued and acknowledged (or rejected) by the step that
  /// applies them. Malformed messages get an error reply and change nothing.
  std::vector<Reply> receive(ClientId client, std::string_view text);
  std::vector<Reply> receive(ClientId client, const ClientMessage& message);

  struct Step {
    std::optional<LogRow> row;            // empty while paused
    std::optional<Snapshot> snapshot;     // set on publish ticks
    std::vector<Reply> replies;
  };
  Step advance();

  long tick() const noexcept { return sim_.tick(); }
  bool paused() const noexcept { return paused_; }
  long publish_every() const noexcept { return publish_every_; }
  const Simulation& simulation() const noexcept { return sim_; }

 private:
  Simulation sim_;
  long publish_every_;
  bool paused_;
  std::vector<std::pair<ClientId, std::string>> pending_;  // sender and type of queued limb commands
};

/// Outgoing queue of one client. Snapshots beyond `limit` push out the
/// oldest queued snapshot and count as dropped; acks and errors are kept.
class Outbox {
 public:
  explicit Outbox(std::size_t limit) : limit_(limit == 0 ? 1 : limit) {}

  void push(ServerMessage message);
  std::optional<ServerMessage> pop();  // snapshots carry the drop count
  bool empty() const noexcept { return queue_.empty(); }
  std::size_t size() const noexcept { return queue_.size(); }
  std::uint64_t dropped() const noexcept { return dropped_; }

 private:
  std::size_t limit_;
  std::size_t snapshots_ = 0;
  std::uint64_t dropped_ = 0;
  std::deque<ServerMessage> queue_;
};

}  // namespace wornsim::bridge
