#include "wornsim/bridge/live_session.hpp"

#include <algorithm>
#include <cmath>

namespace wornsim::bridge {

LiveSession::LiveSession(Scenario scenario, double publish_rate, bool start_paused)
    : sim_(std::move(scenario), true), publish_every_(1), paused_(start_paused) {
  if (!(publish_rate > 0.0) || !std::isfinite(publish_rate)) {
    throw ConfigError("publish_rate", "must be positive");
  }
  publish_every_ = std::max(1L, std::lround(1.0 / (publish_rate * sim_.scenario().dt)));
}

std::vector<Reply> LiveSession::receive(ClientId client, std::string_view text) {
  try {
    return receive(client, decode_client(text));
  } catch (const DecodeError& e) {
    return {{client, ErrorReply{e.field(), e.what()}}};
  }
}

std::vector<Reply> LiveSession::receive(ClientId client, const ClientMessage& message) {
  const std::string type = message_type(message);
  if (std::holds_alternative<PauseCommand>(message)) {
    paused_ = true;
  } else if (std::holds_alternative<ResumeCommand>(message)) {
    paused_ = false;
  } else if (const auto* cfg = std::get_if<SetConfigCommand>(&message)) {
    try {
      sim_.set_servo_config(cfg->applied_to(sim_.scenario().servo));
    } catch (const ConfigError& e) {
      return {{client, ErrorReply{e.path(), e.what()}}};
    }
  } else {
    std::visit(
        [this](const auto& m) {
          if constexpr (std::is_constructible_v<LimbCommand, decltype(m)>) sim_.enqueue(m);
        },
        message);
    pending_.emplace_back(client, type);
    return {};
  }
  return {{client, Ack{sim_.tick(), type}}};
}

LiveSession::Step LiveSession::advance() {
  Step out;
  if (paused_) return out;
  const LogRow row = sim_.step();
  const auto& rejected = sim_.rejected();
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    const auto it = std::find_if(rejected.begin(), rejected.end(),
                                 [i](const Simulation::Rejection& r) { return r.index == i; });
    if (it == rejected.end()) {
      out.replies.push_back({pending_[i].first, Ack{row.tick, pending_[i].second}});
    } else {
      out.replies.push_back({pending_[i].first, ErrorReply{pending_[i].second, it->message}});
    }
  }
  pending_.clear();
  if (row.tick % publish_every_ == 0) out.snapshot = make_snapshot(row, paused_);
  out.row = row;
  return out;
}

void Outbox::push(ServerMessage message) {
  if (std::holds_alternative<Snapshot>(message)) {
    if (snapshots_ >= limit_) {
      const auto oldest = std::find_if(queue_.begin(), queue_.end(),
                                       [](const ServerMessage& m) { return std::holds_alternative<Snapshot>(m); });
      queue_.erase(oldest);
      --snapshots_;
      ++dropped_;
    }
    ++snapshots_;
  }
  queue_.push_back(std::move(message));
}

std::optional<ServerMessage> Outbox::pop() {
  if (queue_.empty()) return std::nullopt;
  ServerMessage message = std::move(queue_.front());
  queue_.pop_front();
  if (auto* snapshot = std::get_if<Snapshot>(&message)) {
    --snapshots_;
    snapshot->dropped = dropped_;
  }
  return message;
}

}  // namespace wornsim::bridge
