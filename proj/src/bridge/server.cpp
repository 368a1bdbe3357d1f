#include "wornsim/bridge/server.hpp"

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <csignal>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "wornsim/bridge/live_session.hpp"
#include "wornsim/json_io.hpp"

namespace wornsim::bridge {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

class WsSession;

struct Server::Impl {
  Impl(Scenario scenario, ServerOptions opts)
      : options(std::move(opts)),
        dt(scenario.dt),
        session(std::move(scenario), options.publish_rate, options.start_paused),
        acceptor(ioc) {}

  ServerOptions options;
  double dt;
  LiveSession session;  // loop thread only once started

  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread io_thread;
  std::thread loop_thread;
  std::atomic<bool> stopping{false};
  std::atomic<long> tick{0};

  mutable std::mutex failure_mutex;
  std::string failure;

  // Inbound messages, filled by the I/O thread, drained by the loop.
  std::mutex inbox_mutex;
  std::vector<std::pair<ClientId, std::string>> inbox;

  // I/O thread only.
  std::map<ClientId, std::weak_ptr<WsSession>> clients;
  ClientId next_client = 1;

  void accept();
  void loop();
  void deliver(const std::vector<Reply>& replies);
  void broadcast(const Snapshot& snapshot);
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Server::Impl& server, ClientId id)
      : ws_(std::move(socket)), server_(server), id_(id), outbox_(server.options.client_queue_limit) {}

  void run(http::request<http::string_body> request) {
    ws_.async_accept(request, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->server_.clients[self->id_] = self;
      self->read();
    });
  }

  void deliver(const ServerMessage& message) {
    outbox_.push(message);
    if (!writing_) write();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.clients.erase(self->id_);
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      {
        std::lock_guard lock(self->server_.inbox_mutex);
        self->server_.inbox.emplace_back(self->id_, std::move(text));
      }
      self->read();
    });
  }

  void write() {
    const auto message = outbox_.pop();
    if (!message) {
      writing_ = false;
      return;
    }
    writing_ = true;
    pending_ = encode(*message);
    ws_.text(true);
    ws_.async_write(net::buffer(pending_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->writing_ = false;
        self->server_.clients.erase(self->id_);
        return;
      }
      self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& server_;
  ClientId id_;
  Outbox outbox_;
  beast::flat_buffer buffer_;
  std::string pending_;
  bool writing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Server::Impl& server) : stream_(std::move(socket)), server_(server) {}

  void run() {
    http::async_read(stream_, buffer_, request_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->handle();
    });
  }

 private:
  void handle() {
    if (websocket::is_upgrade(request_) && request_.target() == "/sim") {
      std::make_shared<WsSession>(stream_.release_socket(), server_, server_.next_client++)->run(std::move(request_));
      return;
    }
    auto response = std::make_shared<http::response<http::string_body>>();
    response->version(request_.version());
    response->keep_alive(false);
    if (request_.method() == http::verb::get && request_.target() == "/healthz") {
      response->result(http::status::ok);
      response->set(http::field::content_type, "application/json");
      response->body() = Json{{"status", "ok"}, {"tick", server_.tick.load()}}.dump();
    } else {
      response->result(http::status::not_found);
      response->set(http::field::content_type, "text/plain");
      response->body() = "not found\n";
    }
    response->prepare_payload();
    http::async_write(stream_, *response, [self = shared_from_this(), response](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
};

void Server::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    accept();
  });
}

void Server::Impl::deliver(const std::vector<Reply>& replies) {
  if (replies.empty()) return;
  net::post(ioc, [this, replies] {
    for (const Reply& reply : replies) {
      const auto it = clients.find(reply.client);
      if (it == clients.end()) continue;
      if (const auto client = it->second.lock()) client->deliver(reply.message);
    }
  });
}

void Server::Impl::broadcast(const Snapshot& snapshot) {
  net::post(ioc, [this, snapshot] {
    for (const auto& [id, weak] : clients) {
      if (const auto client = weak.lock()) client->deliver(snapshot);
    }
  });
}

void Server::Impl::loop() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(dt));
  auto next = clock::now();
  try {
    while (!stopping.load()) {
      std::vector<std::pair<ClientId, std::string>> batch;
      {
        std::lock_guard lock(inbox_mutex);
        batch.swap(inbox);
      }
      for (const auto& [client, text] : batch) deliver(session.receive(client, text));
      const LiveSession::Step step = session.advance();
      deliver(step.replies);
      if (step.snapshot) broadcast(*step.snapshot);
      tick.store(session.tick());

      // Pace at 1/dt; after a long stall, resynchronize instead of bursting.
      next += period;
      const auto now = clock::now();
      if (now - next > std::chrono::seconds(1)) next = now;
      std::this_thread::sleep_until(next);
    }
  } catch (const std::exception& e) {
    std::lock_guard lock(failure_mutex);
    failure = e.what();
    stopping.store(true);
  }
}

Server::Server(Scenario scenario, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  Impl& s = *impl_;
  try {
    const tcp::endpoint endpoint(net::ip::make_address(s.options.address), s.options.port);
    s.acceptor.open(endpoint.protocol());
    s.acceptor.set_option(net::socket_base::reuse_address(true));
    s.acceptor.bind(endpoint);
    s.acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw Error("cannot listen on " + s.options.address + ":" + std::to_string(s.options.port) + ": " +
                e.code().message());
  }
  const unsigned short port = s.acceptor.local_endpoint().port();
  s.accept();
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  s.loop_thread = std::thread([&s] { s.loop(); });
  return port;
}

void Server::stop() {
  Impl& s = *impl_;
  s.stopping.store(true);
  if (s.loop_thread.joinable()) s.loop_thread.join();
  s.ioc.stop();
  if (s.io_thread.joinable()) s.io_thread.join();
}

long Server::tick() const { return impl_->tick.load(); }

std::string Server::failure() const {
  std::lock_guard lock(impl_->failure_mutex);
  return impl_->failure;
}

int serve(const Scenario& scenario, const ServerOptions& options, std::ostream& out, std::ostream& err) {
  Server server(scenario, options);
  unsigned short port = 0;
  try {
    port = server.start();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  out << "serving ws://" << options.address << ':' << port << "/sim" << std::endl;

  net::io_context signals_ioc;
  net::signal_set signals(signals_ioc, SIGINT, SIGTERM);
  bool interrupted = false;
  signals.async_wait([&interrupted](beast::error_code, int) { interrupted = true; });
  while (!interrupted && server.failure().empty()) {
    signals_ioc.run_for(std::chrono::milliseconds(100));
  }
  server.stop();
  if (const std::string failure = server.failure(); !failure.empty()) {
    err << "error: " << failure << '\n';
    return 3;
  }
  return 0;
}

}  // namespace wornsim::bridge
