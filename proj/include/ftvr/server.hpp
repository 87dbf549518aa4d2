#pragma once

#include "ftvr/protocol.hpp"
#include "ftvr/session.hpp"
#include "ftvr/trace.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ftvr {

/// Protocol state of one client connection, independent of the transport.
/// Every inbound text message yields the outbound messages in order.
class SessionChannel {
public:
    /// Base configuration for new sessions; start_session fills in task,
    /// technique, mapping mode, seed and participant.
    explicit SessionChannel(SessionConfig base = {});

    std::vector<json> on_message(const std::string& text);
    /// Connection closed: finishes a running session.
    std::vector<json> on_close();

    bool closed() const { return closed_; }
    const Session* session() const { return session_ ? &*session_ : nullptr; }
    /// Everything the session accepted, as a replayable trace.
    const std::optional<Trace>& trace() const { return trace_; }

private:
    SessionConfig base_;
    std::optional<Session> session_;
    std::optional<Trace> trace_;
    bool closed_ = false;
};

/// WebSocket front end: one SessionChannel per connection, each served on
/// its own thread.
class SessionServer {
public:
    /// Binds immediately; port 0 picks a free port.
    SessionServer(std::uint16_t port, std::string log_dir = {}, SessionConfig base = {},
                  const std::string& address = "127.0.0.1");
    ~SessionServer();

    std::uint16_t port() const;
    /// Accepts connections until stop() is called.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ftvr
