#include "ftvr/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace ftvr {

SessionChannel::SessionChannel(SessionConfig base) : base_(std::move(base)) {}

std::vector<json> SessionChannel::on_message(const std::string& text) {
    std::vector<json> out;
    if (closed_) return {error_message("schema", "session already closed")};
    ClientMessage message;
    try {
        message = parse_client_message(text);
    } catch (const ProtocolError& e) {
        return {error_message("schema", e.what())};
    }

    if (const auto* start = std::get_if<StartSession>(&message)) {
        if (session_) return {error_message("schema", "session already started")};
        SessionConfig config = base_;
        config.task = start->task;
        config.technique = start->technique;
        config.mapping_mode = start->mapping_mode;
        config.seed = start->seed;
        if (start->participant) config.participant = *start->participant;
        try {
            session_.emplace(config);
        } catch (const std::exception& e) {
            return {error_message("schema", e.what())};
        }
        trace_.emplace();
        trace_->header = {config.task,        config.technique,  config.seed, config.mapping_mode,
                          config.participant, config.session_id, config.phrases};
        if (config.task == TaskKind::Keyboard) trace_->header.phrases = session_->task().phrases();
        return session_->start();
    }
    if (!session_) return {error_message("schema", "send start_session first")};
    if (std::holds_alternative<EndSession>(message)) {
        closed_ = true;
        return session_->finish();
    }
    const InputEvent event = std::holds_alternative<TouchEvent>(message)
                                 ? InputEvent(std::get<TouchEvent>(message))
                                 : InputEvent(std::get<HeadPoseEvent>(message));
    try {
        out = session_->handle(event);
    } catch (const MonotonicityError& e) {
        return {error_message("monotonicity", e.what())};
    }
    trace_->events.push_back(event);
    return out;
}

std::vector<json> SessionChannel::on_close() {
    if (closed_ || !session_) {
        closed_ = true;
        return {};
    }
    closed_ = true;
    return session_->finish();
}

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct SessionServer::Impl {
    net::io_context ioc;
    tcp::acceptor acceptor{ioc};
    std::string log_dir;
    SessionConfig base;
    std::atomic<bool> stopping{false};
    std::mutex threads_mutex;
    std::vector<std::thread> threads;
    std::atomic<int> next_id{1};

    void serve(tcp::socket socket, int id) {
        websocket::stream<tcp::socket> ws(std::move(socket));
        SessionConfig config = base;
        config.session_id = "live-" + std::to_string(id);
        SessionChannel channel(config);
        try {
            ws.accept();
            ws.text(true);
            beast::flat_buffer buffer;
            while (!channel.closed()) {
                buffer.clear();
                ws.read(buffer);
                const auto replies = channel.on_message(beast::buffers_to_string(buffer.data()));
                for (const auto& reply : replies) ws.write(net::buffer(reply.dump()));
            }
            ws.close(websocket::close_code::normal);
        } catch (const std::exception&) {
            channel.on_close();
        }
        write_log(channel, config.session_id);
    }

    void write_log(const SessionChannel& channel, const std::string& id) const {
        if (log_dir.empty() || !channel.trace()) return;
        std::filesystem::create_directories(log_dir);
        std::ofstream out(std::filesystem::path(log_dir) / (id + ".jsonl"));
        write_trace(out, *channel.trace());
    }
};

SessionServer::SessionServer(std::uint16_t port, std::string log_dir, SessionConfig base, const std::string& address)
    : impl_(std::make_unique<Impl>()) {
    impl_->log_dir = std::move(log_dir);
    impl_->base = std::move(base);
    const tcp::endpoint endpoint(net::ip::make_address(address), port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen();
}

SessionServer::~SessionServer() {
    stop();
    std::lock_guard lock(impl_->threads_mutex);
    for (auto& t : impl_->threads) {
        if (t.joinable()) t.join();
    }
}

std::uint16_t SessionServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void SessionServer::run() {
    while (!impl_->stopping) {
        boost::system::error_code ec;
        tcp::socket socket(impl_->ioc);
        impl_->acceptor.accept(socket, ec);
        if (ec) {
            if (impl_->stopping) break;
            continue;
        }
        std::lock_guard lock(impl_->threads_mutex);
        impl_->threads.emplace_back(&Impl::serve, impl_.get(), std::move(socket), impl_->next_id++);
    }
    boost::system::error_code ec;
    impl_->acceptor.close(ec);
}

void SessionServer::stop() {
    if (impl_->stopping.exchange(true)) return;
    // Wake a blocking accept with a throwaway connection.
    boost::system::error_code ec;
    const auto endpoint = impl_->acceptor.local_endpoint(ec);
    if (ec) return;
    net::io_context ioc;
    tcp::socket wake(ioc);
    wake.connect(endpoint, ec);
}

}  // namespace ftvr
