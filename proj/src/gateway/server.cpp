#include "drip/gateway/server.hpp"

#include <charconv>
#include <limits>
#include <optional>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "drip/wire/protocol.hpp"

namespace drip::gateway {

namespace {

constexpr auto kSseWait = std::chrono::milliseconds(250);

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"ok", false}, {"error", message}});
}

std::optional<std::int64_t> query_int(const httplib::Request& req, const char* name, std::int64_t fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) return std::nullopt;
    return out;
}

std::string sse_message(std::optional<std::uint64_t> id, std::string_view type, std::string_view data) {
    std::string m;
    m.reserve(data.size() + 48);
    if (id) m += "id: " + std::to_string(*id) + "\n";
    m += "event: ";
    m += type;
    m += "\ndata: ";
    m += data;
    m += "\n\n";
    return m;
}

}  // namespace

Server::Server(Backend& backend, ServerOptions opts)
    : backend_(backend), opts_(std::move(opts)), http_(std::make_unique<httplib::Server>()) {
    // httplib's default adds SO_REUSEPORT, which would let a second gateway share the port
    http_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
}

Server::~Server() { stop(); }

void Server::routes() {
    auto& s = *http_;

    s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        if (req.method == "OPTIONS") {
            res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.status = 204;
            return httplib::Server::HandlerResponse::Handled;
        }
        const std::string expected = "Bearer " + opts_.token;
        const bool header_ok = req.get_header_value("Authorization") == expected;
        const bool query_ok = req.path == "/events" && req.get_param_value("token") == opts_.token;
        if (!header_ok && !query_ok) {
            res.set_header("WWW-Authenticate", "Bearer");
            send_error(res, 401, "missing or wrong bearer token");
            return httplib::Server::HandlerResponse::Handled;
        }
        return httplib::Server::HandlerResponse::Unhandled;
    });

    s.Get("/state", [this](const httplib::Request&, httplib::Response& res) { send_json(res, 200, backend_.state()); });

    s.Get("/telemetry", [this](const httplib::Request& req, httplib::Response& res) {
        const auto from = query_int(req, "from", std::numeric_limits<std::int64_t>::min());
        const auto to = query_int(req, "to", std::numeric_limits<std::int64_t>::max());
        if (!from || !to) return send_error(res, 400, "from and to must be integers");
        if (*from > *to) return send_error(res, 400, "from must not exceed to");
        std::string body = "[";
        bool first = true;
        for (const auto& snap : backend_.telemetry(*from, *to)) {
            std::string line = wire::encode_telemetry(snap);
            line.pop_back();
            body += (first ? "" : ",") + line;
            first = false;
        }
        body += "]";
        res.set_content(body, "application/json");
    });

    s.Post(R"(/pin/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
        const PinResult r = backend_.write_pin(req.matches[1].str(), req.body);
        if (r.status == 200) {
            send_json(res, 200, {{"ok", true}, {"pin", req.matches[1].str()}});
        } else {
            send_error(res, r.status, r.message);
        }
    });

    s.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
        auto& hub = backend_.events();
        std::uint64_t start = hub.next_seq();
        const std::string last = req.get_header_value("Last-Event-ID");
        if (!last.empty()) {
            std::uint64_t id = 0;
            auto [ptr, ec] = std::from_chars(last.data(), last.data() + last.size(), id);
            if (ec == std::errc{} && ptr == last.data() + last.size()) start = id + 1;
        } else if (req.has_param("since")) {
            const auto since = query_int(req, "since", 0);
            if (!since || *since < 1) return send_error(res, 400, "since must be a positive event id");
            start = static_cast<std::uint64_t>(*since);
        }
        auto cursor = std::make_shared<std::uint64_t>(start);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [this, &hub, cursor](std::size_t, httplib::DataSink& sink) {
            if (stopping_ || hub.closed()) {
                sink.done();
                return true;
            }
            auto batch = hub.read_from(*cursor, kSseWait);
            std::string out;
            if (batch.missed > 0) {
                out += sse_message(std::nullopt, "gap", nlohmann::ordered_json{{"missed", batch.missed}}.dump());
            }
            for (const auto& e : batch.events) out += sse_message(e.seq, e.type, e.data);
            if (out.empty()) out = ": keepalive\n\n";
            *cursor = batch.next;
            return sink.write(out.data(), out.size());
        });
    });
}

void Server::bind() {
    if (opts_.port == 0) {
        port_ = http_->bind_to_any_port(opts_.bind);
        if (port_ <= 0) throw Error("cannot bind " + opts_.bind);
    } else {
        if (!http_->bind_to_port(opts_.bind, opts_.port)) {
            throw Error("cannot bind " + opts_.bind + ":" + std::to_string(opts_.port) + " (port in use?)");
        }
        port_ = opts_.port;
    }
}

void Server::run() {
    entered_ = true;
    if (stopping_) return;
    spdlog::info("gateway listening on {}:{}", opts_.bind, port_);
    http_->listen_after_bind();
    finished_ = true;
}

void Server::stop() {
    if (stopping_.exchange(true)) return;
    if (!http_ || !entered_) return;
    // httplib ignores stop() until the listener is up, so wait for it
    while (!http_->is_running() && !finished_) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    http_->stop();
}

}  // namespace drip::gateway
