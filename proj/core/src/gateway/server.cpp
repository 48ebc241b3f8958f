#include "autonoma/gateway/server.hpp"

#include "autonoma/common/error.hpp"
#include "autonoma/model/serialization.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <charconv>
#include <deque>
#include <iostream>
#include <thread>

namespace autonoma::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;
using Header = http::request_header<>;

namespace {

constexpr std::size_t kHeaderLimit = 16 * 1024;
constexpr std::size_t kStreamBacklogLimit = 10000;
constexpr auto kIdleTimeout = std::chrono::seconds(60);

const std::string kFilteredBody = R"({"error":"Filtered","message":"address not allowed"})";
const std::string kFilteredResponse = "HTTP/1.1 403 Forbidden\r\nContent-Type: application/json\r\nContent-Length: " +
                                      std::to_string(kFilteredBody.size()) + "\r\nConnection: close\r\n\r\n" +
                                      kFilteredBody;

http::status status_of(Errc c) {
    switch (c) {
        case Errc::filtered: return http::status::forbidden;
        case Errc::unauthenticated: return http::status::unauthorized;
        case Errc::busy:
        case Errc::no_pending_approval:
        case Errc::digest_mismatch: return http::status::conflict;
        case Errc::too_large: return http::status::payload_too_large;
        case Errc::not_found: return http::status::not_found;
        default: return http::status::bad_request;
    }
}

Response json_response(http::status status, const Json& body, unsigned version, bool keep_alive) {
    Response res{status, version};
    res.set(http::field::content_type, "application/json");
    res.set(http::field::cache_control, "no-store");
    res.keep_alive(keep_alive);
    res.body() = body.dump();
    res.prepare_payload();
    return res;
}

Response error_response(Errc code, const std::string& message, unsigned version, bool keep_alive) {
    return json_response(status_of(code), Json{{"error", to_string(code)}, {"message", message}}, version, keep_alive);
}

struct Target {
    std::string path;
    std::map<std::string, std::string> query;
};

Target split_target(std::string_view t) {
    Target out;
    const auto q = t.find('?');
    out.path = std::string(t.substr(0, q));
    if (q == std::string_view::npos) return out;
    auto rest = t.substr(q + 1);
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const auto kv = rest.substr(0, amp);
        const auto eq = kv.find('=');
        out.query[std::string(kv.substr(0, eq))] = eq == std::string_view::npos ? "" : std::string(kv.substr(eq + 1));
        if (amp == std::string_view::npos) break;
        rest.remove_prefix(amp + 1);
    }
    return out;
}

Target split_target(beast::string_view t) { return split_target(std::string_view(t.data(), t.size())); }

std::optional<std::string> path_param(const std::string& path, std::string_view prefix) {
    if (!path.starts_with(prefix)) return std::nullopt;
    auto id = path.substr(prefix.size());
    if (id.empty() || id.find('/') != std::string::npos) return std::nullopt;
    return id;
}

Json record_json(const store::ConversationRecord& r) {
    return Json{{"id", r.id},
                {"title", r.title},
                {"created_at", r.created_at},
                {"status", std::string(model::to_string(r.state.status))},
                {"last_seq", r.state.last_seq}};
}

}  // namespace

struct Gateway::Impl : std::enable_shared_from_this<Gateway::Impl> {
    ServiceConfig config;
    engine::Engine& engine;
    std::shared_ptr<net::PairingRegistry> pairing;
    std::size_t threads_wanted;

    asio::io_context ioc;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
    std::optional<tcp::acceptor> acceptor;
    std::vector<std::thread> threads;
    std::atomic<std::uint16_t> bound_port{0};
    std::atomic<bool> running{false};

    std::atomic<std::uint64_t> filtered{0}, unauthenticated{0}, requests{0}, streams{0};

    Impl(ServiceConfig c, engine::Engine& e, std::shared_ptr<net::PairingRegistry> p, std::size_t t)
        : config(std::move(c)), engine(e), pairing(std::move(p)), threads_wanted(std::max<std::size_t>(1, t)) {}

    bool admit(const std::string& remote) {
        if (net::ip_filter(remote, config.allowlist) == net::FilterDecision::Allow) return true;
        ++filtered;
        return false;
    }

    // Bearer header first, then the `token` query parameter.
    bool authorized(const Header& h, const Target& t, const std::string& remote) {
        std::string token;
        const auto auth = h[http::field::authorization];
        if (auth.starts_with("Bearer ")) {
            token = std::string(auth.substr(7));
        } else if (auto it = t.query.find("token"); it != t.query.end()) {
            token = it->second;
        }
        std::string client(h["X-Autonoma-Client"]);
        if (client.empty()) client = remote;
        if (!token.empty() && pairing && pairing->authenticate(token, client) == net::AuthResult::ok) return true;
        ++unauthenticated;
        return false;
    }

    Response route(const Request& req) {
        ++requests;
        const auto target = split_target(req.target());
        const auto v = req.version();
        const bool ka = req.keep_alive();
        try {
            if (target.path == "/api/prompt" && req.method() == http::verb::post) return submit(req, v, ka);
            if (target.path == "/api/conversations" && req.method() == http::verb::get) {
                Json out = Json::array();
                for (const auto& r : engine.list()) out.push_back(record_json(r));
                return json_response(http::status::ok, out, v, ka);
            }
            if (auto id = path_param(target.path, "/api/conversations/"); id && req.method() == http::verb::get) {
                auto s = engine.session(*id);
                if (!s) return error_response(Errc::not_found, "unknown conversation", v, ka);
                const auto c = s->snapshot();
                Json out = Json::object();
                out["record"] = record_json(c.record);
                model::to_json(out["state"], c.record.state);
                out["messages"] = Json::array();
                for (const auto& m : c.messages) model::to_json(out["messages"].emplace_back(), m);
                out["events"] = Json::array();
                for (const auto& e : c.events) model::to_json(out["events"].emplace_back(), e);
                return json_response(http::status::ok, out, v, ka);
            }
            if (auto id = path_param(target.path, "/api/approvals/"); id && req.method() == http::verb::post) {
                const auto body = Json::parse(req.body());
                const auto digest = body.at("action_digest").get<std::string>();
                const auto decision = body.at("decision").get<std::string>();
                if (decision != "approve" && decision != "deny") {
                    return error_response(Errc::invalid_argument, "decision must be approve or deny", v, ka);
                }
                return approval_response(engine.resolve_approval(*id, digest, decision == "approve"), v, ka);
            }
            if (target.path.starts_with("/api/") || target.path.starts_with("/ws/")) {
                return error_response(Errc::not_found, "no such endpoint", v, ka);
            }
            return error_response(Errc::not_found, "not found", v, ka);
        } catch (const Error& e) {
            return error_response(e.code(), e.what(), v, ka);
        } catch (const Json::exception& e) {
            return error_response(Errc::invalid_argument, std::string("malformed request body: ") + e.what(), v, ka);
        } catch (const std::exception& e) {
            return json_response(http::status::internal_server_error,
                                 Json{{"error", "InternalError"}, {"message", e.what()}}, v, ka);
        }
    }

    Response submit(const Request& req, unsigned v, bool ka) {
        const auto body = Json::parse(req.body());
        if (!body.is_object()) throw Error(Errc::invalid_argument, "body must be an object");
        engine::SubmitRequest sr;
        if (body.contains("conversation_id") && !body["conversation_id"].is_null()) {
            sr.conversation_id = body["conversation_id"].get<std::string>();
        }
        sr.text = body.at("text").get<std::string>();
        if (sr.text.empty()) throw Error(Errc::invalid_argument, "text must not be empty");
        if (body.contains("attachments")) sr.attachments = body["attachments"].get<std::vector<std::string>>();
        if (body.contains("policy")) sr.policy = supervisor::policy_from_json(body["policy"], config.policy);
        const auto r = engine.submit(sr);
        return json_response(http::status::accepted,
                             Json{{"conversation_id", r.conversation_id}, {"accepted", r.accepted}, {"seq", r.seq}}, v,
                             ka);
    }

    static Response approval_response(supervisor::ResolveStatus st, unsigned v, bool ka) {
        switch (st) {
            case supervisor::ResolveStatus::resolved:
                return json_response(http::status::ok, Json{{"status", "resolved"}}, v, ka);
            case supervisor::ResolveStatus::no_pending_approval:
                return error_response(Errc::no_pending_approval, "no approval is pending", v, ka);
            case supervisor::ResolveStatus::digest_mismatch:
                return error_response(Errc::digest_mismatch, "digest does not match a pending approval", v, ka);
        }
        return error_response(Errc::invalid_argument, "unknown status", v, ka);
    }

    void accept();
};

namespace {

// One event stream. All state is touched on the strand only.
class StreamSession : public std::enable_shared_from_this<StreamSession> {
public:
    StreamSession(std::shared_ptr<Gateway::Impl> gw, tcp::socket&& socket)
        : gw_(std::move(gw)), ws_(std::move(socket)) {}

    void run(Request req, std::shared_ptr<engine::Session> session, std::uint64_t since, bool ok,
             websocket::close_code code_on_fail, std::string reason) {
        session_ = std::move(session);
        last_ = since;
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, beast::bind_front_handler(&StreamSession::on_accept, shared_from_this(), ok,
                                                        code_on_fail, std::move(reason)));
    }

private:
    void on_accept(bool ok, websocket::close_code code, std::string reason, beast::error_code ec) {
        if (ec) return;
        if (!ok) {
            ws_.async_close(websocket::close_reason(code, reason), [self = shared_from_this()](beast::error_code) {});
            return;
        }
        ++gw_->streams;
        std::weak_ptr<StreamSession> weak = shared_from_this();
        auto strand = ws_.get_executor();
        listener_ = session_->log().subscribe([weak, strand](const model::WorkflowEvent& e, const model::WorkflowState&) {
            if (auto self = weak.lock()) {
                asio::post(strand, [self, e] { self->on_live(e); });
            }
        });
        subscribed_ = true;
        backfill();
        do_read();
    }

    void backfill() {
        for (const auto& e : session_->log().since(last_)) queue_event(e);
    }

    void on_live(const model::WorkflowEvent& e) {
        if (closed_ || e.seq <= last_) return;
        if (e.seq != last_ + 1) {
            backfill();
            return;
        }
        queue_event(e);
    }

    void queue_event(const model::WorkflowEvent& e) {
        last_ = e.seq;
        Json ev = e;
        send(Json{{"type", "event"}, {"event", ev}}.dump());
    }

    void send(std::string text) {
        if (closed_) return;
        if (out_.size() >= kStreamBacklogLimit) {
            // The client resumes with since=<last seq it rendered>.
            closed_ = true;
            ws_.async_close(websocket::close_reason(websocket::close_code::try_again_later, "slow consumer"),
                            [self = shared_from_this()](beast::error_code) {});
            return;
        }
        out_.push_back(std::move(text));
        if (out_.size() == 1) do_write();
    }

    void do_write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->shutdown();
            self->out_.pop_front();
            if (!self->out_.empty()) self->do_write();
        });
    }

    void do_read() {
        ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->shutdown();
            self->on_message(beast::buffers_to_string(self->in_.data()));
            self->in_.consume(self->in_.size());
            self->do_read();
        });
    }

    void on_message(const std::string& text) {
        Json reply;
        try {
            const auto msg = Json::parse(text);
            const auto type = msg.at("type").get<std::string>();
            if (type == "ping") {
                reply = Json{{"type", "pong"}};
            } else if (type == "cancel") {
                const bool stopped = gw_->engine.cancel(session_->id(), msg.value("cause", std::string("cancelled by user")));
                reply = Json{{"type", "cancel_result"}, {"cancelled", stopped}};
            } else if (type == "approval") {
                const auto decision = msg.at("decision").get<std::string>();
                if (decision != "approve" && decision != "deny") throw Error(Errc::invalid_argument, "bad decision");
                const auto st = gw_->engine.resolve_approval(session_->id(), msg.at("action_digest").get<std::string>(),
                                                             decision == "approve");
                reply = Json{{"type", "approval_result"},
                             {"action_digest", msg["action_digest"]},
                             {"status", st == supervisor::ResolveStatus::resolved              ? "resolved"
                                        : st == supervisor::ResolveStatus::no_pending_approval ? "NoPendingApproval"
                                                                                               : "DigestMismatch"}};
            } else {
                throw Error(Errc::invalid_argument, "unsupported message type " + type);
            }
        } catch (const Error& e) {
            reply = Json{{"type", "error"}, {"error", to_string(e.code())}, {"message", e.what()}};
        } catch (const std::exception& e) {
            reply = Json{{"type", "error"}, {"error", "InvalidArgument"}, {"message", e.what()}};
        }
        send(reply.dump());
    }

    void shutdown() {
        closed_ = true;
        if (subscribed_) {
            session_->log().unsubscribe(listener_);
            subscribed_ = false;
        }
    }

    std::shared_ptr<Gateway::Impl> gw_;
    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer in_;
    std::deque<std::string> out_;
    std::shared_ptr<engine::Session> session_;
    std::uint64_t last_ = 0;
    std::size_t listener_ = 0;
    bool subscribed_ = false;
    bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(std::shared_ptr<Gateway::Impl> gw, tcp::socket&& socket, std::string remote)
        : gw_(std::move(gw)), stream_(std::move(socket)), remote_(std::move(remote)) {}

    void run() {
        asio::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read_header, shared_from_this()));
    }

private:
    void read_header() {
        parser_.emplace();
        parser_->header_limit(kHeaderLimit);
        parser_->body_limit(gw_->config.max_body_bytes);
        stream_.expires_after(kIdleTimeout);
        http::async_read_header(stream_, buffer_, *parser_,
                                beast::bind_front_handler(&HttpSession::on_header, shared_from_this()));
    }

    void on_header(beast::error_code ec, std::size_t) {
        if (ec == http::error::end_of_stream) return close();
        if (ec) return fail_parse(ec);
        const auto& h = parser_->get();
        const auto target = split_target(h.target());
        if (!gw_->authorized(h.base(), target, remote_)) {
            return write(error_response(Errc::unauthenticated, "missing or invalid pairing token", h.version(), false));
        }
        http::async_read(stream_, buffer_, *parser_,
                         beast::bind_front_handler(&HttpSession::on_body, shared_from_this()));
    }

    void on_body(beast::error_code ec, std::size_t) {
        if (ec) return fail_parse(ec);
        auto req = parser_->release();
        if (websocket::is_upgrade(req)) return upgrade(std::move(req));
        write(gw_->route(req));
    }

    void fail_parse(beast::error_code ec) {
        if (ec == http::error::body_limit) {
            return write(error_response(Errc::too_large, "request body exceeds the size cap", 11, false));
        }
        if (ec == http::error::header_limit) {
            return write(error_response(Errc::too_large, "request header too large", 11, false));
        }
        if (ec == beast::error::timeout || ec == asio::error::eof || ec == asio::error::connection_reset) {
            return close();
        }
        write(error_response(Errc::invalid_argument, "malformed request", 11, false));
    }

    void upgrade(Request req) {
        const auto target = split_target(req.target());
        auto id = path_param(target.path, "/ws/conversations/");
        std::shared_ptr<engine::Session> session;
        std::uint64_t since = 0;
        bool ok = false;
        auto code = websocket::close_code::policy_error;
        std::string reason;
        if (!id) {
            reason = "NotFound";
        } else if (session = gw_->engine.session(*id); !session) {
            reason = "NotFound";
        } else {
            ok = true;
            if (auto it = target.query.find("since"); it != target.query.end()) {
                const auto& s = it->second;
                const auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), since);
                if (e != std::errc{} || p != s.data() + s.size()) {
                    ok = false;
                    reason = "InvalidArgument";
                }
            }
        }
        stream_.expires_never();
        std::make_shared<StreamSession>(gw_, stream_.release_socket())
            ->run(std::move(req), std::move(session), since, ok, code, reason);
    }

    void write(Response res) {
        const bool keep = res.keep_alive();
        auto sp = std::make_shared<Response>(std::move(res));
        http::async_write(stream_, *sp, [self = shared_from_this(), sp, keep](beast::error_code ec, std::size_t) {
            if (ec || !keep) return self->close();
            self->read_header();
        });
    }

    void close() {
        beast::error_code ec;
        stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    }

    std::shared_ptr<Gateway::Impl> gw_;
    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    std::optional<http::request_parser<http::string_body>> parser_;
    std::string remote_;
};

}  // namespace

void Gateway::Impl::accept() {
    acceptor->async_accept(asio::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
        if (!self->running) return;
        if (!ec) {
            beast::error_code rec;
            const auto ep = s.remote_endpoint(rec);
            const auto remote = rec ? std::string() : ep.address().to_string();
            if (!self->admit(remote)) {
                // Nothing is read from a filtered peer.
                auto sock = std::make_shared<tcp::socket>(std::move(s));
                asio::async_write(*sock, asio::buffer(kFilteredResponse), [sock](beast::error_code, std::size_t) {
                    beast::error_code ignored;
                    sock->shutdown(tcp::socket::shutdown_both, ignored);
                    sock->close(ignored);
                });
            } else {
                std::make_shared<HttpSession>(self, std::move(s), remote)->run();
            }
        }
        self->accept();
    });
}

Gateway::Gateway(ServiceConfig config, engine::Engine& engine, std::shared_ptr<net::PairingRegistry> pairing,
                 std::size_t io_threads)
    : impl_(std::make_shared<Impl>(std::move(config), engine, std::move(pairing), io_threads)) {}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
    validate_service_config(impl_->config);
    if (impl_->running) return;
    auto& im = *impl_;
    const auto addr = asio::ip::make_address(im.config.bind_address);
    im.acceptor.emplace(im.ioc);
    beast::error_code ec;
    const tcp::endpoint ep(addr, im.config.port);
    im.acceptor->open(ep.protocol(), ec);
    if (!ec) im.acceptor->set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) im.acceptor->bind(ep, ec);
    if (!ec) im.acceptor->listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
        im.acceptor.reset();
        throw Error(Errc::io_error, "cannot listen on " + im.config.bind_address + ":" +
                                        std::to_string(im.config.port) + ": " + ec.message());
    }
    im.bound_port = im.acceptor->local_endpoint().port();
    im.running = true;
    im.work.emplace(im.ioc.get_executor());
    im.accept();
    for (std::size_t i = 0; i < im.threads_wanted; ++i) {
        im.threads.emplace_back([this] { impl_->ioc.run(); });
    }
}

void Gateway::stop() {
    auto& im = *impl_;
    if (!im.running.exchange(false)) return;
    asio::post(im.ioc, [&im] {
        beast::error_code ec;
        if (im.acceptor) im.acceptor->close(ec);
    });
    im.work.reset();
    im.ioc.stop();
    for (auto& t : im.threads) {
        if (t.joinable()) t.join();
    }
    im.threads.clear();
}

std::uint16_t Gateway::port() const { return impl_->bound_port; }

GatewayStats Gateway::stats() const {
    return GatewayStats{impl_->filtered, impl_->unauthenticated, impl_->requests, impl_->streams};
}

std::string Gateway::handle_raw(const std::string& remote_address, std::string_view request_bytes) {
    auto& im = *impl_;
    if (!im.admit(remote_address)) return kFilteredResponse;

    auto serialize = [](Response res) {
        std::ostringstream os;
        os << res;
        return os.str();
    };
    http::request_parser<http::string_body> parser;
    parser.header_limit(kHeaderLimit);
    parser.body_limit(im.config.max_body_bytes);
    parser.eager(false);
    beast::error_code ec;
    asio::const_buffer buf(request_bytes.data(), request_bytes.size());
    std::size_t used = 0;
    while (!ec && !parser.is_header_done() && used < request_bytes.size()) {
        used += parser.put(asio::const_buffer(static_cast<const char*>(buf.data()) + used, buf.size() - used), ec);
    }
    if (ec == http::error::header_limit || ec == http::error::body_limit) {
        return serialize(error_response(Errc::too_large, "request too large", 11, false));
    }
    if (ec || !parser.is_header_done()) {
        return serialize(error_response(Errc::invalid_argument, "malformed request", 11, false));
    }
    const auto& h = parser.get();
    if (!im.authorized(h.base(), split_target(h.target()), remote_address)) {
        return serialize(error_response(Errc::unauthenticated, "missing or invalid pairing token", h.version(), false));
    }
    parser.eager(true);
    while (!ec && !parser.is_done() && used < request_bytes.size()) {
        used += parser.put(asio::const_buffer(static_cast<const char*>(buf.data()) + used, buf.size() - used), ec);
    }
    if (!ec && !parser.is_done()) {
        parser.put_eof(ec);
    }
    if (ec == http::error::body_limit) {
        return serialize(error_response(Errc::too_large, "request body exceeds the size cap", 11, false));
    }
    if (ec || !parser.is_done()) {
        return serialize(error_response(Errc::invalid_argument, "malformed request", 11, false));
    }
    auto req = parser.release();
    if (websocket::is_upgrade(req)) {
        return serialize(error_response(Errc::invalid_argument, "streams need a socket", req.version(), false));
    }
    return serialize(im.route(req));
}

}  // namespace autonoma::gateway
