#include "urllc/gateway.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

#include <json.hpp>

namespace urllc::gateway {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::runtime_error("gateway: " + msg);
}

std::pair<std::string, int> split_endpoint(const std::string& endpoint)
{
    auto colon = endpoint.rfind(':');
    if (colon == std::string::npos) fail("endpoint must be host:port, got " + endpoint);
    std::string host = endpoint.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(endpoint.substr(colon + 1));
    } catch (const std::exception&) {
        fail("bad port in endpoint " + endpoint);
    }
    if (host.empty()) host = "127.0.0.1";
    return {host, port};
}

} // namespace

LineConn::LineConn(int fd) : fd_(fd) {}

LineConn::~LineConn() { close(); }

LineConn::LineConn(LineConn&& other) noexcept : fd_(other.fd_), buffer_(std::move(other.buffer_))
{
    other.fd_ = -1;
}

LineConn& LineConn::operator=(LineConn&& other) noexcept
{
    if (this != &other) {
        close();
        fd_ = other.fd_;
        buffer_ = std::move(other.buffer_);
        other.fd_ = -1;
    }
    return *this;
}

void LineConn::close()
{
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void LineConn::send_line(const std::string& line)
{
    if (fd_ < 0) fail("send on closed connection");
    std::string framed = line;
    framed.push_back('\n');
    std::size_t sent = 0;
    while (sent < framed.size()) {
        ssize_t n = ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) fail("send failed: " + std::string(std::strerror(errno)));
        sent += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> LineConn::recv_line()
{
    if (fd_ < 0) fail("recv on closed connection");
    for (;;) {
        auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n == 0) return std::nullopt;
        if (n < 0) fail("recv failed: " + std::string(std::strerror(errno)));
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

Listener::Listener(const std::string& endpoint)
{
    auto [host, port] = split_endpoint(endpoint);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) fail("socket: " + std::string(std::strerror(errno)));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        fail("listener host must be an IPv4 address, got " + host);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
        fail("bind: " + std::string(std::strerror(errno)));
    if (::listen(fd_, 8) < 0) fail("listen: " + std::string(std::strerror(errno)));

    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0)
        fail("getsockname: " + std::string(std::strerror(errno)));
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener()
{
    if (fd_ >= 0) ::close(fd_);
}

LineConn Listener::accept_conn()
{
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) fail("accept: " + std::string(std::strerror(errno)));
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return LineConn(fd);
}

LineConn connect_to(const std::string& endpoint)
{
    auto [host, port] = split_endpoint(endpoint);
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) fail("socket: " + std::string(std::strerror(errno)));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        fail("client host must be an IPv4 address, got " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        int err = errno;
        ::close(fd);
        fail("connect: " + std::string(std::strerror(err)));
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return LineConn(fd);
}

RemoteActor::RemoteActor(LineConn conn, std::string agent_id)
    : conn_(std::move(conn)), agent_id_(std::move(agent_id))
{
}

std::vector<double> RemoteActor::decide(std::span<const double> state,
                                        std::optional<double> reward, std::int64_t step,
                                        bool /*explore*/)
{
    if (step != expected_step_)
        fail("lockstep violation for " + agent_id_ + ": expected step " +
             std::to_string(expected_step_) + ", orchestrator sent " + std::to_string(step));

    json msg;
    msg["kind"] = "state";
    msg["agent_id"] = agent_id_;
    msg["step"] = step;
    msg["features"] = std::vector<double>(state.begin(), state.end());
    if (reward) {
        msg["reward"] = *reward;
    } else {
        msg["reward"] = nullptr;
    }
    conn_.send_line(msg.dump());

    auto line = conn_.recv_line();
    if (!line) fail("agent " + agent_id_ + " disconnected mid-step");
    json reply;
    try {
        reply = json::parse(*line);
    } catch (const json::exception& e) {
        fail("bad JSON from agent " + agent_id_ + ": " + e.what());
    }
    if (reply.value("kind", "") != "action")
        fail("expected action from " + agent_id_ + ", got kind '" + reply.value("kind", "") + "'");
    if (reply.value("agent_id", "") != agent_id_)
        fail("action for wrong agent: " + reply.value("agent_id", ""));
    if (!reply.contains("step") || reply["step"].get<std::int64_t>() != step)
        fail("lockstep violation from agent " + agent_id_ + ": action step " +
             (reply.contains("step") ? reply["step"].dump() : "missing") + " != state step " +
             std::to_string(step));
    std::vector<double> values = reply.value("values", std::vector<double>{});
    if (values.empty()) fail("action from " + agent_id_ + " carries no values");
    expected_step_ += 1;
    return values;
}

void RemoteActor::episode_reset(std::uint64_t seed)
{
    expected_step_ = 0;
    json msg;
    msg["kind"] = "reset";
    msg["seed"] = seed;
    conn_.send_line(msg.dump());
}

void RemoteActor::bye()
{
    if (!conn_.valid()) return;
    json msg;
    msg["kind"] = "bye";
    conn_.send_line(msg.dump());
    conn_.close();
}

AgentHub::AgentHub(const std::string& endpoint, std::vector<std::string> expected_agents)
    : listener_(endpoint), expected_(std::move(expected_agents))
{
}

void AgentHub::accept_all()
{
    std::size_t needed = expected_.size();
    while (actors_.size() < needed) {
        LineConn conn = listener_.accept_conn();
        auto line = conn.recv_line();
        if (!line) fail("connection closed before hello");
        json hello;
        try {
            hello = json::parse(*line);
        } catch (const json::exception& e) {
            fail(std::string("bad hello JSON: ") + e.what());
        }
        if (hello.value("kind", "") != "hello" || hello.value("role", "") != "agent")
            fail("expected hello{role:agent}, got: " + *line);
        std::string id = hello.value("agent_id", "");
        bool known = false;
        for (const auto& e : expected_)
            if (e == id) known = true;
        if (!known) fail("hello from unexpected agent id '" + id + "'");
        for (const auto& [have, _] : actors_)
            if (have == id) fail("duplicate hello for agent id '" + id + "'");
        actors_.emplace_back(id, std::make_unique<RemoteActor>(std::move(conn), id));
    }
}

std::unique_ptr<hier::Actor> AgentHub::take_actor(const std::string& agent_id)
{
    for (auto& [id, actor] : actors_) {
        if (id == agent_id && actor) return std::move(actor);
    }
    fail("no connected agent with id '" + agent_id + "'");
}

void serve_agent(const std::string& endpoint, const std::string& agent_id, const PolicyFn& policy)
{
    LineConn conn = connect_to(endpoint);
    json hello;
    hello["kind"] = "hello";
    hello["role"] = "agent";
    hello["agent_id"] = agent_id;
    conn.send_line(hello.dump());

    for (;;) {
        auto line = conn.recv_line();
        if (!line) return;
        json msg = json::parse(*line);
        std::string kind = msg.value("kind", "");
        if (kind == "bye") return;
        if (kind == "reset") continue;
        if (kind != "state") fail("agent " + agent_id + " got unexpected kind '" + kind + "'");
        std::int64_t step = msg["step"].get<std::int64_t>();
        std::vector<double> features = msg.value("features", std::vector<double>{});
        std::optional<double> reward;
        if (msg.contains("reward") && !msg["reward"].is_null())
            reward = msg["reward"].get<double>();
        auto values = policy(step, features, reward);
        json action;
        action["kind"] = "action";
        action["agent_id"] = agent_id;
        action["step"] = step;
        action["values"] = values;
        conn.send_line(action.dump());
    }
}

} // namespace urllc::gateway
