#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "urllc/hierarchy.hpp"

namespace urllc::gateway {

/// Blocking line-framed byte stream over a connected TCP socket.
class LineConn {
public:
    explicit LineConn(int fd);
    ~LineConn();
    LineConn(LineConn&&) noexcept;
    LineConn& operator=(LineConn&&) noexcept;
    LineConn(const LineConn&) = delete;
    LineConn& operator=(const LineConn&) = delete;

    void send_line(const std::string& line); // appends '\n'
    std::optional<std::string> recv_line();  // nullopt on orderly close
    void close();
    bool valid() const { return fd_ >= 0; }

private:
    int fd_ = -1;
    std::string buffer_;
};

/// "host:port" listener; port 0 binds an ephemeral port.
class Listener {
public:
    explicit Listener(const std::string& endpoint);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    int port() const { return port_; }
    LineConn accept_conn();

private:
    int fd_ = -1;
    int port_ = 0;
};

LineConn connect_to(const std::string& endpoint);

/// One message per line, UTF-8 JSON objects:
///   {"kind":"hello","role":"agent","agent_id":ID}          agent -> sim
///   {"kind":"reset","seed":N}                              sim -> agent
///   {"kind":"state","agent_id":ID,"step":K,
///    "features":[...],"reward":R|null}                     sim -> agent
///   {"kind":"action","agent_id":ID,"step":K,"values":[..]} agent -> sim
///   {"kind":"bye"}                                         either way
/// Strict lockstep per agent: one action, with the matching step, per state.
/// Violations raise and close the session.

/// Sim-side proxy: forwards decide() over the wire and meters nothing itself
/// (the episode runner owns the ledger).
class RemoteActor : public hier::Actor {
public:
    RemoteActor(LineConn conn, std::string agent_id);

    std::vector<double> decide(std::span<const double> state, std::optional<double> reward,
                               std::int64_t step, bool explore) override;
    void episode_reset(std::uint64_t seed) override;
    void bye();

private:
    LineConn conn_;
    std::string agent_id_;
    std::int64_t expected_step_ = 0;
};

/// Sim-side acceptor: waits for one hello per expected agent id and hands
/// out the connected actors.
class AgentHub {
public:
    AgentHub(const std::string& endpoint, std::vector<std::string> expected_agents);

    int port() const { return listener_.port(); }
    void accept_all();
    std::unique_ptr<hier::Actor> take_actor(const std::string& agent_id);

private:
    Listener listener_;
    std::vector<std::string> expected_;
    std::vector<std::pair<std::string, std::unique_ptr<RemoteActor>>> actors_;
};

/// Agent-side helpers (tools and tests): connect, introduce, and serve a
/// policy until `bye`. The callback receives (step, features, reward).
using PolicyFn = std::function<std::vector<double>(std::int64_t, const std::vector<double>&,
                                                   std::optional<double>)>;
void serve_agent(const std::string& endpoint, const std::string& agent_id, const PolicyFn& policy);

} // namespace urllc::gateway
