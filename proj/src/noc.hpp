#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "codec.hpp"
#include "kernel.hpp"

namespace accnoc {

enum class NodeKind { Processor, Fpga, Memory, None };

struct NodeId {
    int x = 0;
    int y = 0;
    NodeKind kind = NodeKind::Processor;
    bool operator==(const NodeId&) const = default;
};

enum class Port : int { N = 0, E = 1, S = 2, W = 3, Local = 4 };
inline constexpr int kPorts = 5;
const char* port_name(Port p);

// Dimension-ordered routing: X first, then Y, Local when equal.
Port route_xy(const NodeId& here, const NodeId& dest);

// A flit in flight plus routing metadata decoded once at injection. The raw
// word stays authoritative; the cached fields are derived from it.
struct FlitEnv {
    Flit flit;
    std::uint8_t dest_x = 0;
    std::uint8_t dest_y = 0;
    bool head = false;
    bool tail = false;
    std::uint32_t packet_id = 0;
    TimePs injected_ps = 0;
};

FlitEnv make_env(const Flit& f, std::uint32_t packet_id, TimePs now);

// What a mesh node exposes to its router's local port.
class LocalPort {
public:
    virtual ~LocalPort() = default;
    virtual const FlitEnv* peek_tx(TimePs now) = 0;
    virtual void pull_tx(TimePs now) = 0; // consume the peeked flit
    virtual bool rx_ready(TimePs now) const = 0;
    virtual void rx_push(TimePs now, FlitEnv flit) = 0;
};

struct NocCounters {
    std::uint64_t injected = 0;
    std::uint64_t ejected = 0;
    std::uint64_t hops = 0;
    std::uint64_t progress = 0; // any flit movement, for the watchdog
};

class Mesh;

// 5-port router with per-input virtual output queues, round-robin output
// arbitration, wormhole locks and peek flow control.
class Router : public Component {
public:
    Router(Mesh* mesh, int x, int y, int pipeline, std::size_t voq_depth);

    void tick(std::int64_t k) override;

    // Called by the upstream router (or local injection) to hand a flit to
    // this router's input. Routing happens here so the spender can peek the
    // exact target queue beforehand.
    void accept(Port input, FlitEnv flit, std::int64_t tick_now);

    // Queue the flit would join if it arrived on `input` now.
    Port route_for(Port input, const FlitEnv& flit) const;
    bool has_space(Port input, Port output) const;
    std::size_t queued() const;

private:
    struct Entry {
        FlitEnv flit;
        std::int64_t ready_tick;
    };

    bool try_move(Port output, std::int64_t k);

    Mesh* mesh_;
    int x_;
    int y_;
    int pipeline_;
    std::size_t voq_depth_;
    std::array<std::array<std::deque<Entry>, kPorts>, kPorts> voq_; // [in][out]
    std::array<Port, kPorts> route_latch_{};
    struct Lock {
        bool held = false;
        int input = 0;
    };
    std::array<Lock, kPorts> lock_{};
    std::array<int, kPorts> rr_{};
    std::array<bool, kPorts> input_used_{};
};

class Mesh {
public:
    Mesh(int width, int height, int pipeline, std::size_t voq_depth,
         NocCounters* counters);

    void attach(int x, int y, NodeId id, LocalPort* port);
    void register_components(Simulator& sim, ClockDomain noc_clock);

    int width() const { return width_; }
    int height() const { return height_; }
    Router& router(int x, int y) { return *routers_[index(x, y)]; }
    const NodeId& node(int x, int y) const { return nodes_[index(x, y)]; }
    LocalPort* local_port(int x, int y) { return ports_[index(x, y)]; }
    NocCounters& counters() { return *counters_; }
    std::size_t queued_flits() const;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y * width_ + x);
    }

    int width_;
    int height_;
    std::vector<std::unique_ptr<Router>> routers_;
    std::vector<NodeId> nodes_;
    std::vector<LocalPort*> ports_;
    NocCounters* counters_;
};

} // namespace accnoc
