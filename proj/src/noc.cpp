#include "noc.hpp"

#include <cassert>

namespace accnoc {

const char* port_name(Port p) {
    switch (p) {
    case Port::N: return "N";
    case Port::E: return "E";
    case Port::S: return "S";
    case Port::W: return "W";
    case Port::Local: return "L";
    }
    return "?";
}

Port route_xy(const NodeId& here, const NodeId& dest) {
    if (dest.x > here.x)
        return Port::E;
    if (dest.x < here.x)
        return Port::W;
    if (dest.y > here.y)
        return Port::S;
    if (dest.y < here.y)
        return Port::N;
    return Port::Local;
}

FlitEnv make_env(const Flit& f, std::uint32_t packet_id, TimePs now) {
    FlitEnv e;
    e.flit = f;
    const std::uint64_t route = f.bits(130, 7);
    e.dest_x = static_cast<std::uint8_t>(route & 7);
    e.dest_y = static_cast<std::uint8_t>((route >> 3) & 7);
    e.head = f.bit(128);
    e.tail = f.bit(129);
    e.packet_id = packet_id;
    e.injected_ps = now;
    return e;
}

Router::Router(Mesh* mesh, int x, int y, int pipeline, std::size_t voq_depth)
    : mesh_(mesh), x_(x), y_(y), pipeline_(pipeline), voq_depth_(voq_depth) {
    route_latch_.fill(Port::Local);
}

Port Router::route_for(Port input, const FlitEnv& flit) const {
    if (flit.head) {
        NodeId dest{flit.dest_x, flit.dest_y, NodeKind::None};
        NodeId here{x_, y_, NodeKind::None};
        return route_xy(here, dest);
    }
    // Body flits follow their head along the reserved path.
    return route_latch_[static_cast<std::size_t>(input)];
}

bool Router::has_space(Port input, Port output) const {
    return voq_[static_cast<std::size_t>(static_cast<int>(input))]
               [static_cast<std::size_t>(static_cast<int>(output))]
                   .size() < voq_depth_;
}

void Router::accept(Port input, FlitEnv flit, std::int64_t tick_now) {
    const Port out = route_for(input, flit);
    if (flit.head)
        route_latch_[static_cast<std::size_t>(input)] = out;
    auto& q = voq_[static_cast<std::size_t>(static_cast<int>(input))]
                  [static_cast<std::size_t>(static_cast<int>(out))];
    assert(q.size() < voq_depth_);
    q.push_back(Entry{std::move(flit), tick_now + pipeline_});
}

std::size_t Router::queued() const {
    std::size_t n = 0;
    for (const auto& row : voq_)
        for (const auto& q : row)
            n += q.size();
    return n;
}

void Router::tick(std::int64_t k) {
    input_used_.fill(false);

    // Local injection: pull at most one flit from the attached node.
    LocalPort* lp = mesh_->local_port(x_, y_);
    if (lp) {
        if (const FlitEnv* f = lp->peek_tx(sim().now())) {
            const Port out = route_for(Port::Local, *f);
            auto& q = voq_[static_cast<std::size_t>(static_cast<int>(
                          Port::Local))]
                          [static_cast<std::size_t>(static_cast<int>(out))];
            if (q.size() < voq_depth_) {
                FlitEnv flit = *f;
                lp->pull_tx(sim().now());
                if (flit.head)
                    route_latch_[static_cast<std::size_t>(
                        static_cast<int>(Port::Local))] = out;
                q.push_back(Entry{std::move(flit), k + pipeline_});
                ++mesh_->counters().injected;
                ++mesh_->counters().progress;
            }
        }
    }

    // Switch at most one flit per output port, honouring wormhole locks.
    for (int o = 0; o < kPorts; ++o)
        try_move(static_cast<Port>(o), k);
}

bool Router::try_move(Port output, std::int64_t k) {
    const auto oi = static_cast<std::size_t>(static_cast<int>(output));
    auto eligible = [&](int in) -> Entry* {
        if (input_used_[static_cast<std::size_t>(in)])
            return nullptr;
        auto& q = voq_[static_cast<std::size_t>(in)][oi];
        if (q.empty() || q.front().ready_tick > k)
            return nullptr;
        return &q.front();
    };

    int chosen = -1;
    if (lock_[oi].held) {
        if (!eligible(lock_[oi].input))
            return false;
        chosen = lock_[oi].input;
    } else {
        // Round-robin over inputs with a ready head flit for this output.
        for (int step = 1; step <= kPorts; ++step) {
            const int in = (rr_[oi] + step) % kPorts;
            Entry* e = eligible(in);
            if (e && e->flit.head) {
                chosen = in;
                break;
            }
        }
        if (chosen < 0)
            return false;
    }

    Entry& entry =
        voq_[static_cast<std::size_t>(chosen)][oi].front();

    // Peek flow control: advance only if downstream has room this cycle.
    if (output == Port::Local) {
        LocalPort* lp = mesh_->local_port(x_, y_);
        if (!lp || !lp->rx_ready(sim().now()))
            return false;
        FlitEnv flit = std::move(entry.flit);
        voq_[static_cast<std::size_t>(chosen)][oi].pop_front();
        const bool tail = flit.tail;
        const bool head = flit.head;
        lp->rx_push(sim().now(), std::move(flit));
        ++mesh_->counters().ejected;
        ++mesh_->counters().progress;
        if (head && !tail) {
            lock_[oi].held = true;
            lock_[oi].input = chosen;
        } else if (tail) {
            lock_[oi].held = false;
        }
    } else {
        int nx = x_, ny = y_;
        Port nin = Port::Local;
        switch (output) {
        case Port::N: ny -= 1; nin = Port::S; break;
        case Port::S: ny += 1; nin = Port::N; break;
        case Port::E: nx += 1; nin = Port::W; break;
        case Port::W: nx -= 1; nin = Port::E; break;
        default: break;
        }
        if (nx < 0 || ny < 0 || nx >= mesh_->width() || ny >= mesh_->height())
            return false; // XY routing never produces this
        Router& next = mesh_->router(nx, ny);
        const Port nout = next.route_for(nin, entry.flit);
        auto& nq = next.voq_[static_cast<std::size_t>(static_cast<int>(nin))]
                            [static_cast<std::size_t>(static_cast<int>(nout))];
        if (nq.size() >= next.voq_depth_)
            return false;
        FlitEnv flit = std::move(entry.flit);
        voq_[static_cast<std::size_t>(chosen)][oi].pop_front();
        const bool tail = flit.tail;
        const bool head = flit.head;
        next.accept(nin, std::move(flit), k);
        ++mesh_->counters().hops;
        ++mesh_->counters().progress;
        if (head && !tail) {
            lock_[oi].held = true;
            lock_[oi].input = chosen;
        } else if (tail) {
            lock_[oi].held = false;
        }
    }

    input_used_[static_cast<std::size_t>(chosen)] = true;
    rr_[oi] = chosen;
    return true;
}

Mesh::Mesh(int width, int height, int pipeline, std::size_t voq_depth,
           NocCounters* counters)
    : width_(width), height_(height), counters_(counters) {
    nodes_.resize(static_cast<std::size_t>(width * height));
    ports_.resize(static_cast<std::size_t>(width * height), nullptr);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            nodes_[index(x, y)] = NodeId{x, y, NodeKind::None};
            routers_.push_back(
                std::make_unique<Router>(this, x, y, pipeline, voq_depth));
        }
}

void Mesh::attach(int x, int y, NodeId id, LocalPort* port) {
    nodes_[index(x, y)] = id;
    ports_[index(x, y)] = port;
}

void Mesh::register_components(Simulator& sim, ClockDomain noc_clock) {
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            sim.add_component(routers_[index(x, y)].get(),
                              "router_" + std::to_string(x) + "_" +
                                  std::to_string(y),
                              noc_clock);
}

std::size_t Mesh::queued_flits() const {
    std::size_t n = 0;
    for (const auto& r : routers_)
        n += r->queued();
    return n;
}

} // namespace accnoc
