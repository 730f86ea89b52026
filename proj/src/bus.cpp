#include "bus.hpp"

namespace accnoc {

SharedBus::SharedBus(int txn_overhead, NocCounters* counters, Stats* stats)
    : txn_overhead_(txn_overhead), counters_(counters), stats_(stats) {}

void SharedBus::attach(int x, int y, LocalPort* port) {
    ports_.push_back(Node{x, y, port});
}

LocalPort* SharedBus::dest_port(const FlitEnv& f) const {
    for (const Node& n : ports_)
        if (n.x == f.dest_x && n.y == f.dest_y)
            return n.port;
    return nullptr;
}

void SharedBus::tick(std::int64_t) {
    const TimePs now = sim().now();

    if (active_ < 0) {
        // grant the bus to the next sender with a pending packet
        const int n = static_cast<int>(ports_.size());
        for (int step = 1; step <= n; ++step) {
            const int i = (rr_ + step) % n;
            if (ports_[static_cast<std::size_t>(i)].port->peek_tx(now)) {
                active_ = i;
                rr_ = i;
                data_start_ = now + txn_overhead_ * clock().period_ps;
                break;
            }
        }
        if (active_ < 0)
            return;
    }

    if (now < data_start_)
        return;

    LocalPort* src = ports_[static_cast<std::size_t>(active_)].port;
    const FlitEnv* head = src->peek_tx(now);
    if (!head)
        return; // sender has not produced the next beat yet
    LocalPort* dst = dest_port(*head);
    if (!dst)
        throw ProtocolError("bus flit addressed to an unattached node");
    if (!dst->rx_ready(now))
        return; // receiver back-pressure holds the beat
    FlitEnv f = *head;
    src->pull_tx(now);
    const bool tail = f.tail;
    dst->rx_push(now, std::move(f));
    ++counters_->injected;
    ++counters_->ejected;
    ++counters_->progress;
    if (stats_)
        ++stats_->bus_beats;
    if (tail)
        active_ = -1; // packet done; rearbitrate next cycle
}

} // namespace accnoc
