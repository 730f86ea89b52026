#pragma once

#include <vector>

#include "kernel.hpp"
#include "metrics.hpp"
#include "noc.hpp"

namespace accnoc {

// Transaction-level shared bus replacing the mesh for the bus-integration
// comparison. One 128-bit beat per bus cycle, packet-atomic transfers,
// round-robin arbitration among every attached sender. txn_overhead models
// the per-transaction address/handshake phase of a memory-mapped bus
// protocol; set it to zero for a bare beat pipe.
class SharedBus : public Component {
public:
    SharedBus(int txn_overhead, NocCounters* counters, Stats* stats);

    void attach(int x, int y, LocalPort* port);

    void tick(std::int64_t k) override;
    std::size_t attached() const { return ports_.size(); }

private:
    struct Node {
        int x;
        int y;
        LocalPort* port;
    };
    LocalPort* dest_port(const FlitEnv& f) const;

    int txn_overhead_;
    NocCounters* counters_;
    Stats* stats_;
    std::vector<Node> ports_;

    int rr_ = 0;
    int active_ = -1;       // sender holding the bus
    TimePs data_start_ = 0; // first beat may move at this instant
};

} // namespace accnoc
