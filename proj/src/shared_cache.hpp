#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <vector>

#include "kernel.hpp"
#include "metrics.hpp"

namespace accnoc {

// Single-port set-associative cache with a FIFO contention queue. Hits are
// pipelined one per cycle with hit_cycles of latency; a miss blocks the
// port for the backing latency. Used by the shared-buffering baseline in
// place of the distributed task/output/chain buffers.
class SharedCache : public Component {
public:
    struct Params {
        std::size_t size_bytes = 65536;
        int ways = 2;
        int line_bytes = 64;
        int hit_cycles = 3;
        int miss_cycles = 30;
    };

    SharedCache(Params params, Stats* stats);

    // Queues one line access per covered cache line; cb fires once, at the
    // completion time of the last line.
    void access(TimePs now, bool write, std::uint64_t addr, std::size_t bytes,
                std::function<void(TimePs)> cb);

    // Functional store, checked against a flat-array oracle in tests.
    void write_bytes(std::uint64_t addr, const std::vector<std::uint8_t>& data);
    std::vector<std::uint8_t> read_bytes(std::uint64_t addr,
                                         std::size_t len) const;

    void tick(std::int64_t k) override;

    std::uint64_t hits() const { return hits_; }
    std::uint64_t misses() const { return misses_; }
    std::size_t queue_depth() const { return queue_.size(); }

private:
    bool lookup(std::uint64_t line_addr); // true on hit; updates LRU/fill

    struct Batch {
        int outstanding = 0;
        std::function<void(TimePs)> cb;
    };
    struct LineReq {
        bool write;
        std::uint64_t line_addr;
        std::uint64_t batch;
    };

    Params p_;
    Stats* stats_;
    std::size_t sets_ = 1;
    struct Way {
        bool valid = false;
        std::uint64_t tag = 0;
        std::uint64_t lru = 0;
    };
    std::vector<std::vector<Way>> tags_;
    std::uint64_t lru_clock_ = 0;

    std::deque<LineReq> queue_;
    std::map<std::uint64_t, Batch> batches_;
    std::uint64_t next_batch_ = 1;
    TimePs busy_until_ = -1;

    std::map<std::uint64_t, std::uint8_t> store_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
};

} // namespace accnoc
