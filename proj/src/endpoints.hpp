#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "channel.hpp"
#include "fifo.hpp"
#include "kernel.hpp"
#include "metrics.hpp"
#include "noc.hpp"

namespace accnoc {

// One accelerator invocation inside a job script. chain_depth > 0 makes the
// single request cover the next chain_depth hops through the chain group.
struct InvocationStep {
    int hwa = 0;
    std::uint8_t chain_depth = 0;
    std::uint8_t chain_index = 0; // three packed 2-bit entries, front first
    bool payload_from_prev = false;
};

struct WorkloadSpec {
    enum class Mode { Open, Closed };
    Mode mode = Mode::Open;
    double rate_per_us = 0.1; // requests per microsecond (open mode)
    bool poisson = false;
    std::vector<int> hwa_set{0};
    int payload_bytes = 64;
    int packets_per_task = 1;
    std::uint8_t priority = 0;
    bool random_priority = false;
    std::uint8_t direction = kDirDirect;
    // open mode: generated requests queue inside the processor once this
    // many tasks are in flight (0 = unbounded); models the blocking
    // invocation software
    int max_outstanding = 0;
    int jobs = 0;                    // closed mode: jobs per processor
    std::vector<InvocationStep> job; // empty = one random-target step
};

// Shared context handed to every endpoint by the system builder.
struct EndpointEnv {
    const AddressMap* addr = nullptr;
    Stats* stats = nullptr;
    TaskLog* log = nullptr;
    const std::vector<HwaSpec>* hwas = nullptr;
    const std::vector<ChainGroup>* groups = nullptr;
    std::uint64_t* task_seq = nullptr;
    std::uint32_t* packet_seq = nullptr;
    std::uint64_t seed = 1;
    std::uint32_t addr_stride = 4096;
    std::uint32_t addr_base = 0x10000;
    std::int64_t fetch_cycles = 50; // modeled result fetch, memory scenario
    std::function<void(std::uint64_t)> on_complete;
};

// Inter-arrival draw: fixed interval or exponential via inverse CDF from
// explicit uniform bits (portable across standard libraries).
TimePs sample_interval(std::mt19937_64& rng, bool poisson, double inv_rate_ps);

// Chain hops resolved through the group's index map; returns the hwa that
// will emit the final result for this step.
int final_hwa_of(const InvocationStep& step, const std::vector<HwaSpec>& hwas,
                 const std::vector<ChainGroup>& groups);

// The full hop sequence (first hwa plus chained members).
std::vector<int> hop_sequence(const InvocationStep& step,
                              const std::vector<HwaSpec>& hwas,
                              const std::vector<ChainGroup>& groups);

// Traffic source: issues requests, answers grants with payload packets and
// consumes results/notifications. Not an ISA model.
class Processor : public Component, public LocalPort {
public:
    Processor(int source_id, WorkloadSpec workload, EndpointEnv env,
              ClockDomain noc_clock, ClockDomain proc_clock,
              std::size_t link_depth);

    void tick(std::int64_t k) override;

    // LocalPort (router side)
    const FlitEnv* peek_tx(TimePs now) override;
    void pull_tx(TimePs now) override;
    bool rx_ready(TimePs now) const override;
    void rx_push(TimePs now, FlitEnv flit) override;

    bool done() const;
    std::uint64_t issued() const { return issued_; }
    const std::map<std::uint64_t, std::vector<std::uint8_t>>&
    result_bytes() const {
        return results_;
    }
    const std::map<std::uint64_t, std::vector<std::uint8_t>>&
    input_bytes() const {
        return inputs_;
    }

private:
    struct TxFlit {
        FlitEnv env;
        std::uint64_t task_id = 0;
        bool last_payload = false;
        bool is_request = false;
    };
    struct Outstanding {
        std::uint64_t task_id = 0;
        InvocationStep step;
        bool notify_seen = false;
        bool result_seen = false;
        bool counted_done = false;
    };

    void issue(TimePs now, const InvocationStep& step,
               const std::vector<std::uint8_t>* prev_bytes);
    void on_grant(TimePs now, const HeadFields& h);
    void on_notify(TimePs now, const HeadFields& h);
    void on_result(TimePs now, const HeadFields& h,
                   std::vector<std::uint8_t> bytes);
    void handle_packet(TimePs now, const std::vector<Flit>& flits);
    void maybe_finish(TimePs now, std::uint64_t task_id);
    void advance_job(TimePs now);
    std::vector<std::uint8_t> fresh_payload(std::size_t len);

    int source_id_;
    WorkloadSpec wl_;
    EndpointEnv env_;
    SyncFifo<FlitEnv> link_;
    CdcFifo<FlitEnv> rx_;
    std::deque<TxFlit> backlog_;
    std::vector<Flit> assembly_;

    std::mt19937_64 arrival_rng_;
    std::mt19937_64 data_rng_;
    TimePs next_arrival_ = 0;
    double inv_rate_ps_ = 0;

    std::map<int, std::deque<std::uint64_t>> await_grant_; // per hwa
    std::map<int, std::deque<std::uint64_t>> await_result_;
    std::map<std::uint64_t, Outstanding> tasks_;
    std::map<std::uint64_t, std::vector<std::uint8_t>> inputs_;
    std::map<std::uint64_t, std::vector<std::uint8_t>> results_;

    int open_outstanding_ = 0;
    // closed-mode job engine
    int jobs_done_ = 0;
    std::size_t step_idx_ = 0;
    bool step_in_flight_ = false;
    std::vector<std::uint8_t> prev_result_;
    std::uint64_t issued_ = 0;
};

// Flat memory image with a deterministic background pattern.
class MemoryModel {
public:
    explicit MemoryModel(std::uint64_t seed) : seed_(seed) {}
    std::uint8_t byte(std::uint64_t addr) const;
    std::vector<std::uint8_t> read(std::uint64_t addr, std::size_t len) const;
    void write(std::uint64_t addr, const std::vector<std::uint8_t>& data);
    bool written_all(std::uint64_t addr, std::size_t len) const;

private:
    std::uint64_t seed_;
    std::map<std::uint64_t, std::uint8_t> written_;
};

// Memory-access scenario endpoint: turns grant packets into DMA payload
// streams and writes returned results back into the memory image.
class MemoryNode : public Component, public LocalPort {
public:
    MemoryNode(EndpointEnv env, ClockDomain noc_clock, ClockDomain mem_clock,
               std::size_t link_depth, std::int64_t init_cycles,
               std::int64_t beat_cycles);

    void tick(std::int64_t k) override;

    const FlitEnv* peek_tx(TimePs now) override;
    void pull_tx(TimePs now) override;
    bool rx_ready(TimePs now) const override;
    void rx_push(TimePs now, FlitEnv flit) override;

    MemoryModel& memory() { return mem_; }
    std::size_t pending_jobs() const { return jobs_.size(); }

private:
    struct Job {
        HeadFields grant;
        std::uint64_t task_id = 0;
    };
    void handle_packet(TimePs now, const std::vector<Flit>& flits);
    void start_job(TimePs now);

    EndpointEnv env_;
    SyncFifo<FlitEnv> link_;
    CdcFifo<FlitEnv> rx_;
    MemoryModel mem_;
    std::int64_t init_cycles_;
    std::int64_t beat_cycles_;

    std::deque<Job> jobs_;
    struct Beat {
        FlitEnv env;
        TimePs release;
        std::uint64_t task_id;
        bool last;
    };
    std::deque<Beat> beats_;
    std::vector<Flit> assembly_;
};

} // namespace accnoc
