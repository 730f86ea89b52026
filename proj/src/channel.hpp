#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <vector>

#include "codec.hpp"
#include "fifo.hpp"
#include "kernel.hpp"
#include "metrics.hpp"

namespace accnoc {

class SharedCache;

// Behavioural model of one accelerator: a delay block with fixed I/O flit
// counts running in its own clock domain.
struct HwaSpec {
    int hwa_id = 0;
    std::int64_t exec_base = 1;     // cycles
    std::int64_t exec_per_flit = 0; // affine term over input flits
    int input_flits = 1;
    int output_flits = 1;
    ClockDomain clock{3333, 0};
    int chain_group = -1; // index into the config's chain group list

    std::int64_t exec_cycles(int n_in) const {
        const std::int64_t c = exec_base + exec_per_flit * n_in;
        return c < 1 ? 1 : c;
    }
    std::size_t result_bytes() const {
        const std::size_t b = static_cast<std::size_t>(output_flits) * kBodyBytes;
        return b > kMaxDataBytes ? kMaxDataBytes : b;
    }
};

struct ChainGroup {
    std::string name;
    std::vector<int> members; // chaining index -> hwa_id, at most 4
};

// Where grant / result / notify packets go.
struct AddressMap {
    int fpga_x = 2;
    int fpga_y = 2;
    bool has_memory = false;
    int mem_x = 0;
    int mem_y = 0;
    std::vector<std::pair<int, int>> proc_xy; // by source_id
};

struct ChannelParams {
    int num_tb = 2;
    int rb_depth = 8;
    int lgb_depth = 4;
    int pob_depth = 2;
    int cb_depth = 2;
    int tb_flit_cap = 128;
};

// A task while it lives inside the FPGA.
struct TaskWork {
    std::uint64_t task_id = 0;
    HeadFields header; // carries chain state, priority, direction, addresses
    std::vector<std::uint8_t> bytes;
    int n_flits = 0; // payload flits backing `bytes`
};

struct RequestMsg {
    HeadFields header;
    std::uint64_t task_id = 0;
};

struct OutboundCommand {
    Packet packet;
    std::uint64_t task_id = 0;
};

struct ResultOut {
    Packet packet;
    std::uint64_t task_id = 0;
    std::uint8_t priority = 0;
    TimePs committed = -1;
};

struct ChainEntry {
    TaskWork work;
    std::uint8_t target_index = 0; // consumed front index, pre-shift
    TimePs committed = -1;         // producer-side commit instant
    bool claimed = false;
};

struct TbSlot {
    enum class St { Free, Granted, Ready, Taken };
    St st = St::Free;
    std::uint64_t task_id = 0;
    TimePs free_visible = 0;       // when the grant controller may reuse it
    TimePs ready_visible = -1;     // when the task arbiter may take it
    std::vector<Flit> flits;       // committed packets, flit by flit
    int inbound = 0;               // popped by the receiver, commit pending
    int committed_payload = 0;
    bool task_complete = false;
};

// Encode/decode the simulator task id echoed in command-flit payload bits.
inline std::uint64_t command_payload(std::uint64_t subtype, std::uint64_t id) {
    return (subtype & 3) | (id << 2);
}
inline std::uint64_t command_task_id(std::uint64_t payload) {
    return payload >> 2;
}

// Cache-model addresses for the shared-buffering baseline. Only the timing
// model sees these; task data itself travels in the task structs. Regions
// pack contiguously (1.5 KiB per buffer) so they spread over cache sets the
// way real packet staging areas would.
inline std::uint64_t buffer_region(int hwa, int sub) {
    return 0x40000000ull + (static_cast<std::uint64_t>(hwa) * 6 +
                            static_cast<std::uint64_t>(sub)) *
                               0x600ull;
}
inline std::uint64_t tb_region(int hwa, int slot) {
    return buffer_region(hwa, slot); // slots 0..3
}
inline std::uint64_t pob_region(int hwa) { return buffer_region(hwa, 4); }
inline std::uint64_t cb_region(int hwa) { return buffer_region(hwa, 5); }

std::vector<std::uint8_t> synth_result(int hwa_id,
                                       const std::vector<std::uint8_t>& input,
                                       std::size_t out_len);

class Channel;

// Interface-clock half: request queue, grant control and task buffers.
class ChannelFront : public Component {
public:
    explicit ChannelFront(Channel& ch) : ch_(ch) {}
    void tick(std::int64_t k) override;

private:
    Channel& ch_;
};

// Accelerator-clock half: task arbiter, controller, delay block, packet
// generator and chaining controller.
class ChannelBack : public Component {
public:
    explicit ChannelBack(Channel& ch) : ch_(ch) {}
    void tick(std::int64_t k) override;

private:
    Channel& ch_;
};

class Channel {
public:
    Channel(Simulator& sim, HwaSpec spec, ChannelParams params,
            ClockDomain iface_clock, Stats* stats, TaskLog* log,
            const AddressMap* addr);

    const HwaSpec& spec() const { return spec_; }
    const ChannelParams& params() const { return params_; }
    ClockDomain iface_clock() const { return iface_clock_; }

    ChannelFront& front() { return front_; }
    ChannelBack& back() { return back_; }

    void set_chain_peers(std::vector<Channel*> peers,
                         std::vector<int> member_ids);
    void set_cache(SharedCache* cache) { cache_ = cache; }
    SharedCache* cache() const { return cache_; }

    // --- packet receiver side (interface clock) ---
    bool request_inbox_full(TimePs now) const;
    void deliver_request(TimePs now, RequestMsg msg);
    bool payload_slot_valid(int slot) const;
    std::uint64_t task_of_slot(int slot) const {
        return slots_[static_cast<std::size_t>(slot)].task_id;
    }
    bool slot_can_accept(int slot) const;
    void note_flit_inbound(int slot);
    void commit_payload_flit(TimePs now, int slot, Flit f, bool packet_done,
                             bool task_done);

    // --- packet sender side (interface clock) ---
    PacketBuffer<OutboundCommand>& command_queue() { return lgb_; }
    PacketBuffer<ResultOut>& result_queue() { return pob_; }

    // --- chaining ---
    std::deque<ChainEntry>& chain_buffer() { return cb_; }
    const std::vector<Channel*>& chain_peers() const { return chain_peers_; }
    const std::vector<int>& chain_member_ids() const { return chain_member_ids_; }

    bool back_active() const { return phase_ != Phase::Idle; }
    std::size_t rb_size() const { return rb_.size(); }
    std::size_t tb_ready_or_full() const;
    std::size_t pob_size() const { return pob_.size(); }
    std::size_t cb_size() const { return cb_.size(); }
    std::size_t tb_occupied() const;
    std::uint64_t flits_in() const { return flits_in_; }
    std::uint64_t flits_consumed() const { return flits_consumed_; }

    // Probes for the latency-contract tests.
    struct StageProbe {
        TimePs ready = -1, selected = -1, read_done = -1, exec_done = -1,
               emitted = -1;
        int n_in = 0, n_out = 0;
        int src_slot = -1;
        bool from_chain = false;
    };
    const std::vector<StageProbe>& stage_probes() const { return probes_; }

private:
    friend class ChannelFront;
    friend class ChannelBack;

    void front_tick(TimePs now);
    void back_tick(TimePs now);

    void grant(TimePs now, const RequestMsg& req, int slot, bool bypass);
    void start_task(TimePs now, TaskWork work, int src_slot, int src_peer,
                    bool from_chain, TimePs ready_at);
    void finish_generate(TimePs now);
    void emit_notify(TimePs now, const TaskWork& task);
    Packet build_result_packet(const TaskWork& task) const;
    int find_free_slot(TimePs now) const;
    bool lgb_can_take() const { return !lgb_.full(); }

    Simulator& sim_;
    HwaSpec spec_;
    ChannelParams params_;
    ClockDomain iface_clock_;
    Stats* stats_;
    TaskLog* log_;
    const AddressMap* addr_;
    SharedCache* cache_ = nullptr;

    ChannelFront front_;
    ChannelBack back_;

    // interface-clock state
    SyncFifo<RequestMsg> inbox_;
    PacketBuffer<RequestMsg> rb_;
    PacketBuffer<OutboundCommand> lgb_;
    std::deque<std::pair<TimePs, OutboundCommand>> lgb_staging_;
    std::vector<TbSlot> slots_;

    // accelerator-clock state
    enum class Phase { Idle, Reading, Executing, Generating, CommitWait };
    Phase phase_ = Phase::Idle;
    TimePs phase_end_ = 0;
    TaskWork current_;
    int current_src_slot_ = -1;
    int current_src_peer_ = -1;
    bool current_from_chain_ = false;
    std::vector<std::uint8_t> result_bytes_;
    int ta_rr_ = 0;
    int cc_rr_ = 0;
    TimePs cache_wait_until_ = -1;
    bool cache_pending_ = false;

    PacketBuffer<ResultOut> pob_;
    std::deque<ChainEntry> cb_;
    std::vector<Channel*> chain_peers_;
    std::vector<int> chain_member_ids_;

    std::uint64_t flits_in_ = 0;
    std::uint64_t flits_consumed_ = 0;
    std::vector<StageProbe> probes_;
    StageProbe cur_probe_;
};

} // namespace accnoc
