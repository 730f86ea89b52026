#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "channel.hpp"
#include "fifo.hpp"
#include "kernel.hpp"
#include "noc.hpp"

namespace accnoc {

class SharedCache;

// Inbound dispatcher: pops flits from the router output buffer and steers
// packets into the owning channel. `channels_per_pr` = 0 models the
// centralized strategy (a single receiver owns every channel); otherwise
// each receiver owns a fixed contiguous block of channels.
class PacketReceiver : public Component {
public:
    PacketReceiver(AsyncFifo<FlitEnv>* in, std::vector<Channel*> channels,
                   int channels_per_pr, Stats* stats, TaskLog* log);

    void tick(std::int64_t k) override;
    bool active() const { return state_ != State::Idle; }
    const std::vector<std::uint64_t>& flits_per_pr() const {
        return flits_per_pr_;
    }
    int owner_of(int channel_index) const;

private:
    void begin_packet(TimePs now, const HeadFields& h);

    enum class State { Idle, Payload, Drop };
    State state_ = State::Idle;
    int cur_channel_ = -1;
    int cur_slot_ = -1;
    int flits_left_ = 0; // body flits still to pop
    bool task_last_ = false;
    int cur_pr_ = -1;

    AsyncFifo<FlitEnv>* in_;
    std::vector<Channel*> channels_;
    std::vector<int> hwa_to_channel_; // dense map, -1 = unknown
    int channels_per_pr_;
    Stats* stats_;
    TaskLog* log_;
    std::vector<std::uint64_t> flits_per_pr_;
};

// Outbound arbiter. Commands (grants, notifications) always outrank result
// packets; commands arbitrate round-robin, results by priority then
// round-robin. group_size = 0 models the global strategy, otherwise
// channels are clustered and a second-level arbiter picks among groups.
class PacketSender : public Component {
public:
    PacketSender(AsyncFifo<FlitEnv>* out, std::vector<Channel*> channels,
                 int group_size, Stats* stats, TaskLog* log,
                 std::uint32_t* packet_seq);

    void tick(std::int64_t k) override;
    bool busy() const { return emitting_; }
    void set_cache(SharedCache* cache) { cache_ = cache; }

private:
    struct Selection {
        bool is_command = false;
        int channel = -1;
    };
    bool arbitrate(TimePs now, Selection& sel);
    void begin_emission(TimePs now, Packet packet, std::uint64_t task_id,
                        bool is_command);

    AsyncFifo<FlitEnv>* out_;
    std::vector<Channel*> channels_;
    int group_size_;
    Stats* stats_;
    TaskLog* log_;
    std::uint32_t* packet_seq_;
    SharedCache* cache_ = nullptr;

    int ngroups_ = 1;
    std::vector<int> cmd_rr_;                  // per group
    std::vector<std::array<int, 4>> res_rr_;   // per group, per priority
    int lvl2_cmd_rr_ = 0;
    std::array<int, 4> lvl2_res_rr_{};

    bool emitting_ = false;
    std::vector<Flit> flits_;
    std::size_t next_flit_ = 0;
    TimePs next_push_ = 0;
    std::uint64_t cur_task_ = 0;
    bool cur_is_result_ = false;
    std::uint32_t cur_packet_id_ = 0;
    bool cache_pending_ = false;
    TimePs cache_ready_ = -1;
};

// Samples interface activity and buffer occupancy once per interface cycle.
class InterfaceProbe : public Component {
public:
    InterfaceProbe(PacketReceiver* pr, PacketSender* ps,
                   std::vector<Channel*> channels, Stats* stats)
        : pr_(pr), ps_(ps), channels_(std::move(channels)), stats_(stats) {}

    void tick(std::int64_t) override;

private:
    PacketReceiver* pr_;
    PacketSender* ps_;
    std::vector<Channel*> channels_;
    Stats* stats_;
};

} // namespace accnoc
