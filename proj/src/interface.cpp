#include "interface.hpp"

#include <cassert>

#include "shared_cache.hpp"

namespace accnoc {

PacketReceiver::PacketReceiver(AsyncFifo<FlitEnv>* in,
                               std::vector<Channel*> channels,
                               int channels_per_pr, Stats* stats, TaskLog* log)
    : in_(in), channels_(std::move(channels)), channels_per_pr_(channels_per_pr),
      stats_(stats), log_(log) {
    hwa_to_channel_.assign(32, -1);
    for (std::size_t i = 0; i < channels_.size(); ++i)
        hwa_to_channel_[static_cast<std::size_t>(
            channels_[i]->spec().hwa_id)] = static_cast<int>(i);
    const int n = static_cast<int>(channels_.size());
    const int prs = channels_per_pr_ <= 0
                        ? 1
                        : (n + channels_per_pr_ - 1) / channels_per_pr_;
    flits_per_pr_.assign(static_cast<std::size_t>(prs), 0);
}

int PacketReceiver::owner_of(int channel_index) const {
    return channels_per_pr_ <= 0 ? 0 : channel_index / channels_per_pr_;
}

void PacketReceiver::tick(std::int64_t) {
    const TimePs now = sim().now();
    const TimePs period = clock().period_ps;

    const FlitEnv* head = in_->peek(now);
    if (!head)
        return;

    if (state_ == State::Drop) {
        FlitEnv f = *in_->pop(now);
        ++stats_->pr_flits;
        if (sim().trace_enabled())
            sim().trace_event(*this, "pr_pop drop");
        if (f.tail)
            state_ = State::Idle;
        return;
    }

    if (state_ == State::Payload) {
        Channel* ch = channels_[static_cast<std::size_t>(cur_channel_)];
        assert(!head->flit.bit(128)); // wormhole keeps packets contiguous
        if (!ch->slot_can_accept(cur_slot_)) {
            ++stats_->pr_stall_cycles;
            return;
        }
        FlitEnv f = *in_->pop(now);
        ++stats_->pr_flits;
        ++stats_->pr_payload_flits;
        if (sim().trace_enabled())
            sim().trace_event(*this, "pr_pop payload");
        ++flits_per_pr_[static_cast<std::size_t>(cur_pr_)];
        ch->note_flit_inbound(cur_slot_);
        --flits_left_;
        const bool last = flits_left_ == 0;
        const bool task_done = last && task_last_;
        const int slot = cur_slot_;
        const Flit flit = f.flit;
        sim().schedule(now + 2 * period, id(), [ch, slot, flit, last,
                                                task_done, this] {
            ch->commit_payload_flit(sim().now(), slot, flit, last, task_done);
        });
        if (last)
            state_ = State::Idle;
        return;
    }

    // idle: the flit at the head of the router buffer starts a packet
    assert(head->flit.bit(128));
    const HeadFields h = decode_head(head->flit);
    const int ci = h.hwa_id < hwa_to_channel_.size()
                       ? hwa_to_channel_[h.hwa_id]
                       : -1;
    if (ci < 0) {
        // unknown accelerator: count and drop the whole packet
        FlitEnv f = *in_->pop(now);
        ++stats_->pr_flits;
        ++stats_->pr_unknown_hwa;
        if (sim().trace_enabled())
            sim().trace_event(*this, "pr_pop drop");
        if (!f.tail)
            state_ = State::Drop;
        return;
    }
    Channel* ch = channels_[static_cast<std::size_t>(ci)];
    const int pr = owner_of(ci);

    if (h.packet_type == kTypeCommand) {
        if (ch->request_inbox_full(now)) {
            ++stats_->pr_stall_cycles;
            return;
        }
        FlitEnv f = *in_->pop(now);
        (void)f;
        ++stats_->pr_flits;
        ++flits_per_pr_[static_cast<std::size_t>(pr)];
        ++stats_->requests_injected;
        if (sim().trace_enabled())
            sim().trace_event(*this, "pr_pop command");
        if (log_)
            log_->at(command_task_id(h.payload)).req_pr_pop = now;
        ch->deliver_request(now, RequestMsg{h, command_task_id(h.payload)});
        if (sim().trace_enabled())
            sim().trace_event(*this, "pr_request hwa=" +
                                         std::to_string(h.hwa_id));
        return;
    }

    // payload packet for a granted task buffer
    if (!ch->payload_slot_valid(h.task_buffer_id))
        throw ProtocolError("payload for non-granted task buffer " +
                            std::to_string(h.task_buffer_id) + " of hwa " +
                            std::to_string(h.hwa_id));
    if (!ch->slot_can_accept(h.task_buffer_id)) {
        ++stats_->pr_stall_cycles;
        return;
    }
    FlitEnv f = *in_->pop(now);
    ++stats_->pr_flits;
    ++stats_->pr_payload_flits;
    if (sim().trace_enabled())
        sim().trace_event(*this, "pr_pop payload");
    ++flits_per_pr_[static_cast<std::size_t>(pr)];
    ch->note_flit_inbound(h.task_buffer_id);
    if (log_ && h.task_first()) {
        TaskRecord& rec = log_->at(ch->task_of_slot(h.task_buffer_id));
        if (rec.pr_start < 0)
            rec.pr_start = now;
    }
    const int nbody = static_cast<int>(
        (static_cast<std::size_t>(h.data_size) + kBodyBytes - 1) / kBodyBytes);
    const bool task_done0 = nbody == 0 && h.task_last();
    const int slot = h.task_buffer_id;
    const Flit flit = f.flit;
    const bool pkt_done0 = nbody == 0;
    sim().schedule(now + 2 * period, id(),
                   [ch, slot, flit, pkt_done0, task_done0, this] {
                       ch->commit_payload_flit(sim().now(), slot, flit,
                                               pkt_done0, task_done0);
                   });
    if (nbody > 0) {
        state_ = State::Payload;
        cur_channel_ = ci;
        cur_slot_ = slot;
        cur_pr_ = pr;
        flits_left_ = nbody;
        task_last_ = h.task_last();
    }
}

PacketSender::PacketSender(AsyncFifo<FlitEnv>* out,
                           std::vector<Channel*> channels, int group_size,
                           Stats* stats, TaskLog* log,
                           std::uint32_t* packet_seq)
    : out_(out), channels_(std::move(channels)), group_size_(group_size),
      stats_(stats), log_(log), packet_seq_(packet_seq) {
    const int n = static_cast<int>(channels_.size());
    const int gs = group_size_ <= 0 ? n : group_size_;
    ngroups_ = gs > 0 ? (n + gs - 1) / gs : 1;
    if (ngroups_ < 1)
        ngroups_ = 1;
    cmd_rr_.assign(static_cast<std::size_t>(ngroups_), 0);
    res_rr_.assign(static_cast<std::size_t>(ngroups_), {0, 0, 0, 0});
}

bool PacketSender::arbitrate(TimePs now, Selection& sel) {
    const int n = static_cast<int>(channels_.size());
    if (n == 0)
        return false;
    const int gs = group_size_ <= 0 ? n : group_size_;

    auto group_begin = [&](int g) { return g * gs; };
    auto group_count = [&](int g) {
        const int b = group_begin(g);
        return b >= n ? 0 : std::min(gs, n - b);
    };

    // first level: any pending command wins over every result packet
    std::vector<int> cmd_groups;
    for (int g = 0; g < ngroups_; ++g) {
        for (int i = 0; i < group_count(g); ++i)
            if (channels_[static_cast<std::size_t>(group_begin(g) + i)]
                    ->command_queue()
                    .peek(now)) {
                cmd_groups.push_back(g);
                break;
            }
    }
    if (!cmd_groups.empty()) {
        int g = -1;
        for (int step = 1; step <= ngroups_; ++step) {
            const int cand = (lvl2_cmd_rr_ + step) % ngroups_;
            for (int cg : cmd_groups)
                if (cg == cand) {
                    g = cand;
                    break;
                }
            if (g >= 0)
                break;
        }
        const int cnt = group_count(g);
        for (int step = 1; step <= cnt; ++step) {
            const int local = (cmd_rr_[static_cast<std::size_t>(g)] + step) %
                              cnt;
            const int ci = group_begin(g) + local;
            if (channels_[static_cast<std::size_t>(ci)]->command_queue().peek(
                    now)) {
                cmd_rr_[static_cast<std::size_t>(g)] = local;
                lvl2_cmd_rr_ = g;
                sel.is_command = true;
                sel.channel = ci;
                return true;
            }
        }
    }

    // results: highest head-flit priority first, round-robin within a level
    int best_pri = -1;
    for (int ci = 0; ci < n; ++ci)
        if (const ResultOut* r =
                channels_[static_cast<std::size_t>(ci)]->result_queue().peek(
                    now))
            best_pri = std::max(best_pri, static_cast<int>(r->priority));
    if (best_pri < 0)
        return false;

    std::vector<int> res_groups;
    for (int g = 0; g < ngroups_; ++g) {
        for (int i = 0; i < group_count(g); ++i) {
            const ResultOut* r =
                channels_[static_cast<std::size_t>(group_begin(g) + i)]
                    ->result_queue()
                    .peek(now);
            if (r && r->priority == best_pri) {
                res_groups.push_back(g);
                break;
            }
        }
    }
    int g = -1;
    for (int step = 1; step <= ngroups_; ++step) {
        const int cand =
            (lvl2_res_rr_[static_cast<std::size_t>(best_pri)] + step) %
            ngroups_;
        for (int rg : res_groups)
            if (rg == cand) {
                g = cand;
                break;
            }
        if (g >= 0)
            break;
    }
    const int cnt = group_count(g);
    for (int step = 1; step <= cnt; ++step) {
        const int local =
            (res_rr_[static_cast<std::size_t>(g)]
                    [static_cast<std::size_t>(best_pri)] +
             step) %
            cnt;
        const int ci = group_begin(g) + local;
        const ResultOut* r =
            channels_[static_cast<std::size_t>(ci)]->result_queue().peek(now);
        if (r && r->priority == best_pri) {
            res_rr_[static_cast<std::size_t>(g)]
                   [static_cast<std::size_t>(best_pri)] = local;
            lvl2_res_rr_[static_cast<std::size_t>(best_pri)] = g;
            sel.is_command = false;
            sel.channel = ci;
            return true;
        }
    }
    return false;
}

void PacketSender::begin_emission(TimePs now, Packet packet,
                                  std::uint64_t task_id, bool is_command) {
    emitting_ = true;
    flits_ = std::move(packet.flits);
    next_flit_ = 0;
    cur_task_ = task_id;
    cur_is_result_ = !is_command;
    cur_packet_id_ = (*packet_seq_)++;
    // a command costs one cycle end to end; an N-flit result streams out
    // after a 4-cycle setup, finishing 4+N cycles after selection
    next_push_ = now + (is_command ? 1 : 4) * clock().period_ps;
}

void PacketSender::tick(std::int64_t) {
    const TimePs now = sim().now();
    const TimePs period = clock().period_ps;

    if (emitting_) {
        if (cache_pending_)
            return;
        if (cache_ready_ >= 0 && next_push_ < cache_ready_ + period)
            next_push_ = cache_ready_ + period;
        if (now >= next_push_) {
            if (out_->full()) {
                ++stats_->ps_stall_cycles;
                next_push_ = now + period;
                return;
            }
            FlitEnv env = make_env(flits_[next_flit_], cur_packet_id_, now);
            out_->push(now, std::move(env));
            ++stats_->ps_flits;
            if (sim().trace_enabled())
                sim().trace_event(*this, cur_is_result_ ? "ps_push result"
                                                        : "ps_push command");
            if (cur_is_result_)
                ++stats_->ps_result_flits;
            else
                ++stats_->ps_command_flits;
            ++next_flit_;
            if (next_flit_ >= flits_.size()) {
                emitting_ = false;
                cache_ready_ = -1;
                if (cur_is_result_ && log_)
                    log_->at(cur_task_).result_sent = now;
            } else {
                next_push_ = now + period;
                return;
            }
        } else {
            return;
        }
    }

    Selection sel;
    if (!arbitrate(now, sel))
        return;
    Channel* ch = channels_[static_cast<std::size_t>(sel.channel)];
    if (sel.is_command) {
        OutboundCommand cmd = *ch->command_queue().pop(now);
        if (sim().trace_enabled())
            sim().trace_event(*this,
                              "ps_command task=" + std::to_string(cmd.task_id));
        begin_emission(now, std::move(cmd.packet), cmd.task_id, true);
    } else {
        // invariant: no command was pending when a result won arbitration
        for (Channel* c : channels_)
            if (c->command_queue().peek(now)) {
                ++stats_->ps_precedence_violations;
                break;
            }
        ResultOut res = *ch->result_queue().pop(now);
        if (log_) {
            log_->at(res.task_id).ps_selected = now;
        }
        if (sim().trace_enabled())
            sim().trace_event(*this,
                              "ps_result task=" + std::to_string(res.task_id));
        const std::size_t bytes = res.packet.flits.size() > 1
                                      ? (res.packet.flits.size() - 1) *
                                            kBodyBytes
                                      : 0;
        const int hwa = ch->spec().hwa_id;
        begin_emission(now, std::move(res.packet), res.task_id, false);
        if (cache_) {
            cache_pending_ = true;
            cache_ready_ = -1;
            cache_->access(now, false, pob_region(hwa), bytes,
                           [this](TimePs done) {
                               cache_pending_ = false;
                               cache_ready_ = done;
                           });
        }
    }
}

void InterfaceProbe::tick(std::int64_t) {
    bool busy = pr_->active() || ps_->busy();
    double tb = 0, rb = 0, pob = 0, cb = 0;
    for (Channel* c : channels_) {
        busy = busy || c->back_active();
        tb += static_cast<double>(c->tb_occupied());
        rb += static_cast<double>(c->rb_size());
        pob += static_cast<double>(c->pob_size());
        cb += static_cast<double>(c->cb_size());
    }
    ++stats_->sampled_cycles;
    if (busy)
        ++stats_->busy_cycles;
    stats_->tb_occupancy_accum += tb;
    stats_->rb_occupancy_accum += rb;
    stats_->pob_occupancy_accum += pob;
    stats_->cb_occupancy_accum += cb;
}

} // namespace accnoc
