#include "channel.hpp"

#include <cassert>

#include "shared_cache.hpp"

namespace accnoc {

std::vector<std::uint8_t> synth_result(int hwa_id,
                                       const std::vector<std::uint8_t>& input,
                                       std::size_t out_len) {
    // FNV-1a over (hwa_id, input) seeds an xorshift stream; the checker
    // recomputes this so any transport corruption is visible end to end.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint8_t b) { h = (h ^ b) * 1099511628211ull; };
    mix(static_cast<std::uint8_t>(hwa_id));
    for (std::uint8_t b : input)
        mix(b);
    std::uint64_t x = h | 1;
    std::vector<std::uint8_t> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        out[i] = static_cast<std::uint8_t>(x);
    }
    return out;
}

void ChannelFront::tick(std::int64_t) { ch_.front_tick(sim().now()); }
void ChannelBack::tick(std::int64_t) { ch_.back_tick(sim().now()); }

Channel::Channel(Simulator& sim, HwaSpec spec, ChannelParams params,
                 ClockDomain iface_clock, Stats* stats, TaskLog* log,
                 const AddressMap* addr)
    : sim_(sim), spec_(spec), params_(params), iface_clock_(iface_clock),
      stats_(stats), log_(log), addr_(addr), front_(*this), back_(*this),
      inbox_(iface_clock, 1),
      rb_(iface_clock, iface_clock, static_cast<std::size_t>(params.rb_depth)),
      lgb_(iface_clock, iface_clock,
           static_cast<std::size_t>(params.lgb_depth)),
      slots_(static_cast<std::size_t>(params.num_tb)),
      pob_(spec.clock, iface_clock,
           static_cast<std::size_t>(params.pob_depth)) {}

void Channel::set_chain_peers(std::vector<Channel*> peers,
                              std::vector<int> member_ids) {
    chain_peers_ = std::move(peers);
    chain_member_ids_ = std::move(member_ids);
}

bool Channel::request_inbox_full(TimePs) const { return inbox_.full(); }

void Channel::deliver_request(TimePs now, RequestMsg msg) {
    const bool ok = inbox_.push(now, std::move(msg));
    assert(ok);
    (void)ok;
}

bool Channel::payload_slot_valid(int slot) const {
    if (slot < 0 || slot >= params_.num_tb)
        return false;
    return slots_[static_cast<std::size_t>(slot)].st != TbSlot::St::Free;
}

bool Channel::slot_can_accept(int slot) const {
    const TbSlot& s = slots_[static_cast<std::size_t>(slot)];
    return s.inbound < params_.tb_flit_cap;
}

void Channel::note_flit_inbound(int slot) {
    ++slots_[static_cast<std::size_t>(slot)].inbound;
}

std::size_t Channel::tb_occupied() const {
    std::size_t n = 0;
    for (const auto& s : slots_)
        if (s.st != TbSlot::St::Free)
            ++n;
    return n;
}

std::size_t Channel::tb_ready_or_full() const {
    std::size_t n = 0;
    for (const auto& s : slots_)
        if (s.st == TbSlot::St::Ready || s.st == TbSlot::St::Taken)
            ++n;
    return n;
}

int Channel::find_free_slot(TimePs now) const {
    for (int i = 0; i < params_.num_tb; ++i) {
        const TbSlot& s = slots_[static_cast<std::size_t>(i)];
        if (s.st == TbSlot::St::Free && now >= s.free_visible)
            return i;
    }
    return -1;
}

void Channel::commit_payload_flit(TimePs now, int slot_idx, Flit f,
                                  bool packet_done, bool task_done) {
    TbSlot& s = slots_[static_cast<std::size_t>(slot_idx)];
    assert(s.st == TbSlot::St::Granted);
    s.flits.push_back(f);
    if (!f.bit(128)) { // body flit
        ++s.committed_payload;
        ++flits_in_;
        if (stats_)
            ++stats_->tb_flits_in;
    }
    (void)packet_done;
    if (!task_done)
        return;

    s.task_complete = true;
    if (log_) {
        TaskRecord& rec = log_->at(s.task_id);
        rec.tb_ready = now;
        rec.n_in = s.committed_payload;
    }
    if (cache_) {
        // shared-buffering baseline: the payload lands in the cache, and
        // the task is ready only once the writes drain
        const std::size_t bytes =
            static_cast<std::size_t>(s.committed_payload) * kBodyBytes;
        cache_->access(now, true, tb_region(spec_.hwa_id, slot_idx), bytes,
                       [this, slot_idx](TimePs done) {
                           TbSlot& sl =
                               slots_[static_cast<std::size_t>(slot_idx)];
                           sl.st = TbSlot::St::Ready;
                           sl.ready_visible =
                               visible_in(iface_clock_, spec_.clock, done);
                       });
    } else {
        s.st = TbSlot::St::Ready;
        s.ready_visible = visible_in(iface_clock_, spec_.clock, now);
    }
}

void Channel::grant(TimePs now, const RequestMsg& req, int slot_idx,
                    bool bypass) {
    TbSlot& s = slots_[static_cast<std::size_t>(slot_idx)];
    s.st = TbSlot::St::Granted;
    s.task_id = req.task_id;
    s.flits.clear();
    s.inbound = 0;
    s.committed_payload = 0;
    s.task_complete = false;

    HeadFields h = req.header;
    h.task_buffer_id = static_cast<std::uint8_t>(slot_idx);
    h.payload = command_payload(kCmdGrant, req.task_id);
    if (h.packet_direction == kDirMemory && addr_->has_memory)
        h.set_dest(addr_->mem_x, addr_->mem_y);
    else
        h.set_dest(addr_->proc_xy[h.source_id].first,
                   addr_->proc_xy[h.source_id].second);
    OutboundCommand cmd{make_command(PacketKind::Grant, h), req.task_id};

    if (stats_)
        ++stats_->grants;
    if (sim_.trace_enabled())
        sim_.trace_event(front_, "grant task=" + std::to_string(req.task_id) +
                                     " tb=" + std::to_string(slot_idx) +
                                     (bypass ? " bypass" : ""));
    if (bypass) {
        // a lone request skips the request buffer and is granted the same
        // cycle it arrives
        const bool ok = lgb_.push(now, std::move(cmd), 0);
        assert(ok);
        (void)ok;
        if (log_)
            log_->at(req.task_id).grant_emitted = now;
    } else {
        lgb_staging_.emplace_back(now + iface_clock_.period_ps,
                                  std::move(cmd));
    }
}

void Channel::front_tick(TimePs now) {
    // release staged grants (grant-controller output register)
    while (!lgb_staging_.empty() && lgb_staging_.front().first <= now) {
        if (lgb_.full())
            break;
        auto& [t, cmd] = lgb_staging_.front();
        if (log_)
            log_->at(cmd.task_id).grant_emitted = now;
        lgb_.push(now, std::move(cmd), 0);
        lgb_staging_.pop_front();
    }

    const bool lgb_room =
        lgb_.size() + lgb_staging_.size() < static_cast<std::size_t>(
                                                params_.lgb_depth);

    // oldest queued request first (first come, first served)
    bool granted_this_cycle = false;
    if (lgb_room) {
        if (const RequestMsg* head = rb_.peek(now)) {
            const int slot = find_free_slot(now);
            if (slot >= 0) {
                RequestMsg req = *head;
                rb_.pop(now);
                grant(now, req, slot, false);
                granted_this_cycle = true;
            }
        }
    }

    // incoming request: bypass straight to a grant when nothing is queued
    if (const RequestMsg* in = inbox_.peek(now)) {
        if (log_ && log_->at(in->task_id).req_delivered < 0)
            log_->at(in->task_id).req_delivered = now;
        if (rb_.empty() && lgb_staging_.empty() && !granted_this_cycle &&
            lgb_room) {
            const int slot = find_free_slot(now);
            if (slot >= 0) {
                RequestMsg req = *in;
                inbox_.pop(now);
                grant(now, req, slot, true);
                return;
            }
        }
        if (!rb_.full()) {
            RequestMsg req = *in;
            inbox_.pop(now);
            rb_.push(now, std::move(req), 0);
        }
        // else: leave it in the inbox; the receiver stalls upstream
    }
}

void Channel::start_task(TimePs now, TaskWork work, int src_slot, int src_peer,
                         bool from_chain, TimePs ready_at) {
    current_ = std::move(work);
    current_src_slot_ = src_slot;
    current_src_peer_ = src_peer;
    current_from_chain_ = from_chain;
    phase_ = Phase::Reading;
    // one arbiter cycle plus the 4+N input transfer; in cache mode the
    // transfer itself goes through the shared port after a 4-cycle setup
    phase_end_ = now + (cache_ ? 5 : 5 + current_.n_flits) *
                           spec_.clock.period_ps;
    cache_pending_ = false;
    cache_wait_until_ = -1;

    cur_probe_ = StageProbe{};
    cur_probe_.ready = ready_at;
    cur_probe_.selected = now;
    cur_probe_.n_in = current_.n_flits;
    cur_probe_.src_slot = src_slot;
    cur_probe_.from_chain = from_chain;

    if (log_) {
        TaskRecord& rec = log_->at(current_.task_id);
        rec.hops.push_back(HopRecord{});
        HopRecord& hop = rec.hops.back();
        hop.hwa_id = spec_.hwa_id;
        hop.n_in = current_.n_flits;
        hop.selected = now;
    }
    if (stats_) {
        if (from_chain)
            ++stats_->chain_hops;
        else
            ++stats_->tasks_started;
    }
    if (sim_.trace_enabled())
        sim_.trace_event(back_, std::string(from_chain ? "chain_start"
                                                       : "task_start") +
                                    " task=" +
                                    std::to_string(current_.task_id));
}

void Channel::back_tick(TimePs now) {
    switch (phase_) {
    case Phase::Idle: {
        // chaining controller first: chain reads outrank new input tasks
        const std::size_t npeers = chain_peers_.size();
        for (std::size_t i = 0; i < npeers; ++i) {
            const std::size_t pi =
                (static_cast<std::size_t>(cc_rr_) + 1 + i) % npeers;
            Channel* peer = chain_peers_[pi];
            if (peer->cb_.empty())
                continue;
            ChainEntry& e = peer->cb_.front();
            if (e.claimed)
                continue;
            if (visible_in(peer->spec_.clock, spec_.clock, e.committed) > now)
                continue;
            if (e.target_index >= chain_member_ids_.size())
                throw ProtocolError(
                    "NoSuchMember: chain index " +
                    std::to_string(e.target_index) + " outside group of " +
                    std::to_string(chain_member_ids_.size()));
            if (chain_member_ids_[e.target_index] != spec_.hwa_id)
                continue;
            e.claimed = true;
            cc_rr_ = static_cast<int>(pi);
            start_task(now, e.work, -1, static_cast<int>(pi), true,
                       visible_in(peer->spec_.clock, spec_.clock,
                                  e.committed));
            return;
        }
        // task arbiter: round-robin over ready task buffers
        const int n = params_.num_tb;
        for (int i = 0; i < n; ++i) {
            const int si = (ta_rr_ + 1 + i) % n;
            TbSlot& s = slots_[static_cast<std::size_t>(si)];
            if (s.st != TbSlot::St::Ready || now < s.ready_visible)
                continue;
            ta_rr_ = si;
            s.st = TbSlot::St::Taken;
            // materialize the task from the committed flits
            TaskWork w;
            w.task_id = s.task_id;
            w.n_flits = s.committed_payload;
            std::size_t f = 0;
            bool first = true;
            while (f < s.flits.size()) {
                Packet p;
                p.kind = PacketKind::Payload;
                do {
                    p.flits.push_back(s.flits[f]);
                } while (!s.flits[f++].bit(129)); // until tail flag
                if (first) {
                    w.header = p.head();
                    first = false;
                }
                auto bytes = reassemble(p);
                w.bytes.insert(w.bytes.end(), bytes.begin(), bytes.end());
            }
            start_task(now, std::move(w), si, -1, false, s.ready_visible);
            return;
        }
        break;
    }
    case Phase::Reading: {
        if (cache_ && now >= phase_end_ && !cache_pending_ &&
            cache_wait_until_ < 0) {
            // setup done; fetch the task data through the shared cache
            cache_pending_ = true;
            const std::uint64_t addr =
                current_from_chain_
                    ? cb_region(chain_peers_[static_cast<std::size_t>(
                                                 current_src_peer_)]
                                    ->spec_.hwa_id)
                    : tb_region(spec_.hwa_id, current_src_slot_);
            cache_->access(now, false, addr, current_.bytes.size(),
                           [this](TimePs done) {
                               cache_pending_ = false;
                               cache_wait_until_ = done;
                           });
            return;
        }
        if (now < phase_end_ || cache_pending_)
            return;
        if (cache_ && now < cache_wait_until_)
            return;
        // input transfer complete; release the source
        if (current_from_chain_) {
            Channel* peer =
                chain_peers_[static_cast<std::size_t>(current_src_peer_)];
            assert(!peer->cb_.empty() && peer->cb_.front().claimed);
            peer->cb_.pop_front();
        } else {
            flits_consumed_ += static_cast<std::uint64_t>(current_.n_flits);
            if (stats_)
                stats_->tb_flits_consumed +=
                    static_cast<std::uint64_t>(current_.n_flits);
        }
        cur_probe_.read_done = now;
        if (log_ && !log_->at(current_.task_id).hops.empty())
            log_->at(current_.task_id).hops.back().read_done = now;
        phase_ = Phase::Executing;
        phase_end_ = now + spec_.exec_cycles(current_.n_flits) *
                               spec_.clock.period_ps;
        break;
    }
    case Phase::Executing: {
        if (now < phase_end_)
            return;
        result_bytes_ =
            synth_result(spec_.hwa_id, current_.bytes, spec_.result_bytes());
        if (stats_)
            stats_->result_flits_produced +=
                static_cast<std::uint64_t>(spec_.output_flits);
        cur_probe_.exec_done = now;
        if (log_ && !log_->at(current_.task_id).hops.empty())
            log_->at(current_.task_id).hops.back().exec_done = now;
        phase_ = Phase::Generating;
        const int span = cache_ ? 4 : 4 + spec_.output_flits;
        phase_end_ = now + span * spec_.clock.period_ps;
        cache_wait_until_ = -1;
        break;
    }
    case Phase::Generating: {
        if (cache_ && now >= phase_end_ && !cache_pending_ &&
            cache_wait_until_ < 0) {
            cache_pending_ = true;
            const bool chained = current_.header.chaining_depth > 0;
            const std::uint64_t addr =
                chained ? cb_region(spec_.hwa_id) : pob_region(spec_.hwa_id);
            cache_->access(now, true, addr, result_bytes_.size(),
                           [this](TimePs done) {
                               cache_pending_ = false;
                               cache_wait_until_ = done;
                           });
            return;
        }
        if (now < phase_end_ || cache_pending_)
            return;
        if (cache_ && now < cache_wait_until_)
            return;
        finish_generate(now);
        break;
    }
    case Phase::CommitWait:
        if (stats_)
            ++stats_->pg_stall_cycles;
        finish_generate(now);
        break;
    }
}

Packet Channel::build_result_packet(const TaskWork& task) const {
    HeadFields h;
    h.source_id = task.header.source_id;
    h.hwa_id = static_cast<std::uint8_t>(spec_.hwa_id);
    h.packet_priority = task.header.packet_priority;
    h.packet_direction = task.header.packet_direction;
    h.task_head_tail = 3;
    if (task.header.packet_direction == kDirMemory && addr_->has_memory) {
        h.set_dest(addr_->mem_x, addr_->mem_y);
        h.start_address = task.header.start_address + 1024; // result region
    } else {
        h.set_dest(addr_->proc_xy[task.header.source_id].first,
                   addr_->proc_xy[task.header.source_id].second);
    }
    return segment(result_bytes_, h, PacketKind::Result);
}

void Channel::emit_notify(TimePs now, const TaskWork& task) {
    HeadFields h;
    h.source_id = task.header.source_id;
    h.hwa_id = static_cast<std::uint8_t>(spec_.hwa_id);
    h.packet_direction = task.header.packet_direction;
    h.set_dest(addr_->proc_xy[task.header.source_id].first,
               addr_->proc_xy[task.header.source_id].second);
    if (task.header.packet_direction == kDirMemory)
        h.start_address = task.header.start_address + 1024;
    h.payload = command_payload(kCmdNotify, task.task_id);
    lgb_.push(now, OutboundCommand{make_command(PacketKind::Notify, h),
                                   task.task_id},
              0);
    if (stats_)
        ++stats_->notifies;
}

void Channel::finish_generate(TimePs now) {
    const std::uint8_t depth = current_.header.chaining_depth;
    if (depth > 0) {
        if (cb_.size() >= static_cast<std::size_t>(params_.cb_depth)) {
            phase_ = Phase::CommitWait;
            return;
        }
        const std::uint8_t target = current_.header.chain_entry(0);
        TaskWork next;
        next.task_id = current_.task_id;
        next.header = current_.header;
        next.header.chaining_depth = static_cast<std::uint8_t>(depth - 1);
        next.header.chaining_index = current_.header.chain_index_shifted();
        next.header.data_size =
            static_cast<std::uint16_t>(result_bytes_.size());
        next.bytes = result_bytes_;
        next.n_flits = spec_.output_flits;
        cb_.push_back(ChainEntry{std::move(next), target, now, false});
        if (stats_)
            stats_->result_flits_to_chain +=
                static_cast<std::uint64_t>(spec_.output_flits);
        if (sim_.trace_enabled())
            sim_.trace_event(back_, "chain_emit task=" +
                                        std::to_string(current_.task_id));
    } else {
        if (pob_.full()) {
            phase_ = Phase::CommitWait;
            return;
        }
        ResultOut out;
        out.packet = build_result_packet(current_);
        out.task_id = current_.task_id;
        out.priority = current_.header.packet_priority;
        out.committed = now;
        pob_.push(now, std::move(out), spec_.output_flits);
        if (stats_)
            stats_->result_flits_to_pob +=
                static_cast<std::uint64_t>(spec_.output_flits);
        emit_notify(now, current_);
        if (log_)
            log_->at(current_.task_id).n_out = spec_.output_flits;
    }

    cur_probe_.emitted = now;
    cur_probe_.n_out = spec_.output_flits;
    probes_.push_back(cur_probe_);
    if (log_ && !log_->at(current_.task_id).hops.empty()) {
        HopRecord& hop = log_->at(current_.task_id).hops.back();
        hop.emitted = now;
        hop.n_out = spec_.output_flits;
        hop.chained_out = depth > 0;
    }

    // the task has left this channel; its task buffer frees now
    if (current_src_slot_ >= 0) {
        TbSlot& s = slots_[static_cast<std::size_t>(current_src_slot_)];
        s.st = TbSlot::St::Free;
        s.free_visible = visible_in(spec_.clock, iface_clock_, now);
        s.flits.clear();
        s.flits.shrink_to_fit();
        s.inbound = 0;
        s.committed_payload = 0;
    }
    phase_ = Phase::Idle;
    current_src_slot_ = -1;
    current_src_peer_ = -1;
    result_bytes_.clear();
}

} // namespace accnoc
