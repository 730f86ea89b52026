#include "endpoints.hpp"

#include <cassert>
#include <cmath>

namespace accnoc {

namespace {

const HwaSpec* find_hwa(const std::vector<HwaSpec>& hwas, int id) {
    for (const auto& h : hwas)
        if (h.hwa_id == id)
            return &h;
    return nullptr;
}

} // namespace

TimePs sample_interval(std::mt19937_64& rng, bool poisson,
                       double inv_rate_ps) {
    if (!poisson)
        return static_cast<TimePs>(inv_rate_ps);
    const double u =
        (static_cast<double>(rng() >> 11) + 0.5) / 9007199254740992.0;
    return static_cast<TimePs>(-std::log(u) * inv_rate_ps);
}

std::vector<int> hop_sequence(const InvocationStep& step,
                              const std::vector<HwaSpec>& hwas,
                              const std::vector<ChainGroup>& groups) {
    std::vector<int> seq{step.hwa};
    int cur = step.hwa;
    std::uint8_t idx = step.chain_index;
    for (int d = 0; d < step.chain_depth; ++d) {
        const HwaSpec* spec = find_hwa(hwas, cur);
        if (!spec || spec->chain_group < 0 ||
            spec->chain_group >= static_cast<int>(groups.size()))
            throw ConfigError("chained step starts outside a chain group");
        const auto& members =
            groups[static_cast<std::size_t>(spec->chain_group)].members;
        const std::uint8_t entry = idx & 3;
        if (entry >= members.size())
            throw ConfigError("chain index outside group");
        cur = members[entry];
        idx = static_cast<std::uint8_t>(idx >> 2);
        seq.push_back(cur);
    }
    return seq;
}

int final_hwa_of(const InvocationStep& step, const std::vector<HwaSpec>& hwas,
                 const std::vector<ChainGroup>& groups) {
    return hop_sequence(step, hwas, groups).back();
}

Processor::Processor(int source_id, WorkloadSpec workload, EndpointEnv env,
                     ClockDomain noc_clock, ClockDomain proc_clock,
                     std::size_t link_depth)
    : source_id_(source_id), wl_(std::move(workload)), env_(std::move(env)),
      link_(proc_clock, link_depth), rx_(noc_clock, proc_clock, 256),
      arrival_rng_(Simulator::derive_seed(env_.seed,
                                          0x700 + static_cast<std::uint64_t>(
                                                      source_id))),
      data_rng_(Simulator::derive_seed(env_.seed,
                                       0xda7a + static_cast<std::uint64_t>(
                                                    source_id))) {
    if (wl_.rate_per_us > 0)
        inv_rate_ps_ = 1e6 / wl_.rate_per_us;
}

const FlitEnv* Processor::peek_tx(TimePs now) {
    // the router pulls from the link FIFO
    return link_.peek(now);
}

void Processor::pull_tx(TimePs now) { link_.pop(now); }

bool Processor::rx_ready(TimePs) const { return !rx_.full(); }

void Processor::rx_push(TimePs now, FlitEnv flit) {
    rx_.push(now, std::move(flit));
}

bool Processor::done() const {
    if (wl_.mode != WorkloadSpec::Mode::Closed)
        return true;
    return jobs_done_ >= wl_.jobs;
}

std::vector<std::uint8_t> Processor::fresh_payload(std::size_t len) {
    std::vector<std::uint8_t> out(len);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(data_rng_());
    return out;
}

void Processor::issue(TimePs now, const InvocationStep& step,
                      const std::vector<std::uint8_t>* prev_bytes) {
    const std::uint64_t id = (*env_.task_seq)++;
    const std::size_t bytes =
        step.payload_from_prev && prev_bytes
            ? prev_bytes->size()
            : static_cast<std::size_t>(wl_.payload_bytes);

    HeadFields h;
    h.set_dest(env_.addr->fpga_x, env_.addr->fpga_y);
    h.source_id = static_cast<std::uint8_t>(source_id_);
    h.hwa_id = static_cast<std::uint8_t>(step.hwa);
    h.packet_priority = wl_.random_priority
                            ? static_cast<std::uint8_t>(data_rng_() & 3)
                            : wl_.priority;
    h.packet_direction = wl_.direction;
    h.chaining_depth = step.chain_depth;
    h.chaining_index = step.chain_index;
    h.start_address = static_cast<std::uint32_t>(
        (env_.addr_base + id * env_.addr_stride) & 0x7fffffffu);
    h.data_size = static_cast<std::uint16_t>(bytes);
    h.payload = command_payload(kCmdRequest, id);

    TaskRecord& rec = env_.log->create(id);
    rec.source = source_id_;
    rec.hwa = step.hwa;
    rec.priority = h.packet_priority;
    rec.direction = wl_.direction;
    rec.payload_bytes = static_cast<std::uint32_t>(bytes);
    rec.issue = now;

    Outstanding out;
    out.task_id = id;
    out.step = step;
    tasks_[id] = out;
    ++open_outstanding_;
    if (wl_.direction == kDirDirect) {
        await_grant_[step.hwa].push_back(id);
        await_result_[final_hwa_of(step, *env_.hwas, *env_.groups)]
            .push_back(id);
    }

    Packet req = make_command(PacketKind::Command, h);
    TxFlit tf;
    tf.env = make_env(req.flits[0], (*env_.packet_seq)++, now);
    tf.task_id = id;
    tf.is_request = true;
    backlog_.push_back(std::move(tf));
    ++issued_;
    ++env_.stats->requests_issued;
    if (sim().trace_enabled())
        sim().trace_event(*this, "issue task=" + std::to_string(id) +
                                     " hwa=" + std::to_string(step.hwa));
}

void Processor::on_grant(TimePs now, const HeadFields& h) {
    auto& q = await_grant_[h.hwa_id];
    if (q.empty())
        throw ProtocolError("grant with no outstanding request, hwa " +
                            std::to_string(h.hwa_id));
    const std::uint64_t id = q.front();
    q.pop_front();
    if (command_task_id(h.payload) != id)
        throw ProtocolError("grant order mismatch on hwa " +
                            std::to_string(h.hwa_id));
    env_.log->at(id).grant_rx = now;

    const Outstanding& out = tasks_.at(id);
    std::vector<std::uint8_t> payload =
        out.step.payload_from_prev
            ? prev_result_
            : fresh_payload(static_cast<std::size_t>(wl_.payload_bytes));
    inputs_[id] = payload;

    // split into packets_per_task payload packets, task flags on the ends
    const int np = wl_.packets_per_task < 1 ? 1 : wl_.packets_per_task;
    const std::size_t chunk = (payload.size() + static_cast<std::size_t>(np) -
                               1) / static_cast<std::size_t>(np);
    std::size_t off = 0;
    for (int p = 0; p < np; ++p) {
        const std::size_t len = std::min(chunk, payload.size() - off);
        HeadFields ph;
        ph.set_dest(env_.addr->fpga_x, env_.addr->fpga_y);
        ph.source_id = static_cast<std::uint8_t>(source_id_);
        ph.hwa_id = h.hwa_id;
        ph.task_buffer_id = h.task_buffer_id;
        ph.packet_priority = env_.log->at(id).priority;
        ph.packet_direction = wl_.direction;
        ph.chaining_depth = out.step.chain_depth;
        ph.chaining_index = out.step.chain_index;
        ph.start_address = h.start_address;
        ph.task_head_tail = static_cast<std::uint8_t>(
            (p == 0 ? 1 : 0) | (p == np - 1 ? 2 : 0));
        Packet pkt = segment(
            std::span<const std::uint8_t>(payload.data() + off, len), ph);
        const std::uint32_t pid = (*env_.packet_seq)++;
        for (std::size_t i = 0; i < pkt.flits.size(); ++i) {
            TxFlit tf;
            tf.env = make_env(pkt.flits[i], pid, now);
            tf.task_id = id;
            tf.last_payload =
                p == np - 1 && i + 1 == pkt.flits.size();
            backlog_.push_back(std::move(tf));
        }
        off += len;
    }
}

void Processor::on_result(TimePs now, const HeadFields& h,
                          std::vector<std::uint8_t> bytes) {
    auto& q = await_result_[h.hwa_id];
    if (q.empty())
        throw ProtocolError("unexpected result packet from hwa " +
                            std::to_string(h.hwa_id));
    const std::uint64_t id = q.front();
    q.pop_front();
    results_[id] = std::move(bytes);
    tasks_.at(id).result_seen = true;
    maybe_finish(now, id);
}

void Processor::on_notify(TimePs now, const HeadFields& h) {
    const std::uint64_t id = command_task_id(h.payload);
    auto it = tasks_.find(id);
    if (it == tasks_.end())
        throw ProtocolError("notify for unknown task " + std::to_string(id));
    if (it->second.notify_seen)
        throw ProtocolError("duplicate notify for task " + std::to_string(id));
    it->second.notify_seen = true;
    TaskRecord& rec = env_.log->at(id);
    rec.notify_rx = now;
    if (wl_.direction == kDirMemory) {
        // modeled result fetch through the memory node
        const TimePs done = now + env_.fetch_cycles * clock().period_ps;
        const std::uint64_t tid = id;
        sim().schedule(done, this->id(), [this, tid, done] {
            TaskRecord& r = env_.log->at(tid);
            r.complete = done;
            r.completed = true;
            ++env_.stats->completions;
            if (env_.on_complete)
                env_.on_complete(tid);
            maybe_finish(sim().now(), tid);
        });
    } else {
        rec.complete = now;
        rec.completed = true;
        ++env_.stats->completions;
        if (env_.on_complete)
            env_.on_complete(id);
        maybe_finish(now, id);
    }
}

void Processor::maybe_finish(TimePs now, std::uint64_t task_id) {
    auto it = tasks_.find(task_id);
    if (it == tasks_.end())
        return;
    Outstanding& out = it->second;
    const bool data_ready =
        wl_.direction == kDirMemory ? env_.log->at(task_id).completed
                                    : out.result_seen;
    if (!out.notify_seen || !data_ready || out.counted_done)
        return;
    out.counted_done = true;
    --open_outstanding_;
    if (wl_.mode == WorkloadSpec::Mode::Closed) {
        prev_result_ = results_.count(task_id) ? results_[task_id]
                                               : std::vector<std::uint8_t>{};
        step_in_flight_ = false;
        advance_job(now);
    }
}

void Processor::advance_job(TimePs) {
    ++step_idx_;
    const std::size_t steps = wl_.job.empty() ? 1 : wl_.job.size();
    if (step_idx_ >= steps) {
        step_idx_ = 0;
        ++jobs_done_;
        prev_result_.clear();
    }
}

void Processor::handle_packet(TimePs now, const std::vector<Flit>& flits) {
    const HeadFields h = decode_head(flits[0]);
    if (h.packet_type == kTypeCommand) {
        switch (h.payload & 3) {
        case kCmdGrant:
            on_grant(now, h);
            break;
        case kCmdNotify:
            on_notify(now, h);
            break;
        default:
            throw ProtocolError("processor received a request packet");
        }
    } else {
        Packet p;
        p.kind = PacketKind::Result;
        p.flits = flits;
        on_result(now, h, reassemble(p));
    }
}

void Processor::tick(std::int64_t) {
    const TimePs now = sim().now();

    // transmit: one flit per cycle into the router link
    if (!backlog_.empty()) {
        TxFlit& tf = backlog_.front();
        if (link_.push(now, tf.env)) {
            if (tf.is_request)
                ++env_.stats->requests_injected;
            if (tf.last_payload)
                env_.log->at(tf.task_id).payload_sent = now;
            backlog_.pop_front();
        } else {
            ++env_.stats->proc_injection_stalls;
        }
    }

    // receive: one flit per cycle off the ejection queue
    if (auto f = rx_.pop(now)) {
        assembly_.push_back(f->flit);
        if (f->tail) {
            std::vector<Flit> pkt;
            pkt.swap(assembly_);
            handle_packet(now, pkt);
        }
    }

    // workload
    if (wl_.mode == WorkloadSpec::Mode::Open) {
        const bool capped = wl_.max_outstanding > 0 &&
                            open_outstanding_ >= wl_.max_outstanding;
        if (wl_.rate_per_us > 0 && next_arrival_ <= now && !capped) {
            InvocationStep step;
            step.hwa = wl_.hwa_set[arrival_rng_() % wl_.hwa_set.size()];
            issue(now, step, nullptr);
            next_arrival_ +=
                sample_interval(arrival_rng_, wl_.poisson, inv_rate_ps_);
        }
    } else if (jobs_done_ < wl_.jobs && !step_in_flight_) {
        InvocationStep step;
        if (wl_.job.empty()) {
            step.hwa = wl_.hwa_set[arrival_rng_() % wl_.hwa_set.size()];
        } else {
            step = wl_.job[step_idx_];
        }
        step_in_flight_ = true;
        issue(now, step, &prev_result_);
    }
}

std::uint8_t MemoryModel::byte(std::uint64_t addr) const {
    auto it = written_.find(addr);
    if (it != written_.end())
        return it->second;
    std::uint64_t z = (addr ^ seed_) + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<std::uint8_t>(z ^ (z >> 31));
}

std::vector<std::uint8_t> MemoryModel::read(std::uint64_t addr,
                                            std::size_t len) const {
    std::vector<std::uint8_t> out(len);
    for (std::size_t i = 0; i < len; ++i)
        out[i] = byte(addr + i);
    return out;
}

bool MemoryModel::written_all(std::uint64_t addr, std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
        if (!written_.count(addr + i))
            return false;
    return true;
}

void MemoryModel::write(std::uint64_t addr,
                        const std::vector<std::uint8_t>& data) {
    for (std::size_t i = 0; i < data.size(); ++i)
        written_[addr + i] = data[i];
}

MemoryNode::MemoryNode(EndpointEnv env, ClockDomain noc_clock,
                       ClockDomain mem_clock, std::size_t link_depth,
                       std::int64_t init_cycles, std::int64_t beat_cycles)
    : env_(std::move(env)), link_(mem_clock, link_depth),
      rx_(noc_clock, mem_clock, 256), mem_(env_.seed),
      init_cycles_(init_cycles), beat_cycles_(beat_cycles) {}

const FlitEnv* MemoryNode::peek_tx(TimePs now) { return link_.peek(now); }
void MemoryNode::pull_tx(TimePs now) { link_.pop(now); }
bool MemoryNode::rx_ready(TimePs) const { return !rx_.full(); }
void MemoryNode::rx_push(TimePs now, FlitEnv flit) {
    rx_.push(now, std::move(flit));
}

void MemoryNode::handle_packet(TimePs now, const std::vector<Flit>& flits) {
    const HeadFields h = decode_head(flits[0]);
    if (h.packet_type == kTypeCommand) {
        if ((h.payload & 3) != kCmdGrant)
            throw ProtocolError("memory node received a non-grant command");
        Job j;
        j.grant = h;
        j.task_id = command_task_id(h.payload);
        env_.log->at(j.task_id).grant_rx = now;
        jobs_.push_back(j);
        start_job(now);
    } else {
        // result packet: land it in the memory image
        Packet p;
        p.kind = PacketKind::Result;
        p.flits = flits;
        mem_.write(h.start_address, reassemble(p));
    }
}

void MemoryNode::start_job(TimePs now) {
    if (jobs_.empty())
        return;
    // jobs stream strictly in order; a new job begins after the previous
    // one's beats are all scheduled
    const TimePs period = clock().period_ps;
    TimePs start = now;
    if (!beats_.empty())
        start = std::max(start, beats_.back().release);
    while (!jobs_.empty()) {
        Job j = jobs_.front();
        jobs_.pop_front();
        const HeadFields& g = j.grant;
        const auto bytes = mem_.read(g.start_address, g.data_size);
        if (env_.log)
            env_.log->at(j.task_id).payload_bytes =
                static_cast<std::uint32_t>(bytes.size());
        HeadFields ph;
        ph.set_dest(env_.addr->fpga_x, env_.addr->fpga_y);
        ph.source_id = g.source_id;
        ph.hwa_id = g.hwa_id;
        ph.task_buffer_id = g.task_buffer_id;
        ph.packet_priority = g.packet_priority;
        ph.packet_direction = g.packet_direction;
        ph.chaining_depth = g.chaining_depth;
        ph.chaining_index = g.chaining_index;
        ph.start_address = g.start_address;
        ph.task_head_tail = 3;
        Packet pkt = segment(bytes, ph);
        const std::uint32_t pid = (*env_.packet_seq)++;
        const TimePs first = start + init_cycles_ * period;
        for (std::size_t i = 0; i < pkt.flits.size(); ++i) {
            Beat b;
            b.env = make_env(pkt.flits[i], pid, now);
            b.release = first + static_cast<TimePs>(i) * beat_cycles_ * period;
            b.task_id = j.task_id;
            b.last = i + 1 == pkt.flits.size();
            beats_.push_back(std::move(b));
        }
        start = beats_.back().release;
    }
}

void MemoryNode::tick(std::int64_t) {
    const TimePs now = sim().now();

    if (!beats_.empty() && beats_.front().release <= now) {
        Beat& b = beats_.front();
        if (link_.push(now, b.env)) {
            if (b.last)
                env_.log->at(b.task_id).payload_sent = now;
            beats_.pop_front();
        } else {
            ++env_.stats->proc_injection_stalls;
        }
    }

    if (auto f = rx_.pop(now)) {
        assembly_.push_back(f->flit);
        if (f->tail) {
            std::vector<Flit> pkt;
            pkt.swap(assembly_);
            handle_packet(now, pkt);
        }
    }
}

} // namespace accnoc
