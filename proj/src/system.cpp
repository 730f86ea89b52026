#include "system.hpp"

#include <algorithm>
#include <sstream>

namespace accnoc {

SystemModel::SystemModel(const SimConfig& cfg) : cfg_(cfg), sim_(cfg.seed) {
    build();
}

SystemModel::~SystemModel() = default;

void SystemModel::build() {
    const ClockDomain noc_clock{cfg_.noc_period_ps, 0};
    const ClockDomain iface_clock{cfg_.iface_period_ps, 0};
    const ClockDomain proc_clock{cfg_.proc_period_ps, 0};
    const ClockDomain mem_clock{cfg_.mem_period_ps, 0};
    const ClockDomain bus_clock{cfg_.bus_period_ps, 0};
    const ClockDomain xport_clock =
        cfg_.interconnect == Interconnect::Bus ? bus_clock : noc_clock;

    if (cfg_.trace_enabled) {
        sim_.set_trace_enabled(true);
        if (!cfg_.trace_path.empty())
            sim_.trace().open_file(cfg_.trace_path);
    }

    // node placement: processors fill the mesh row-major around the fpga
    // and memory cells
    addr_.fpga_x = cfg_.fpga_x;
    addr_.fpga_y = cfg_.fpga_y;
    addr_.has_memory = cfg_.has_memory;
    addr_.mem_x = cfg_.mem_x;
    addr_.mem_y = cfg_.mem_y;
    for (int y = 0; y < cfg_.mesh_h; ++y)
        for (int x = 0; x < cfg_.mesh_w; ++x) {
            if (x == cfg_.fpga_x && y == cfg_.fpga_y)
                continue;
            if (cfg_.has_memory && x == cfg_.mem_x && y == cfg_.mem_y)
                continue;
            addr_.proc_xy.emplace_back(x, y);
        }

    router_out_ = std::make_unique<AsyncFifo<FlitEnv>>(
        xport_clock, iface_clock,
        static_cast<std::size_t>(cfg_.router_outbuf_flits));
    router_in_ = std::make_unique<AsyncFifo<FlitEnv>>(
        iface_clock, xport_clock,
        static_cast<std::size_t>(cfg_.router_inbuf_flits));
    fpga_port_ = std::make_unique<FpgaPort>(router_in_.get(),
                                            router_out_.get());

    for (const HwaSpec& spec : cfg_.hwas)
        channels_.push_back(std::make_unique<Channel>(
            sim_, spec, cfg_.channel, iface_clock, &stats_, &log_, &addr_));

    // chain groups: every member sees every member's chain buffer
    for (const ChainGroup& g : cfg_.groups) {
        std::vector<Channel*> peers;
        for (int m : g.members)
            for (auto& ch : channels_)
                if (ch->spec().hwa_id == m)
                    peers.push_back(ch.get());
        for (Channel* ch : peers)
            ch->set_chain_peers(peers, g.members);
    }

    std::vector<Channel*> raw;
    for (auto& ch : channels_)
        raw.push_back(ch.get());

    if (cfg_.buffering == FpgaBuffering::SharedCache) {
        cache_ = std::make_unique<SharedCache>(cfg_.cache, &stats_);
        for (Channel* ch : raw)
            ch->set_cache(cache_.get());
    }

    pr_ = std::make_unique<PacketReceiver>(router_out_.get(), raw,
                                           cfg_.pr_channels, &stats_, &log_);
    ps_ = std::make_unique<PacketSender>(router_in_.get(), raw, cfg_.ps_group,
                                         &stats_, &log_, &packet_seq_);
    if (cache_)
        ps_->set_cache(cache_.get());
    probe_ = std::make_unique<InterfaceProbe>(pr_.get(), ps_.get(), raw,
                                              &stats_);

    EndpointEnv env;
    env.addr = &addr_;
    env.stats = &stats_;
    env.log = &log_;
    env.hwas = &cfg_.hwas;
    env.groups = &cfg_.groups;
    env.task_seq = &task_seq_;
    env.packet_seq = &packet_seq_;
    env.seed = cfg_.seed;
    env.addr_stride = cfg_.addr_stride;
    env.addr_base = cfg_.addr_base;
    env.fetch_cycles = cfg_.mem_fetch_cycles;
    env.on_complete = [this](std::uint64_t) {
        if (cfg_.closed_run && stats_.completions >= expected_completions_ &&
            expected_completions_ > 0 && quiet())
            sim_.request_stop();
    };

    const int nproc = cfg_.processor_count();
    expected_completions_ = 0;
    for (int p = 0; p < nproc; ++p) {
        const WorkloadSpec wl =
            cfg_.workloads.empty()
                ? WorkloadSpec{}
                : cfg_.workloads[static_cast<std::size_t>(p) %
                                 cfg_.workloads.size()];
        procs_.push_back(std::make_unique<Processor>(
            p, wl, env, xport_clock, proc_clock,
            static_cast<std::size_t>(cfg_.link_depth)));
        if (wl.mode == WorkloadSpec::Mode::Closed)
            expected_completions_ +=
                static_cast<std::uint64_t>(wl.jobs) *
                (wl.job.empty() ? 1 : wl.job.size());
    }
    if (cfg_.has_memory)
        mmu_ = std::make_unique<MemoryNode>(
            env, xport_clock, mem_clock,
            static_cast<std::size_t>(cfg_.link_depth), cfg_.mem_init_cycles,
            cfg_.mem_beat_cycles);

    // registration order fixes event tie-breaking: receiver commits land
    // first, accelerator halves settle completions, then the grant logic
    // reads the updated status on the same edge
    sim_.add_component(pr_.get(), "pr", iface_clock);
    for (std::size_t i = 0; i < channels_.size(); ++i)
        sim_.add_component(&channels_[i]->back(),
                           "ch" + std::to_string(i) + "_back",
                           channels_[i]->spec().clock);
    for (std::size_t i = 0; i < channels_.size(); ++i)
        sim_.add_component(&channels_[i]->front(),
                           "ch" + std::to_string(i) + "_front", iface_clock);
    sim_.add_component(ps_.get(), "ps", iface_clock);
    sim_.add_component(probe_.get(), "probe", iface_clock);
    if (cache_)
        sim_.add_component(cache_.get(), "cache", iface_clock);

    if (cfg_.interconnect == Interconnect::Noc) {
        mesh_ = std::make_unique<Mesh>(
            cfg_.mesh_w, cfg_.mesh_h, cfg_.router_pipeline,
            static_cast<std::size_t>(cfg_.voq_depth), &counters_);
        mesh_->attach(cfg_.fpga_x, cfg_.fpga_y,
                      NodeId{cfg_.fpga_x, cfg_.fpga_y, NodeKind::Fpga},
                      fpga_port_.get());
        for (std::size_t p = 0; p < procs_.size(); ++p)
            mesh_->attach(addr_.proc_xy[p].first, addr_.proc_xy[p].second,
                          NodeId{addr_.proc_xy[p].first,
                                 addr_.proc_xy[p].second, NodeKind::Processor},
                          procs_[p].get());
        if (mmu_)
            mesh_->attach(cfg_.mem_x, cfg_.mem_y,
                          NodeId{cfg_.mem_x, cfg_.mem_y, NodeKind::Memory},
                          mmu_.get());
        mesh_->register_components(sim_, noc_clock);
    } else {
        bus_ = std::make_unique<SharedBus>(cfg_.bus_txn_overhead, &counters_,
                                           &stats_);
        bus_->attach(cfg_.fpga_x, cfg_.fpga_y, fpga_port_.get());
        for (std::size_t p = 0; p < procs_.size(); ++p)
            bus_->attach(addr_.proc_xy[p].first, addr_.proc_xy[p].second,
                         procs_[p].get());
        if (mmu_)
            bus_->attach(cfg_.mem_x, cfg_.mem_y, mmu_.get());
        sim_.add_component(bus_.get(), "bus", bus_clock);
    }

    for (std::size_t p = 0; p < procs_.size(); ++p)
        sim_.add_component(procs_[p].get(), "proc" + std::to_string(p),
                           proc_clock);
    if (mmu_)
        sim_.add_component(mmu_.get(), "mmu", mem_clock);
}

bool SystemModel::quiet() const {
    for (const auto& p : procs_)
        if (!p->done())
            return false;
    if (stats_.completions < expected_completions_)
        return false;
    if (counters_.injected != counters_.ejected)
        return false;
    if (!router_out_->empty() || !router_in_->empty())
        return false;
    if (mesh_ && mesh_->queued_flits() != 0)
        return false;
    for (const auto& ch : channels_)
        if (ch->back_active() || ch->pob_size() || ch->cb_size() ||
            ch->rb_size())
            return false;
    if (pr_->active() || ps_->busy())
        return false;
    return true;
}

std::uint64_t SystemModel::progress_marker() const {
    return counters_.progress + stats_.pr_flits + stats_.ps_flits +
           stats_.completions + stats_.grants + stats_.tasks_started +
           stats_.chain_hops;
}

RunOutput SystemModel::run() {
    RunOutput out;

    sim_.schedule(cfg_.warmup_ps, -1, [this] {
        warm_stats_ = stats_;
        warm_counters_ = counters_;
    });

    const TimePs horizon = cfg_.duration_ps;
    const TimePs wd = cfg_.watchdog_ps;
    TimePs slice = wd > 0 ? wd : horizon;
    if (cfg_.closed_run)
        slice = std::min<TimePs>(slice, 1'000'000); // poll quiescence per us
    try {
        std::uint64_t last_marker = ~0ull;
        TimePs last_wd_check = 0;
        TimePs t = 0;
        while (t < horizon && !sim_.stopped()) {
            t = std::min<TimePs>(t + slice, horizon);
            sim_.run_until(t);
            if (cfg_.closed_run && expected_completions_ > 0 &&
                stats_.completions >= expected_completions_ && quiet())
                break;
            if (wd > 0 && t - last_wd_check >= wd && t < horizon) {
                // watchdog: abort when nothing moved while work is pending
                const std::uint64_t m = progress_marker();
                const bool pending =
                    stats_.completions < stats_.requests_issued || !quiet();
                if (m == last_marker && pending) {
                    std::ostringstream os;
                    os << "watchdog: no progress by t=" << t << " ps;";
                    os << " requests=" << stats_.requests_issued
                       << " grants=" << stats_.grants
                       << " completions=" << stats_.completions;
                    if (mesh_)
                        os << " noc_queued=" << mesh_->queued_flits();
                    os << " router_out=" << router_out_->size()
                       << " router_in=" << router_in_->size();
                    for (std::size_t i = 0; i < channels_.size(); ++i)
                        os << " ch" << i << "{rb=" << channels_[i]->rb_size()
                           << ",tb=" << channels_[i]->tb_occupied()
                           << ",pob=" << channels_[i]->pob_size()
                           << ",cb=" << channels_[i]->cb_size()
                           << ",busy=" << channels_[i]->back_active() << "}";
                    throw SimError(os.str());
                }
                last_marker = m;
                last_wd_check = t;
            }
        }
        if (cfg_.closed_run &&
            stats_.completions < expected_completions_)
            throw SimError("closed run incomplete: " +
                           std::to_string(stats_.completions) + " of " +
                           std::to_string(expected_completions_) +
                           " completions by the duration limit");
    } catch (const SimError& e) {
        out.error = e.what();
    }

    finalize(out);
    return out;
}

void SystemModel::check_data(RunOutput& out) {
    std::uint64_t errors = 0;
    for (const TaskRecord& rec : log_.records()) {
        if (!rec.completed || rec.hops.empty())
            continue;
        TaskRecord& mut = log_.at(rec.task_id);
        // recompute the expected synthetic result along the hop sequence
        std::vector<std::uint8_t> bytes;
        if (rec.direction == kDirMemory) {
            if (!mmu_)
                continue;
            const std::uint32_t addr =
                static_cast<std::uint32_t>((cfg_.addr_base +
                                            rec.task_id * cfg_.addr_stride) &
                                           0x7fffffffu);
            bytes = mmu_->memory().read(addr, rec.payload_bytes);
        } else {
            const auto& inputs =
                procs_[static_cast<std::size_t>(rec.source)]->input_bytes();
            auto it = inputs.find(rec.task_id);
            if (it == inputs.end())
                continue;
            bytes = it->second;
        }
        for (const HopRecord& hop : rec.hops) {
            const HwaSpec* spec = nullptr;
            for (const auto& h : cfg_.hwas)
                if (h.hwa_id == hop.hwa_id)
                    spec = &h;
            if (!spec)
                break;
            bytes = synth_result(hop.hwa_id, bytes, spec->result_bytes());
        }
        std::vector<std::uint8_t> got;
        if (rec.direction == kDirMemory) {
            const std::uint32_t addr =
                static_cast<std::uint32_t>((cfg_.addr_base +
                                            rec.task_id * cfg_.addr_stride) &
                                           0x7fffffffu);
            // a timed run may end with result flits still in flight; only
            // fully landed results are verifiable
            if (!mmu_->memory().written_all(addr + 1024, bytes.size()))
                continue;
            got = mmu_->memory().read(addr + 1024, bytes.size());
        } else {
            const auto& results =
                procs_[static_cast<std::size_t>(rec.source)]->result_bytes();
            auto it = results.find(rec.task_id);
            if (it == results.end())
                continue;
            got = it->second;
        }
        mut.data_ok = got == bytes;
        if (!mut.data_ok)
            ++errors;
    }
    if (errors > 0 && out.error.empty())
        out.error = std::to_string(errors) + " tasks failed the data check";
}

void SystemModel::finalize(RunOutput& out) {
    if (finalized_)
        return;
    finalized_ = true;

    check_data(out);

    RunMetrics& m = out.metrics;
    m.seed = cfg_.seed;
    m.duration_ps = cfg_.duration_ps;
    m.warmup_ps = cfg_.warmup_ps;
    m.finished_ps = sim_.now();
    m.totals = stats_;
    m.noc_flits_injected = counters_.injected;
    m.noc_flits_ejected = counters_.ejected;
    m.trace_hash = sim_.trace().hash();
    m.trace_events = sim_.trace().events();

    const TimePs end = sim_.now();
    const TimePs span = end > cfg_.warmup_ps ? end - cfg_.warmup_ps : end;
    const Stats& base = end > cfg_.warmup_ps ? warm_stats_ : Stats{};
    const double us = static_cast<double>(span) / 1e6;
    if (us > 0) {
        m.injection_rate_flits_us =
            static_cast<double>(stats_.pr_flits - base.pr_flits) / us;
        m.payload_injection_rate_flits_us =
            static_cast<double>(stats_.pr_payload_flits -
                                base.pr_payload_flits) /
            us;
        m.throughput_flits_us =
            static_cast<double>(stats_.ps_flits - base.ps_flits) / us;
        m.result_throughput_flits_us =
            static_cast<double>(stats_.ps_result_flits -
                                base.ps_result_flits) /
            us;
        m.request_rate_us =
            static_cast<double>(stats_.requests_issued -
                                base.requests_issued) /
            us;
    }
    const std::uint64_t cycles = stats_.sampled_cycles - base.sampled_cycles;
    if (cycles > 0) {
        m.fpga_busy_fraction =
            static_cast<double>(stats_.busy_cycles - base.busy_cycles) /
            static_cast<double>(cycles);
        m.mean_tb_occupancy =
            (stats_.tb_occupancy_accum - base.tb_occupancy_accum) /
            static_cast<double>(cycles);
        m.mean_rb_occupancy =
            (stats_.rb_occupancy_accum - base.rb_occupancy_accum) /
            static_cast<double>(cycles);
        m.mean_pob_occupancy =
            (stats_.pob_occupancy_accum - base.pob_occupancy_accum) /
            static_cast<double>(cycles);
        m.mean_cb_occupancy =
            (stats_.cb_occupancy_accum - base.cb_occupancy_accum) /
            static_cast<double>(cycles);
    }

    double lat_sum = 0;
    std::uint64_t lat_n = 0;
    for (const TaskRecord& r : log_.records()) {
        if (r.completed && r.issue >= 0) {
            lat_sum += static_cast<double>(r.complete - r.issue);
            ++lat_n;
        }
    }
    if (lat_n > 0)
        m.mean_latency_ns = lat_sum / static_cast<double>(lat_n) / 1000.0;

    out.task_csv = log_.csv();
}

RunOutput run_simulation(const SimConfig& cfg) {
    SystemModel model(cfg);
    return model.run();
}

} // namespace accnoc
