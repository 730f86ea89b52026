#pragma once

#include "config.hpp"
#include "system.hpp"

namespace accnoc::test {

// Single-clock config (everything at 1 GHz, phase 0) so two-stage
// synchronizer slack vanishes and Table-2 style latencies are exact.
inline SimConfig aligned_config(int n_hwas = 1, int n_in = 3, int n_out = 3,
                                std::int64_t exec = 10) {
    SimConfig cfg;
    cfg.seed = 7;
    cfg.duration_ps = 30'000'000;
    cfg.warmup_ps = 0;
    cfg.watchdog_ps = 5'000'000;
    cfg.closed_run = true;
    cfg.noc_period_ps = 1000;
    cfg.proc_period_ps = 1000;
    cfg.iface_period_ps = 1000;
    cfg.mem_period_ps = 1000;
    cfg.bus_period_ps = 1000;
    for (int i = 0; i < n_hwas; ++i) {
        HwaSpec h;
        h.hwa_id = i;
        h.exec_base = exec;
        h.input_flits = n_in;
        h.output_flits = n_out;
        h.clock = ClockDomain{1000, 0};
        cfg.hwas.push_back(h);
    }
    WorkloadSpec wl;
    wl.mode = WorkloadSpec::Mode::Closed;
    wl.jobs = 0;
    wl.hwa_set = {0};
    wl.payload_bytes = n_in * 16 - (n_in == 64 ? 1 : 0);
    cfg.workloads.assign(static_cast<std::size_t>(cfg.processor_count()), wl);
    return cfg;
}

// One processor issues `jobs` single-step tasks to hwa 0; everyone else is
// quiet.
inline void single_proc_jobs(SimConfig& cfg, int jobs, int proc = 0) {
    for (auto& w : cfg.workloads)
        w.jobs = 0;
    cfg.workloads[static_cast<std::size_t>(proc)].jobs = jobs;
}

inline TimePs cycles(const SimConfig& cfg, std::int64_t n) {
    return n * cfg.iface_period_ps;
}

} // namespace accnoc::test
