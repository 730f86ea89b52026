#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace accnoc {

// One accelerator pass of a task; chained tasks collect one per hop.
struct HopRecord {
    int hwa_id = -1;
    int n_in = 0;
    int n_out = 0;
    TimePs selected = -1;   // arbiter handed the task to the controller
    TimePs read_done = -1;  // input transfer finished
    TimePs exec_done = -1;
    TimePs emitted = -1;    // results committed to output or chain buffer
    bool chained_out = false;
};

// Full per-task timeline; segment boundaries are consecutive so the end to
// end latency decomposes with zero residual.
struct TaskRecord {
    std::uint64_t task_id = 0;
    int source = -1;
    int hwa = -1;
    std::uint8_t priority = 0;
    std::uint8_t direction = 0;
    int n_in = 0;
    int n_out = 0;
    std::uint32_t payload_bytes = 0;

    TimePs issue = -1;
    TimePs req_pr_pop = -1;     // receiver popped the request flit
    TimePs req_delivered = -1;  // request reached the channel
    TimePs pr_start = -1;       // receiver popped the first payload head
    TimePs grant_emitted = -1;  // grant committed toward the sender
    TimePs grant_rx = -1;       // processor or memory node saw the grant
    TimePs payload_sent = -1;   // last payload flit left the sender
    TimePs tb_ready = -1;       // last payload flit committed to the buffer
    TimePs ps_selected = -1;    // result packet won sender arbitration
    TimePs result_sent = -1;    // last result flit into the router buffer
    TimePs notify_rx = -1;
    TimePs complete = -1;       // notify plus any modeled result fetch

    std::vector<HopRecord> hops;
    bool completed = false;
    bool data_ok = false; // synthetic result hash matched at the checker
};

// Flat counters the components bump; rates derive from warmup snapshots.
struct Stats {
    std::uint64_t requests_issued = 0;
    std::uint64_t requests_injected = 0;
    std::uint64_t grants = 0;
    std::uint64_t tasks_started = 0; // accelerator invocations from task buffers
    std::uint64_t chain_hops = 0;
    std::uint64_t notifies = 0;
    std::uint64_t completions = 0;

    std::uint64_t pr_flits = 0;         // everything popped from the router buffer
    std::uint64_t pr_payload_flits = 0; // flits of payload packets only
    std::uint64_t pr_unknown_hwa = 0;
    std::uint64_t pr_stall_cycles = 0;
    std::uint64_t ps_flits = 0;
    std::uint64_t ps_result_flits = 0;
    std::uint64_t ps_command_flits = 0;
    std::uint64_t ps_stall_cycles = 0;
    std::uint64_t ps_precedence_violations = 0;
    std::uint64_t pg_stall_cycles = 0;
    std::uint64_t proc_injection_stalls = 0;

    std::uint64_t tb_flits_in = 0;
    std::uint64_t tb_flits_consumed = 0;
    std::uint64_t result_flits_produced = 0;
    std::uint64_t result_flits_to_pob = 0;
    std::uint64_t result_flits_to_chain = 0;

    std::uint64_t busy_cycles = 0;
    std::uint64_t sampled_cycles = 0;
    double tb_occupancy_accum = 0;
    double rb_occupancy_accum = 0;
    double pob_occupancy_accum = 0;
    double cb_occupancy_accum = 0;

    std::uint64_t bus_beats = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
};

struct RunMetrics {
    std::uint64_t seed = 0;
    TimePs duration_ps = 0;
    TimePs warmup_ps = 0;
    TimePs finished_ps = 0; // quiescence time for closed runs

    double injection_rate_flits_us = 0;
    double payload_injection_rate_flits_us = 0;
    double throughput_flits_us = 0;
    double result_throughput_flits_us = 0;
    double request_rate_us = 0;
    double fpga_busy_fraction = 0;
    double mean_latency_ns = 0;
    double mean_tb_occupancy = 0;
    double mean_rb_occupancy = 0;
    double mean_pob_occupancy = 0;
    double mean_cb_occupancy = 0;

    std::uint64_t noc_flits_injected = 0;
    std::uint64_t noc_flits_ejected = 0;

    Stats totals;
    std::uint64_t trace_hash = 0;
    std::uint64_t trace_events = 0;

    std::string metrics_csv() const;
    static std::string metrics_csv_header();
    double metric(const std::string& name, bool* found = nullptr) const;
    std::vector<std::pair<std::string, double>> named_values() const;
};

class TaskLog {
public:
    TaskRecord& create(std::uint64_t task_id);
    TaskRecord& at(std::uint64_t task_id);
    const std::vector<TaskRecord>& records() const { return records_; }
    std::string csv() const;
    static std::string csv_header();

private:
    std::vector<TaskRecord> records_;
    std::map<std::uint64_t, std::size_t> index_;
};

} // namespace accnoc
