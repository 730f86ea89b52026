#include "metrics.hpp"

#include <cmath>
#include <sstream>

namespace accnoc {

TaskRecord& TaskLog::create(std::uint64_t task_id) {
    auto it = index_.find(task_id);
    if (it != index_.end())
        return records_[it->second];
    index_[task_id] = records_.size();
    records_.emplace_back();
    records_.back().task_id = task_id;
    return records_.back();
}

TaskRecord& TaskLog::at(std::uint64_t task_id) { return create(task_id); }

std::string TaskLog::csv_header() {
    return "task_id,source,hwa,priority,direction,payload_bytes,n_in,n_out,"
           "hops,issue_ps,req_delivered_ps,grant_emitted_ps,grant_rx_ps,"
           "payload_sent_ps,tb_ready_ps,ps_selected_ps,result_sent_ps,"
           "notify_rx_ps,complete_ps,latency_ps,data_ok";
}

std::string TaskLog::csv() const {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const TaskRecord& r : records_) {
        os << r.task_id << ',' << r.source << ',' << r.hwa << ','
           << int(r.priority) << ',' << int(r.direction) << ','
           << r.payload_bytes << ',' << r.n_in << ',' << r.n_out << ','
           << r.hops.size() << ',' << r.issue << ',' << r.req_delivered << ','
           << r.grant_emitted << ',' << r.grant_rx << ',' << r.payload_sent
           << ',' << r.tb_ready << ',' << r.ps_selected << ','
           << r.result_sent << ',' << r.notify_rx << ',' << r.complete << ','
           << (r.completed ? r.complete - r.issue : -1) << ','
           << (r.data_ok ? 1 : 0) << '\n';
    }
    return os.str();
}

std::vector<std::pair<std::string, double>> RunMetrics::named_values() const {
    return {
        {"seed", static_cast<double>(seed)},
        {"duration_ps", static_cast<double>(duration_ps)},
        {"warmup_ps", static_cast<double>(warmup_ps)},
        {"finished_ps", static_cast<double>(finished_ps)},
        {"injection_rate_flits_us", injection_rate_flits_us},
        {"payload_injection_rate_flits_us", payload_injection_rate_flits_us},
        {"throughput_flits_us", throughput_flits_us},
        {"result_throughput_flits_us", result_throughput_flits_us},
        {"request_rate_us", request_rate_us},
        {"fpga_busy_fraction", fpga_busy_fraction},
        {"mean_latency_ns", mean_latency_ns},
        {"mean_tb_occupancy", mean_tb_occupancy},
        {"mean_rb_occupancy", mean_rb_occupancy},
        {"mean_pob_occupancy", mean_pob_occupancy},
        {"mean_cb_occupancy", mean_cb_occupancy},
        {"noc_flits_injected", static_cast<double>(noc_flits_injected)},
        {"noc_flits_ejected", static_cast<double>(noc_flits_ejected)},
        {"requests_issued", static_cast<double>(totals.requests_issued)},
        {"grants", static_cast<double>(totals.grants)},
        {"tasks_started", static_cast<double>(totals.tasks_started)},
        {"chain_hops", static_cast<double>(totals.chain_hops)},
        {"notifies", static_cast<double>(totals.notifies)},
        {"completions", static_cast<double>(totals.completions)},
        {"pr_flits", static_cast<double>(totals.pr_flits)},
        {"pr_payload_flits", static_cast<double>(totals.pr_payload_flits)},
        {"pr_unknown_hwa", static_cast<double>(totals.pr_unknown_hwa)},
        {"pr_stall_cycles", static_cast<double>(totals.pr_stall_cycles)},
        {"ps_flits", static_cast<double>(totals.ps_flits)},
        {"ps_result_flits", static_cast<double>(totals.ps_result_flits)},
        {"ps_command_flits", static_cast<double>(totals.ps_command_flits)},
        {"ps_stall_cycles", static_cast<double>(totals.ps_stall_cycles)},
        {"pg_stall_cycles", static_cast<double>(totals.pg_stall_cycles)},
        {"proc_injection_stalls",
         static_cast<double>(totals.proc_injection_stalls)},
        {"tb_flits_in", static_cast<double>(totals.tb_flits_in)},
        {"tb_flits_consumed", static_cast<double>(totals.tb_flits_consumed)},
        {"result_flits_produced",
         static_cast<double>(totals.result_flits_produced)},
        {"result_flits_to_pob",
         static_cast<double>(totals.result_flits_to_pob)},
        {"result_flits_to_chain",
         static_cast<double>(totals.result_flits_to_chain)},
        {"cache_hits", static_cast<double>(totals.cache_hits)},
        {"cache_misses", static_cast<double>(totals.cache_misses)},
        {"bus_beats", static_cast<double>(totals.bus_beats)},
        {"trace_events", static_cast<double>(trace_events)},
    };
}

std::string RunMetrics::metrics_csv_header() {
    RunMetrics m;
    std::string out;
    for (const auto& [name, v] : m.named_values()) {
        (void)v;
        if (!out.empty())
            out += ',';
        out += name;
    }
    return out;
}

namespace {
std::string fmt(double v) {
    if (v == static_cast<double>(static_cast<long long>(v)) &&
        std::fabs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << v;
    return os.str();
}
} // namespace

std::string RunMetrics::metrics_csv() const {
    std::string out;
    for (const auto& [name, v] : named_values()) {
        (void)name;
        if (!out.empty())
            out += ',';
        out += fmt(v);
    }
    return out;
}

double RunMetrics::metric(const std::string& name, bool* found) const {
    for (const auto& [n, v] : named_values()) {
        if (n == name) {
            if (found)
                *found = true;
            return v;
        }
    }
    if (found)
        *found = false;
    return 0.0;
}

} // namespace accnoc
