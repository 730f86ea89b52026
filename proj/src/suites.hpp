#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "metrics.hpp"
#include "system.hpp"

namespace accnoc {

// Built-in scenario library. The profiles preserve the two communication
// extremes the experiments revolve around: a one-cycle accelerator moving
// large payloads, and a long-latency accelerator moving tiny ones.

// izigzag-like: exec 1 cycle, 18-flit input/output.
SimConfig scenario_izigzag(int channels = 8);
// dfdiv-like: ~2000-cycle execution, single-flit input/output.
SimConfig scenario_dfdiv(int channels = 8);
// eight accelerators spanning 1..2000 execution cycles.
SimConfig scenario_eight_mixed();
// task-buffer experiment: every processor hammers one accelerator.
SimConfig scenario_tb_experiment(bool izigzag_profile, int num_tb, int jobs);
// four-stage chain (decompression-style pipeline) at a given depth.
SimConfig scenario_chain(int depth, int jobs_per_proc);
// interconnect/buffering comparison base: transport differences exposed by
// running every clock at the processor rate.
SimConfig scenario_compare_base();

struct SweepPoint {
    std::string value;
    RunMetrics metrics;
    std::string error;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;
    std::string csv() const;
};

// Runs one simulation per value; points execute on worker threads and are
// reported in input order.
SweepResult run_sweep(const SimConfig& base, const std::string& axis,
                      const std::vector<std::string>& values,
                      bool parallel = true);

struct SuiteReport {
    std::string name;
    std::vector<std::string> lines;
    int failures = 0;
    std::string text() const;
};

// tb_count | throughput | chaining | bus_compare | cache_compare
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 1);
std::vector<std::string> suite_names();

} // namespace accnoc
