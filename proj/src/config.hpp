#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "endpoints.hpp"
#include "shared_cache.hpp"

namespace accnoc {

enum class Interconnect { Noc, Bus };
enum class FpgaBuffering { Distributed, SharedCache };

// Full experiment description. Loaded from the flat key-value config format
// (see docs/config.md) or built programmatically by the scenario library.
struct SimConfig {
    // [sim]
    std::uint64_t seed = 1;
    TimePs duration_ps = 200'000'000; // 200 us
    TimePs warmup_ps = 20'000'000;
    TimePs watchdog_ps = 50'000'000; // no-progress limit; 0 disables
    std::string trace_path;          // empty = no trace file
    bool trace_enabled = false;
    bool closed_run = false; // stop at quiescence instead of duration

    // [clocks]
    TimePs noc_period_ps = 1000;
    TimePs proc_period_ps = 1000;
    TimePs iface_period_ps = 3333;
    TimePs mem_period_ps = 1000;
    TimePs bus_period_ps = 1000;

    // [mesh]
    int mesh_w = 3;
    int mesh_h = 3;
    int fpga_x = 2;
    int fpga_y = 2;
    bool has_memory = false;
    int mem_x = 0;
    int mem_y = 0;
    int router_pipeline = 2;
    int voq_depth = 16;
    int router_outbuf_flits = 16; // router -> interface crossing
    int router_inbuf_flits = 16;  // interface -> router crossing
    int link_depth = 4;           // processor/memory link FIFOs

    // [interface]
    int pr_channels = 0; // 0 = centralized
    int ps_group = 0;    // 0 = global
    ChannelParams channel;

    // [memory]
    std::int64_t mem_init_cycles = 30;
    std::int64_t mem_beat_cycles = 1;
    std::int64_t mem_fetch_cycles = 50;
    std::uint32_t addr_base = 0x10000;
    std::uint32_t addr_stride = 4096;

    // [system]
    Interconnect interconnect = Interconnect::Noc;
    FpgaBuffering buffering = FpgaBuffering::Distributed;
    int bus_txn_overhead = 12;
    SharedCache::Params cache;

    std::vector<HwaSpec> hwas;
    std::vector<ChainGroup> groups;

    // one entry per processor, cycled if fewer entries than processors
    std::vector<WorkloadSpec> workloads;

    int processor_count() const;
    std::vector<std::string> validate() const;
};

struct ParsedConfig {
    SimConfig config;
    std::vector<std::string> errors; // parse + semantic, with line info
    bool ok() const { return errors.empty(); }
};

ParsedConfig load_config(const std::string& path);
ParsedConfig parse_config(const std::string& text,
                          const std::string& include_dir = ".");

// Mutates one sweepable parameter; throws ConfigError for unknown axes.
// Axes: request_rate, num_tb, chaining_depth, pr_channels, ps_group,
// interconnect, fpga_buffering, seed.
void apply_axis(SimConfig& cfg, const std::string& axis,
                const std::string& value);

// Dotted-key override used by the C API/CLI, e.g. "sim.seed".
bool apply_override(SimConfig& cfg, const std::string& key,
                    const std::string& value, std::string* error);

std::string config_schema_doc();

} // namespace accnoc
