#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "config.hpp"

using namespace accnoc;

namespace {

const char* kMinimal = R"(
[hwa 0]
exec_cycles = 5
input_flits = 3
output_flits = 3

[workload]
mode = closed
jobs = 1
hwa = 0
)";

} // namespace

TEST_CASE("minimal config parses and fills defaults") {
    ParsedConfig pc = parse_config(kMinimal);
    REQUIRE(pc.ok());
    const SimConfig& c = pc.config;
    CHECK(c.mesh_w == 3);
    CHECK(c.fpga_x == 2);
    CHECK(c.channel.num_tb == 2);
    CHECK(c.iface_period_ps == 3333);
    CHECK(c.hwas.size() == 1);
    CHECK(c.hwas[0].exec_base == 5);
    CHECK(c.hwas[0].clock.period_ps == 3333);
    CHECK(c.workloads.size() == 8); // 3x3 mesh minus the fpga node
    CHECK(c.processor_count() == 8);
}

TEST_CASE("parse errors carry line numbers") {
    ParsedConfig pc = parse_config("[sim]\nseed == 3\n");
    REQUIRE_FALSE(pc.ok());
    CHECK(pc.errors[0].find("<config>:2") != std::string::npos);
}

TEST_CASE("semantic errors are aggregated and named") {
    std::string text = R"(
[hwa 3]
exec_cycles = 1
[hwa 3]
input_flits = 90

[chain jpeg]
members = 3, 9

[workload]
scenario = memory
hwa = 3
)";
    ParsedConfig pc = parse_config(text);
    REQUIRE_FALSE(pc.ok());
    auto has = [&](const std::string& needle) {
        for (const auto& e : pc.errors)
            if (e.find(needle) != std::string::npos)
                return true;
        return false;
    };
    CHECK(has("input_flits outside 1..64"));
    CHECK(has("member 9 is not a defined hwa"));
    CHECK(has("memory scenario needs a memory node"));
}

TEST_CASE("duplicate hwa ids are rejected") {
    // ids collide across sections once both define the same accelerator
    std::string text = R"(
[hwa 1]
exec_cycles = 1
[workload]
hwa = 1
)";
    ParsedConfig pc = parse_config(text);
    CHECK(pc.ok());
    SimConfig cfg = pc.config;
    HwaSpec dup;
    dup.hwa_id = 1;
    cfg.hwas.push_back(dup);
    auto errs = cfg.validate();
    bool found = false;
    for (const auto& e : errs)
        if (e.find("duplicate hwa id 1") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("include pulls keys from a second file") {
    const char* base = "/tmp/accnoc_base_test.cfg";
    {
        std::ofstream f(base);
        f << "[sim]\nseed = 99\n";
    }
    std::string text = "include accnoc_base_test.cfg\n";
    text += kMinimal;
    ParsedConfig pc = parse_config(text, "/tmp");
    REQUIRE(pc.ok());
    CHECK(pc.config.seed == 99);
    std::remove(base);
}

TEST_CASE("chain groups resolve by name onto accelerator specs") {
    std::string text = R"(
[hwa 2]
exec_cycles = 1
chain_group = jpeg
[hwa 7]
exec_cycles = 2
chain_group = jpeg

[chain jpeg]
members = 2, 7

[workload]
jobs = 1
mode = closed
job = 2>1
)";
    ParsedConfig pc = parse_config(text);
    REQUIRE(pc.ok());
    CHECK(pc.config.hwas[0].chain_group == 0);
    CHECK(pc.config.groups[0].members == std::vector<int>{2, 7});
    CHECK(pc.config.workloads[0].job[0].chain_depth == 1);
    CHECK(pc.config.workloads[0].job[0].chain_index == 1);
}

TEST_CASE("chained job step outside the group is a named error") {
    std::string text = R"(
[hwa 2]
exec_cycles = 1
chain_group = g
[chain g]
members = 2

[workload]
mode = closed
jobs = 1
job = 2>3
)";
    ParsedConfig pc = parse_config(text);
    REQUIRE_FALSE(pc.ok());
    CHECK(pc.errors[0].find("chain index outside group") != std::string::npos);
}

TEST_CASE("sweep axes mutate the config or refuse") {
    ParsedConfig pc = parse_config(kMinimal);
    REQUIRE(pc.ok());
    SimConfig cfg = pc.config;
    apply_axis(cfg, "num_tb", "4");
    CHECK(cfg.channel.num_tb == 4);
    apply_axis(cfg, "request_rate", "0.25");
    CHECK(cfg.workloads[0].rate_per_us == 0.25);
    apply_axis(cfg, "interconnect", "bus");
    CHECK(cfg.interconnect == Interconnect::Bus);
    apply_axis(cfg, "pr_channels", "4");
    CHECK(cfg.pr_channels == 4);
    CHECK_THROWS_AS(apply_axis(cfg, "voq_depth", "4"), ConfigError);
    CHECK_THROWS_AS(apply_axis(cfg, "num_tb", "9"), ConfigError);
}

TEST_CASE("chaining_depth axis rebuilds the job list") {
    std::string text = R"(
[hwa 0]
exec_cycles = 1
chain_group = g
[hwa 1]
exec_cycles = 1
chain_group = g
[hwa 2]
exec_cycles = 1
chain_group = g

[chain g]
members = 0, 1, 2

[workload]
mode = closed
jobs = 2
hwa = 0
)";
    ParsedConfig pc = parse_config(text);
    REQUIRE(pc.ok());
    SimConfig cfg = pc.config;
    apply_axis(cfg, "chaining_depth", "2");
    REQUIRE(cfg.workloads[0].job.size() == 1);
    CHECK(cfg.workloads[0].job[0].chain_depth == 2);
    apply_axis(cfg, "chaining_depth", "0");
    REQUIRE(cfg.workloads[0].job.size() == 3);
    CHECK(cfg.workloads[0].job[1].payload_from_prev);
}

TEST_CASE("dotted overrides reach nested keys") {
    ParsedConfig pc = parse_config(kMinimal);
    SimConfig cfg = pc.config;
    std::string err;
    CHECK(apply_override(cfg, "sim.seed", "321", &err));
    CHECK(cfg.seed == 321);
    CHECK(apply_override(cfg, "interface.num_tb", "3", &err));
    CHECK(cfg.channel.num_tb == 3);
    CHECK(apply_override(cfg, "workload.jobs", "5", &err));
    CHECK(cfg.workloads[3].jobs == 5);
    CHECK_FALSE(apply_override(cfg, "sim.bogus", "1", &err));
    CHECK(err.find("unknown key") != std::string::npos);
    CHECK_FALSE(apply_override(cfg, "nodots", "1", &err));
}

TEST_CASE("load_config reports missing files") {
    ParsedConfig pc = load_config("/nonexistent/nope.cfg");
    REQUIRE_FALSE(pc.ok());
    CHECK(pc.errors[0].find("cannot open") != std::string::npos);
}

TEST_CASE("strategies must partition the channel set") {
    std::string text = R"(
[hwa 0]
exec_cycles = 1
[hwa 1]
exec_cycles = 1
[hwa 2]
exec_cycles = 1

[interface]
pr_channels = 2

[workload]
hwa = 0
)";
    ParsedConfig pc = parse_config(text);
    REQUIRE_FALSE(pc.ok());
    CHECK(pc.errors[0].find("pr_channels must divide") != std::string::npos);
}
