#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace accnoc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool to_i64(const std::string& s, std::int64_t& out) {
    if (s.empty())
        return false;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 0);
    if (end != s.c_str() + s.size())
        return false;
    out = v;
    return true;
}

bool to_f64(const std::string& s, double& out) {
    if (s.empty())
        return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        return false;
    out = v;
    return true;
}

struct Parser {
    SimConfig cfg;
    std::vector<std::string> errors;
    std::map<std::string, int> group_names; // name -> index
    std::map<int, std::string> hwa_group_ref;
    std::map<int, WorkloadSpec> per_proc_workload;
    bool default_workload_set = false;
    WorkloadSpec default_workload;

    void err(const std::string& where, const std::string& msg) {
        errors.push_back(where + ": " + msg);
    }

    bool parse_step(const std::string& tok, InvocationStep& step,
                    const std::string& where) {
        // "HWA" or "HWA>i1>i2>i3" for a chained step
        auto parts = split(tok, '>');
        std::int64_t hwa;
        if (!to_i64(parts[0], hwa)) {
            err(where, "bad job step '" + tok + "'");
            return false;
        }
        step.hwa = static_cast<int>(hwa);
        step.chain_depth = static_cast<std::uint8_t>(parts.size() - 1);
        if (step.chain_depth > 3) {
            err(where, "chain depth exceeds 3 in step '" + tok + "'");
            return false;
        }
        step.chain_index = 0;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            std::int64_t idx;
            if (!to_i64(parts[i], idx) || idx < 0 || idx > 3) {
                err(where, "bad chain index in step '" + tok + "'");
                return false;
            }
            step.chain_index = static_cast<std::uint8_t>(
                step.chain_index | (idx << (2 * (i - 1))));
        }
        return true;
    }

    void handle(const std::string& where, const std::string& section,
                const std::string& arg, const std::string& key,
                const std::string& value);
    void finalize();
};

void Parser::handle(const std::string& where, const std::string& section,
                    const std::string& arg, const std::string& key,
                    const std::string& value) {
    std::int64_t i = 0;
    double f = 0;
    auto want_int = [&](std::int64_t& dst) {
        if (!to_i64(value, i)) {
            err(where, "expected integer for " + key);
            return false;
        }
        dst = i;
        return true;
    };
    auto want_int32 = [&](int& dst) {
        std::int64_t v;
        if (want_int(v)) {
            dst = static_cast<int>(v);
            return true;
        }
        return false;
    };

    if (section == "sim") {
        if (key == "seed") {
            std::int64_t v;
            if (want_int(v))
                cfg.seed = static_cast<std::uint64_t>(v);
        } else if (key == "duration_ps") {
            want_int(cfg.duration_ps);
        } else if (key == "duration_us") {
            if (to_f64(value, f))
                cfg.duration_ps = static_cast<TimePs>(f * 1e6);
            else
                err(where, "expected number for duration_us");
        } else if (key == "warmup_ps") {
            want_int(cfg.warmup_ps);
        } else if (key == "warmup_us") {
            if (to_f64(value, f))
                cfg.warmup_ps = static_cast<TimePs>(f * 1e6);
            else
                err(where, "expected number for warmup_us");
        } else if (key == "watchdog_us") {
            if (to_f64(value, f))
                cfg.watchdog_ps = static_cast<TimePs>(f * 1e6);
            else
                err(where, "expected number for watchdog_us");
        } else if (key == "trace") {
            cfg.trace_path = value;
            cfg.trace_enabled = true;
        } else if (key == "closed") {
            cfg.closed_run = value == "true" || value == "1";
        } else {
            err(where, "unknown key [sim] " + key);
        }
    } else if (section == "clocks") {
        if (key == "noc_period_ps")
            want_int(cfg.noc_period_ps);
        else if (key == "proc_period_ps")
            want_int(cfg.proc_period_ps);
        else if (key == "interface_period_ps")
            want_int(cfg.iface_period_ps);
        else if (key == "memory_period_ps")
            want_int(cfg.mem_period_ps);
        else if (key == "bus_period_ps")
            want_int(cfg.bus_period_ps);
        else
            err(where, "unknown key [clocks] " + key);
    } else if (section == "mesh") {
        if (key == "width")
            want_int32(cfg.mesh_w);
        else if (key == "height")
            want_int32(cfg.mesh_h);
        else if (key == "fpga") {
            auto xy = split(value, ',');
            std::int64_t x, y;
            if (xy.size() == 2 && to_i64(xy[0], x) && to_i64(xy[1], y)) {
                cfg.fpga_x = static_cast<int>(x);
                cfg.fpga_y = static_cast<int>(y);
            } else {
                err(where, "fpga wants 'x,y'");
            }
        } else if (key == "memory") {
            if (value == "none") {
                cfg.has_memory = false;
            } else {
                auto xy = split(value, ',');
                std::int64_t x, y;
                if (xy.size() == 2 && to_i64(xy[0], x) && to_i64(xy[1], y)) {
                    cfg.has_memory = true;
                    cfg.mem_x = static_cast<int>(x);
                    cfg.mem_y = static_cast<int>(y);
                } else {
                    err(where, "memory wants 'x,y' or none");
                }
            }
        } else if (key == "router_pipeline")
            want_int32(cfg.router_pipeline);
        else if (key == "voq_depth")
            want_int32(cfg.voq_depth);
        else if (key == "router_outbuf")
            want_int32(cfg.router_outbuf_flits);
        else if (key == "router_inbuf")
            want_int32(cfg.router_inbuf_flits);
        else if (key == "link_depth")
            want_int32(cfg.link_depth);
        else
            err(where, "unknown key [mesh] " + key);
    } else if (section == "interface") {
        if (key == "pr_channels") {
            if (value == "centralized")
                cfg.pr_channels = 0;
            else
                want_int32(cfg.pr_channels);
        } else if (key == "ps_group") {
            if (value == "global")
                cfg.ps_group = 0;
            else
                want_int32(cfg.ps_group);
        } else if (key == "num_tb")
            want_int32(cfg.channel.num_tb);
        else if (key == "rb_depth")
            want_int32(cfg.channel.rb_depth);
        else if (key == "lgb_depth")
            want_int32(cfg.channel.lgb_depth);
        else if (key == "pob_depth")
            want_int32(cfg.channel.pob_depth);
        else if (key == "cb_depth")
            want_int32(cfg.channel.cb_depth);
        else if (key == "tb_flits")
            want_int32(cfg.channel.tb_flit_cap);
        else
            err(where, "unknown key [interface] " + key);
    } else if (section == "memory") {
        if (key == "init_cycles")
            want_int(cfg.mem_init_cycles);
        else if (key == "beat_cycles")
            want_int(cfg.mem_beat_cycles);
        else if (key == "fetch_cycles")
            want_int(cfg.mem_fetch_cycles);
        else if (key == "addr_base") {
            std::int64_t v;
            if (want_int(v))
                cfg.addr_base = static_cast<std::uint32_t>(v);
        } else if (key == "addr_stride") {
            std::int64_t v;
            if (want_int(v))
                cfg.addr_stride = static_cast<std::uint32_t>(v);
        } else
            err(where, "unknown key [memory] " + key);
    } else if (section == "system") {
        if (key == "interconnect") {
            if (value == "noc")
                cfg.interconnect = Interconnect::Noc;
            else if (value == "bus")
                cfg.interconnect = Interconnect::Bus;
            else
                err(where, "interconnect must be noc or bus");
        } else if (key == "fpga_buffering") {
            if (value == "distributed")
                cfg.buffering = FpgaBuffering::Distributed;
            else if (value == "shared_cache")
                cfg.buffering = FpgaBuffering::SharedCache;
            else
                err(where, "fpga_buffering must be distributed or shared_cache");
        } else if (key == "bus_txn_overhead")
            want_int32(cfg.bus_txn_overhead);
        else if (key == "cache_bytes") {
            std::int64_t v;
            if (want_int(v))
                cfg.cache.size_bytes = static_cast<std::size_t>(v);
        } else if (key == "cache_ways")
            want_int32(cfg.cache.ways);
        else if (key == "cache_line")
            want_int32(cfg.cache.line_bytes);
        else if (key == "cache_hit_cycles")
            want_int32(cfg.cache.hit_cycles);
        else if (key == "cache_miss_cycles")
            want_int32(cfg.cache.miss_cycles);
        else
            err(where, "unknown key [system] " + key);
    } else if (section == "hwa") {
        std::int64_t id;
        if (!to_i64(arg, id)) {
            err(where, "[hwa N] needs a numeric id");
            return;
        }
        HwaSpec* spec = nullptr;
        for (auto& h : cfg.hwas)
            if (h.hwa_id == id)
                spec = &h;
        if (!spec) {
            HwaSpec h;
            h.hwa_id = static_cast<int>(id);
            h.clock = ClockDomain{cfg.iface_period_ps, 0};
            cfg.hwas.push_back(h);
            spec = &cfg.hwas.back();
        }
        if (key == "exec_cycles")
            want_int(spec->exec_base);
        else if (key == "exec_per_flit")
            want_int(spec->exec_per_flit);
        else if (key == "input_flits")
            want_int32(spec->input_flits);
        else if (key == "output_flits")
            want_int32(spec->output_flits);
        else if (key == "period_ps")
            want_int(spec->clock.period_ps);
        else if (key == "chain_group")
            hwa_group_ref[spec->hwa_id] = value;
        else
            err(where, "unknown key [hwa] " + key);
    } else if (section == "chain") {
        if (arg.empty()) {
            err(where, "[chain NAME] needs a name");
            return;
        }
        int gi;
        auto it = group_names.find(arg);
        if (it == group_names.end()) {
            gi = static_cast<int>(cfg.groups.size());
            group_names[arg] = gi;
            cfg.groups.push_back(ChainGroup{arg, {}});
        } else {
            gi = it->second;
        }
        if (key == "members") {
            std::vector<int> members;
            for (const auto& tok : split(value, ',')) {
                std::int64_t v;
                if (!to_i64(tok, v)) {
                    err(where, "bad member '" + tok + "'");
                    return;
                }
                members.push_back(static_cast<int>(v));
            }
            cfg.groups[static_cast<std::size_t>(gi)].members = members;
        } else {
            err(where, "unknown key [chain] " + key);
        }
    } else if (section == "workload") {
        WorkloadSpec* wl = &default_workload;
        if (!arg.empty()) {
            std::int64_t p;
            if (!to_i64(arg, p)) {
                err(where, "[workload N] needs a processor number");
                return;
            }
            wl = &per_proc_workload[static_cast<int>(p)];
        } else {
            default_workload_set = true;
        }
        if (key == "mode") {
            if (value == "open")
                wl->mode = WorkloadSpec::Mode::Open;
            else if (value == "closed")
                wl->mode = WorkloadSpec::Mode::Closed;
            else
                err(where, "mode must be open or closed");
        } else if (key == "rate_per_us") {
            if (to_f64(value, f))
                wl->rate_per_us = f;
            else
                err(where, "expected number for rate_per_us");
        } else if (key == "arrival") {
            if (value == "poisson")
                wl->poisson = true;
            else if (value == "fixed")
                wl->poisson = false;
            else
                err(where, "arrival must be fixed or poisson");
        } else if (key == "hwa") {
            wl->hwa_set.clear();
            for (const auto& tok : split(value, ',')) {
                std::int64_t v;
                if (!to_i64(tok, v)) {
                    err(where, "bad hwa '" + tok + "'");
                    return;
                }
                wl->hwa_set.push_back(static_cast<int>(v));
            }
        } else if (key == "payload_bytes")
            want_int32(wl->payload_bytes);
        else if (key == "packets_per_task")
            want_int32(wl->packets_per_task);
        else if (key == "priority") {
            if (value == "random") {
                wl->random_priority = true;
            } else {
                std::int64_t v;
                if (want_int(v))
                    wl->priority = static_cast<std::uint8_t>(v);
            }
        } else if (key == "scenario") {
            if (value == "direct")
                wl->direction = kDirDirect;
            else if (value == "memory")
                wl->direction = kDirMemory;
            else
                err(where, "scenario must be direct or memory");
        } else if (key == "max_outstanding")
            want_int32(wl->max_outstanding);
        else if (key == "jobs")
            want_int32(wl->jobs);
        else if (key == "job") {
            wl->job.clear();
            bool first = true;
            for (const auto& tok : split(value, ',')) {
                InvocationStep step;
                if (!parse_step(tok, step, where))
                    return;
                step.payload_from_prev = !first;
                wl->job.push_back(step);
                first = false;
            }
        } else {
            err(where, "unknown key [workload] " + key);
        }
    } else {
        err(where, "unknown section [" + section + "]");
    }
}

void Parser::finalize() {
    // resolve chain group names on hwa specs
    for (auto& [hwa, name] : hwa_group_ref) {
        auto it = group_names.find(name);
        if (it == group_names.end()) {
            errors.push_back("hwa " + std::to_string(hwa) +
                             " references unknown chain group '" + name + "'");
            continue;
        }
        for (auto& h : cfg.hwas)
            if (h.hwa_id == hwa)
                h.chain_group = it->second;
    }
    // expand workloads: one entry per processor
    const int nproc = cfg.processor_count();
    cfg.workloads.clear();
    for (int p = 0; p < nproc; ++p) {
        auto it = per_proc_workload.find(p);
        cfg.workloads.push_back(it != per_proc_workload.end()
                                    ? it->second
                                    : default_workload);
    }
    auto more = cfg.validate();
    errors.insert(errors.end(), more.begin(), more.end());
}

} // namespace

int SimConfig::processor_count() const {
    return mesh_w * mesh_h - 1 - (has_memory ? 1 : 0);
}

std::vector<std::string> SimConfig::validate() const {
    std::vector<std::string> errs;
    auto bad = [&](const std::string& m) { errs.push_back(m); };

    for (auto [name, v] :
         {std::pair<const char*, TimePs>{"noc", noc_period_ps},
          {"proc", proc_period_ps},
          {"interface", iface_period_ps},
          {"memory", mem_period_ps},
          {"bus", bus_period_ps}})
        if (v < 1)
            bad(std::string(name) + " clock period must be >= 1 ps");

    if (mesh_w < 1 || mesh_h < 1)
        bad("mesh dimensions must be >= 1");
    if (fpga_x < 0 || fpga_x >= mesh_w || fpga_y < 0 || fpga_y >= mesh_h)
        bad("fpga node outside the mesh");
    if (has_memory) {
        if (mem_x < 0 || mem_x >= mesh_w || mem_y < 0 || mem_y >= mesh_h)
            bad("memory node outside the mesh");
        if (mem_x == fpga_x && mem_y == fpga_y)
            bad("memory node collides with the fpga node");
    }
    if (router_pipeline < 1)
        bad("router_pipeline must be >= 1");
    if (voq_depth < 2)
        bad("voq_depth must be >= 2");
    if (processor_count() < 1)
        bad("no processor nodes left in the mesh");
    if (processor_count() > 8)
        bad("more than 8 processors cannot be addressed by the 3-bit "
            "source id");

    if (hwas.empty())
        bad("no [hwa] sections defined");
    std::set<int> ids;
    for (const auto& h : hwas) {
        if (h.hwa_id < 0 || h.hwa_id > 31)
            bad("hwa id " + std::to_string(h.hwa_id) + " outside 0..31");
        if (!ids.insert(h.hwa_id).second)
            bad("duplicate hwa id " + std::to_string(h.hwa_id));
        if (h.input_flits < 1 || h.input_flits > 64)
            bad("hwa " + std::to_string(h.hwa_id) + " input_flits outside 1..64");
        if (h.output_flits < 1 || h.output_flits > 64)
            bad("hwa " + std::to_string(h.hwa_id) +
                " output_flits outside 1..64");
        if (h.clock.period_ps < 1)
            bad("hwa " + std::to_string(h.hwa_id) + " period must be >= 1 ps");
    }
    for (const auto& g : groups) {
        if (g.members.empty() || g.members.size() > 4)
            bad("chain group '" + g.name + "' needs 1..4 members");
        std::set<int> seen;
        for (int m : g.members) {
            if (!ids.count(m))
                bad("chain group '" + g.name + "' member " +
                    std::to_string(m) + " is not a defined hwa");
            if (!seen.insert(m).second)
                bad("chain group '" + g.name + "' repeats member " +
                    std::to_string(m));
        }
    }

    if (pr_channels < 0 ||
        (pr_channels > 0 && !hwas.empty() &&
         static_cast<int>(hwas.size()) % pr_channels != 0))
        bad("pr_channels must divide the channel count (" +
            std::to_string(hwas.size()) + ") or be centralized");
    if (ps_group < 0 ||
        (ps_group > 0 && !hwas.empty() &&
         static_cast<int>(hwas.size()) % ps_group != 0))
        bad("ps_group must divide the channel count (" +
            std::to_string(hwas.size()) + ") or be global");
    if (channel.num_tb < 1 || channel.num_tb > 4)
        bad("num_tb must be 1..4");
    for (auto [name, v] : {std::pair<const char*, int>{"rb_depth",
                                                       channel.rb_depth},
                           {"lgb_depth", channel.lgb_depth},
                           {"pob_depth", channel.pob_depth},
                           {"cb_depth", channel.cb_depth}})
        if (v < 1)
            bad(std::string(name) + " must be >= 1");
    if (channel.tb_flit_cap < 2)
        bad("tb_flits must be >= 2");

    if (duration_ps <= 0)
        bad("duration must be positive");
    if (warmup_ps < 0 || warmup_ps >= duration_ps)
        bad("warmup must be in [0, duration)");

    if (cache.ways < 1 || cache.line_bytes < 16 ||
        cache.size_bytes <
            static_cast<std::size_t>(cache.ways * cache.line_bytes))
        bad("cache geometry invalid");

    for (std::size_t p = 0; p < workloads.size(); ++p) {
        const auto& w = workloads[p];
        const std::string who = "workload " + std::to_string(p);
        if (w.rate_per_us < 0)
            bad(who + ": negative rate");
        if (w.payload_bytes < 0 ||
            w.payload_bytes > static_cast<int>(kMaxDataBytes))
            bad(who + ": payload_bytes outside 0..1023");
        if (w.packets_per_task < 1)
            bad(who + ": packets_per_task must be >= 1");
        if (w.priority > 3)
            bad(who + ": priority outside 0..3");
        if (w.direction == kDirMemory && !has_memory)
            bad(who + ": memory scenario needs a memory node");
        if (w.hwa_set.empty() && w.job.empty())
            bad(who + ": no target hwa");
        if (w.job.empty()) // the random-target set is only used without a job
            for (int hw : w.hwa_set)
                if (!ids.count(hw))
                    bad(who + ": hwa " + std::to_string(hw) + " undefined");
        for (const auto& step : w.job) {
            if (!ids.count(step.hwa)) {
                bad(who + ": job step hwa " + std::to_string(step.hwa) +
                    " undefined");
                continue;
            }
            if (step.payload_from_prev && w.direction == kDirMemory)
                bad(who + ": memory scenario cannot chain payload through the "
                          "processor");
            if (step.chain_depth > 0) {
                try {
                    hop_sequence(step, hwas, groups);
                } catch (const ConfigError& e) {
                    bad(who + ": " + e.what());
                }
            }
        }
        if (w.mode == WorkloadSpec::Mode::Closed && w.jobs < 0)
            bad(who + ": jobs must be >= 0");
    }
    return errs;
}

namespace {

void parse_into(Parser& p, const std::string& text,
                const std::string& display_name, const std::string& dir,
                int depth) {
    if (depth > 8) {
        p.err(display_name, "include nesting too deep");
        return;
    }
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string section;
    std::string arg;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = display_name + ":" + std::to_string(lineno);
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                p.err(where, "unterminated section header");
                continue;
            }
            const std::string inner = trim(line.substr(1, line.size() - 2));
            auto sp = inner.find(' ');
            if (sp == std::string::npos) {
                section = inner;
                arg.clear();
            } else {
                section = trim(inner.substr(0, sp));
                arg = trim(inner.substr(sp + 1));
            }
            continue;
        }
        if (line.rfind("include ", 0) == 0) {
            const std::string inc = trim(line.substr(8));
            const std::filesystem::path path =
                std::filesystem::path(dir) / inc;
            std::ifstream f(path);
            if (!f) {
                p.err(where, "cannot open include '" + path.string() + "'");
                continue;
            }
            std::stringstream buf;
            buf << f.rdbuf();
            parse_into(p, buf.str(), path.string(),
                       path.parent_path().string(), depth + 1);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.err(where, "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            p.err(where, "key before any [section]");
            continue;
        }
        p.handle(where, section, arg, key, value);
    }
}

} // namespace

ParsedConfig parse_config(const std::string& text,
                          const std::string& include_dir) {
    Parser p;
    parse_into(p, text, "<config>", include_dir, 0);
    p.finalize();
    return ParsedConfig{std::move(p.cfg), std::move(p.errors)};
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        ParsedConfig out;
        out.errors.push_back("cannot open config file '" + path + "'");
        return out;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    Parser p;
    parse_into(p, buf.str(), path,
               std::filesystem::path(path).parent_path().string(), 0);
    p.finalize();
    return ParsedConfig{std::move(p.cfg), std::move(p.errors)};
}

void apply_axis(SimConfig& cfg, const std::string& axis,
                const std::string& value) {
    auto fail = [&](const std::string& m) {
        throw ConfigError("axis '" + axis + "': " + m);
    };
    if (axis == "request_rate") {
        double f;
        if (!to_f64(value, f) || f < 0)
            fail("expected a nonnegative rate");
        for (auto& w : cfg.workloads)
            w.rate_per_us = f;
    } else if (axis == "num_tb") {
        std::int64_t v;
        if (!to_i64(value, v) || v < 1 || v > 4)
            fail("expected 1..4");
        cfg.channel.num_tb = static_cast<int>(v);
    } else if (axis == "chaining_depth") {
        std::int64_t d;
        if (!to_i64(value, d) || d < 0 || d > 3)
            fail("expected 0..3");
        if (cfg.groups.empty())
            fail("config has no chain group");
        const auto& members = cfg.groups[0].members;
        if (static_cast<std::size_t>(d) + 1 > members.size())
            fail("depth exceeds the chain group");
        for (auto& w : cfg.workloads) {
            w.job.clear();
            InvocationStep first;
            first.hwa = members[0];
            first.chain_depth = static_cast<std::uint8_t>(d);
            first.chain_index = 0;
            for (int k = 0; k < d; ++k)
                first.chain_index = static_cast<std::uint8_t>(
                    first.chain_index | ((k + 1) << (2 * k)));
            w.job.push_back(first);
            for (std::size_t m = static_cast<std::size_t>(d) + 1;
                 m < members.size(); ++m) {
                InvocationStep s;
                s.hwa = members[m];
                s.payload_from_prev = true;
                w.job.push_back(s);
            }
        }
    } else if (axis == "pr_channels") {
        cfg.pr_channels = value == "centralized" ? 0 : std::stoi(value);
    } else if (axis == "ps_group") {
        cfg.ps_group = value == "global" ? 0 : std::stoi(value);
    } else if (axis == "interconnect") {
        if (value == "noc")
            cfg.interconnect = Interconnect::Noc;
        else if (value == "bus")
            cfg.interconnect = Interconnect::Bus;
        else
            fail("expected noc or bus");
    } else if (axis == "fpga_buffering") {
        if (value == "distributed")
            cfg.buffering = FpgaBuffering::Distributed;
        else if (value == "shared_cache")
            cfg.buffering = FpgaBuffering::SharedCache;
        else
            fail("expected distributed or shared_cache");
    } else if (axis == "seed") {
        std::int64_t v;
        if (!to_i64(value, v))
            fail("expected an integer seed");
        cfg.seed = static_cast<std::uint64_t>(v);
    } else {
        fail("not a sweepable parameter (request_rate, num_tb, "
             "chaining_depth, pr_channels, ps_group, interconnect, "
             "fpga_buffering, seed)");
    }
}

bool apply_override(SimConfig& cfg, const std::string& key,
                    const std::string& value, std::string* error) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
        if (error)
            *error = "override key must look like section.key";
        return false;
    }
    std::string section = key.substr(0, dot);
    std::string k = key.substr(dot + 1);
    std::string arg;
    const auto colon = section.find(':');
    if (colon != std::string::npos) {
        arg = section.substr(colon + 1);
        section = section.substr(0, colon);
    }
    Parser p;
    p.cfg = cfg;
    // reconstruct group-name bookkeeping so chain_group overrides resolve
    for (std::size_t gi = 0; gi < cfg.groups.size(); ++gi)
        p.group_names[cfg.groups[gi].name] = static_cast<int>(gi);
    int wl_index = -1;
    if (section == "workload") {
        if (arg.empty()) {
            if (!cfg.workloads.empty())
                p.default_workload = cfg.workloads[0];
        } else {
            wl_index = std::stoi(arg);
            if (wl_index < 0 ||
                wl_index >= static_cast<int>(cfg.workloads.size())) {
                if (error)
                    *error = "workload index out of range";
                return false;
            }
            p.per_proc_workload[wl_index] =
                cfg.workloads[static_cast<std::size_t>(wl_index)];
        }
    }
    p.handle("<override>", section, arg, k, value);
    if (!p.errors.empty()) {
        if (error)
            *error = p.errors.front();
        return false;
    }
    if (section == "workload") {
        if (wl_index < 0) {
            for (auto& w : p.cfg.workloads)
                w = p.default_workload;
        } else {
            p.cfg.workloads[static_cast<std::size_t>(wl_index)] =
                p.per_proc_workload[wl_index];
        }
    }
    cfg = p.cfg;
    return true;
}

std::string config_schema_doc() {
    return "sections: [sim] seed duration_us warmup_us watchdog_us trace "
           "closed; [clocks] noc_period_ps proc_period_ps interface_period_ps "
           "memory_period_ps bus_period_ps; [mesh] width height fpga memory "
           "router_pipeline voq_depth router_outbuf router_inbuf link_depth; "
           "[interface] pr_channels ps_group num_tb rb_depth lgb_depth "
           "pob_depth cb_depth tb_flits; [memory] init_cycles beat_cycles "
           "fetch_cycles addr_base addr_stride; [system] interconnect "
           "fpga_buffering bus_txn_overhead cache_*; [hwa N] exec_cycles "
           "exec_per_flit input_flits output_flits period_ps chain_group; "
           "[chain NAME] members; [workload [N]] mode rate_per_us arrival hwa "
           "payload_bytes packets_per_task priority scenario jobs job. "
           "See docs/config.md for the full schema.";
}

} // namespace accnoc
