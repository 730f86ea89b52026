// Command-line front end over the accnoc C API.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "accnoc/accnoc.h"

namespace {

int die(accnoc_status st, const std::string& what) {
    std::cerr << "accnoc: " << what << ": " << accnoc_last_error() << "\n";
    return static_cast<int>(st);
}

bool write_file(const std::string& path, const char* text) {
    std::ofstream f(path);
    if (!f)
        return false;
    f << text;
    return true;
}

struct ConfigGuard {
    accnoc_config* cfg = nullptr;
    ~ConfigGuard() { accnoc_config_free(cfg); }
};

int load_with_overrides(const std::string& path, long long seed,
                        const std::string& trace, ConfigGuard& guard) {
    accnoc_status st = accnoc_config_load(path.c_str(), &guard.cfg);
    if (st == ACCNOC_ERR_IO)
        return die(st, "cannot read " + path);
    if (st != ACCNOC_OK) {
        std::cerr << "accnoc: invalid config " << path << ":\n"
                  << accnoc_last_error();
        return static_cast<int>(st);
    }
    if (seed >= 0 &&
        accnoc_config_set(guard.cfg, "sim.seed", std::to_string(seed).c_str()) !=
            ACCNOC_OK)
        return die(ACCNOC_ERR_UNKNOWN, "setting seed");
    if (!trace.empty() &&
        accnoc_config_set(guard.cfg, "sim.trace", trace.c_str()) != ACCNOC_OK)
        return die(ACCNOC_ERR_UNKNOWN, "setting trace path");
    return -1; // keep going
}

int emit_run(accnoc_run* run, const std::string& out_dir) {
    char* metrics = nullptr;
    char* tasks = nullptr;
    accnoc_run_metrics_csv(run, &metrics);
    accnoc_run_task_log_csv(run, &tasks);
    const std::string mpath = out_dir + "/metrics.csv";
    const std::string tpath = out_dir + "/tasks.csv";
    const bool ok = write_file(mpath, metrics) && write_file(tpath, tasks);
    accnoc_string_free(metrics);
    accnoc_string_free(tasks);
    if (!ok) {
        std::cerr << "accnoc: cannot write outputs under " << out_dir << "\n";
        return static_cast<int>(ACCNOC_ERR_IO);
    }
    double thr = 0, inj = 0, busy = 0, lat = 0, done = 0;
    accnoc_run_metric(run, "throughput_flits_us", &thr);
    accnoc_run_metric(run, "injection_rate_flits_us", &inj);
    accnoc_run_metric(run, "fpga_busy_fraction", &busy);
    accnoc_run_metric(run, "mean_latency_ns", &lat);
    accnoc_run_metric(run, "completions", &done);
    std::printf("completions      %.0f\n", done);
    std::printf("injection rate   %.2f flits/us\n", inj);
    std::printf("throughput       %.2f flits/us\n", thr);
    std::printf("busy fraction    %.1f %%\n", busy * 100.0);
    std::printf("mean latency     %.1f ns\n", lat);
    std::printf("wrote %s and %s\n", mpath.c_str(), tpath.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cycle-level simulator of an FPGA multi-accelerator "
                 "interface on a mesh NoC"};
    app.require_subcommand(1);

    std::string config_path, trace_path, out_dir = ".", axis, values, name;
    long long seed = -1;

    CLI::App* run = app.add_subcommand("run", "simulate one configuration");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--seed", seed, "override the RNG seed");
    run->add_option("--trace", trace_path, "write an event trace here");
    run->add_option("--out", out_dir, "directory for metrics.csv/tasks.csv");

    CLI::App* sweep = app.add_subcommand("sweep", "run one point per value");
    sweep->add_option("config", config_path, "config file")->required();
    sweep->add_option("--axis", axis, "parameter to vary")->required();
    sweep->add_option("--values", values, "comma-separated values")
        ->required();
    sweep->add_option("--seed", seed, "override the RNG seed");
    sweep->add_option("--out", out_dir, "directory for sweep.csv");

    CLI::App* suite = app.add_subcommand(
        "suite", "run a scripted experiment and check its criteria");
    suite->add_option("name", name,
                      "tb_count | throughput | chaining | bus_compare | "
                      "cache_compare")
        ->required();
    suite->add_option("--seed", seed, "RNG seed (default 1)");

    CLI::App* validate =
        app.add_subcommand("validate", "check a config and print problems");
    validate->add_option("config", config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        ConfigGuard guard;
        const int early = load_with_overrides(config_path, seed, trace_path,
                                              guard);
        if (early >= 0)
            return early;
        accnoc_run* r = nullptr;
        accnoc_status st = accnoc_run_simulation(guard.cfg, &r);
        if (st != ACCNOC_OK) {
            if (r)
                accnoc_run_free(r);
            return die(st, "run failed");
        }
        const int rc = emit_run(r, out_dir);
        accnoc_run_free(r);
        return rc;
    }

    if (sweep->parsed()) {
        ConfigGuard guard;
        const int early = load_with_overrides(config_path, seed, trace_path,
                                              guard);
        if (early >= 0)
            return early;
        accnoc_sweep* sw = nullptr;
        accnoc_status st =
            accnoc_sweep_run(guard.cfg, axis.c_str(), values.c_str(), &sw);
        if (st != ACCNOC_OK && !sw)
            return die(st, "sweep failed");
        char* csv = nullptr;
        accnoc_sweep_csv(sw, &csv);
        const std::string path = out_dir + "/sweep.csv";
        const bool ok = write_file(path, csv);
        std::cout << csv;
        accnoc_string_free(csv);
        accnoc_sweep_free(sw);
        if (!ok) {
            std::cerr << "accnoc: cannot write " << path << "\n";
            return static_cast<int>(ACCNOC_ERR_IO);
        }
        std::cout << "wrote " << path << "\n";
        return st == ACCNOC_OK ? 0 : static_cast<int>(st);
    }

    if (suite->parsed()) {
        accnoc_report* rep = nullptr;
        accnoc_status st = accnoc_suite_run(
            name.c_str(), seed < 0 ? 1ull : static_cast<unsigned long long>(
                                                seed),
            &rep);
        if (st != ACCNOC_OK)
            return die(st, "suite failed to run");
        char* text = nullptr;
        accnoc_report_text(rep, &text);
        std::cout << text;
        accnoc_string_free(text);
        const int failures = accnoc_report_failures(rep);
        accnoc_report_free(rep);
        return failures == 0 ? 0 : 1;
    }

    // validate
    ConfigGuard guard;
    accnoc_status st = accnoc_config_load(config_path.c_str(), &guard.cfg);
    if (st == ACCNOC_ERR_IO)
        return die(st, "cannot read " + config_path);
    char* problems = nullptr;
    accnoc_config_problems(guard.cfg, &problems);
    if (problems && problems[0] != '\0') {
        std::cout << problems;
        accnoc_string_free(problems);
        std::cout << "config is INVALID\n";
        return static_cast<int>(ACCNOC_ERR_VALIDATION);
    }
    accnoc_string_free(problems);
    std::cout << "config is valid\n";
    return 0;
}
