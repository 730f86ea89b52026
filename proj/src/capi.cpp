#include "accnoc/accnoc.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "suites.hpp"
#include "system.hpp"

using namespace accnoc;

struct accnoc_config {
    SimConfig cfg;
    std::vector<std::string> problems;
};

struct accnoc_run {
    RunOutput out;
};

struct accnoc_sweep {
    SweepResult result;
};

struct accnoc_report {
    SuiteReport report;
};

namespace {

thread_local std::string g_last_error;

accnoc_status fail(accnoc_status st, const std::string& msg) {
    g_last_error = msg;
    return st;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

} // namespace

extern "C" {

const char* accnoc_version(void) { return "1.0.0"; }

const char* accnoc_last_error(void) { return g_last_error.c_str(); }

void accnoc_string_free(char* s) { delete[] s; }

accnoc_status accnoc_config_load(const char* path, accnoc_config** out) {
    if (!path || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    ParsedConfig pc = load_config(path);
    if (!pc.errors.empty() && pc.errors.front().rfind("cannot open", 0) == 0)
        return fail(ACCNOC_ERR_IO, pc.errors.front());
    auto* handle = new accnoc_config{std::move(pc.config),
                                     std::move(pc.errors)};
    *out = handle;
    if (!handle->problems.empty())
        return fail(ACCNOC_ERR_VALIDATION, join(handle->problems));
    return ACCNOC_OK;
}

accnoc_status accnoc_config_parse(const char* text, accnoc_config** out) {
    if (!text || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    ParsedConfig pc = parse_config(text);
    auto* handle = new accnoc_config{std::move(pc.config),
                                     std::move(pc.errors)};
    *out = handle;
    if (!handle->problems.empty())
        return fail(ACCNOC_ERR_VALIDATION, join(handle->problems));
    return ACCNOC_OK;
}

accnoc_status accnoc_config_set(accnoc_config* cfg, const char* key,
                                const char* value) {
    if (!cfg || !key || !value)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    std::string err;
    if (!apply_override(cfg->cfg, key, value, &err))
        return fail(ACCNOC_ERR_UNKNOWN, err);
    cfg->problems = cfg->cfg.validate();
    return ACCNOC_OK;
}

accnoc_status accnoc_config_problems(const accnoc_config* cfg, char** out) {
    if (!cfg || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = dup_string(join(cfg->problems));
    return ACCNOC_OK;
}

void accnoc_config_free(accnoc_config* cfg) { delete cfg; }

accnoc_status accnoc_run_simulation(const accnoc_config* cfg,
                                    accnoc_run** out) {
    if (!cfg || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    if (!cfg->problems.empty())
        return fail(ACCNOC_ERR_VALIDATION, join(cfg->problems));
    auto* run = new accnoc_run{};
    try {
        run->out = run_simulation(cfg->cfg);
    } catch (const SimError& e) {
        delete run;
        return fail(ACCNOC_ERR_RUNTIME, e.what());
    }
    *out = run;
    if (!run->out.error.empty())
        return fail(ACCNOC_ERR_RUNTIME, run->out.error);
    return ACCNOC_OK;
}

accnoc_status accnoc_run_metric(const accnoc_run* run, const char* name,
                                double* out) {
    if (!run || !name || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    bool found = false;
    *out = run->out.metrics.metric(name, &found);
    if (!found)
        return fail(ACCNOC_ERR_UNKNOWN,
                    std::string("unknown metric '") + name + "'");
    return ACCNOC_OK;
}

accnoc_status accnoc_run_metrics_csv(const accnoc_run* run, char** out) {
    if (!run || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = dup_string(RunMetrics::metrics_csv_header() + "\n" +
                      run->out.metrics.metrics_csv() + "\n");
    return ACCNOC_OK;
}

accnoc_status accnoc_run_task_log_csv(const accnoc_run* run, char** out) {
    if (!run || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = dup_string(run->out.task_csv);
    return ACCNOC_OK;
}

void accnoc_run_free(accnoc_run* run) { delete run; }

accnoc_status accnoc_sweep_run(const accnoc_config* cfg, const char* axis,
                               const char* values, accnoc_sweep** out) {
    if (!cfg || !axis || !values || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    if (!cfg->problems.empty())
        return fail(ACCNOC_ERR_VALIDATION, join(cfg->problems));
    std::vector<std::string> vals;
    std::string cur;
    for (const char* p = values;; ++p) {
        if (*p == ',' || *p == '\0') {
            if (!cur.empty())
                vals.push_back(cur);
            cur.clear();
            if (*p == '\0')
                break;
        } else if (*p != ' ') {
            cur += *p;
        }
    }
    if (vals.empty())
        return fail(ACCNOC_ERR_ARGUMENT, "empty value list");
    try {
        // validate the axis up front so a typo fails fast
        SimConfig probe = cfg->cfg;
        apply_axis(probe, axis, vals.front());
        auto* sweep = new accnoc_sweep{run_sweep(cfg->cfg, axis, vals)};
        *out = sweep;
        for (const auto& p : sweep->result.points)
            if (!p.error.empty())
                return fail(ACCNOC_ERR_RUNTIME,
                            "value " + p.value + ": " + p.error);
        return ACCNOC_OK;
    } catch (const ConfigError& e) {
        return fail(ACCNOC_ERR_UNKNOWN, e.what());
    }
}

accnoc_status accnoc_sweep_csv(const accnoc_sweep* sweep, char** out) {
    if (!sweep || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = dup_string(sweep->result.csv());
    return ACCNOC_OK;
}

void accnoc_sweep_free(accnoc_sweep* sweep) { delete sweep; }

accnoc_status accnoc_suite_run(const char* name, unsigned long long seed,
                               accnoc_report** out) {
    if (!name || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    try {
        auto* rep = new accnoc_report{run_suite(name, seed)};
        *out = rep;
        return ACCNOC_OK;
    } catch (const ConfigError& e) {
        return fail(ACCNOC_ERR_UNKNOWN, e.what());
    } catch (const SimError& e) {
        return fail(ACCNOC_ERR_RUNTIME, e.what());
    }
}

accnoc_status accnoc_report_text(const accnoc_report* report, char** out) {
    if (!report || !out)
        return fail(ACCNOC_ERR_ARGUMENT, "null argument");
    *out = dup_string(report->report.text());
    return ACCNOC_OK;
}

int accnoc_report_failures(const accnoc_report* report) {
    return report ? report->report.failures : -1;
}

void accnoc_report_free(accnoc_report* report) { delete report; }

} // extern "C"
