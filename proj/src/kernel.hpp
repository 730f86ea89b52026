#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "clock.hpp"
#include "types.hpp"

namespace accnoc {

// Streams one line per dispatched event ("time_ps component event") and
// folds every line into a running FNV-1a hash so deterministic replay can
// be asserted even when no file sink is attached.
class Trace {
public:
    void enable_lines() { keep_lines_ = true; }
    bool open_file(const std::string& path);
    void emit(TimePs t, const std::string& component, const std::string& event);
    std::uint64_t hash() const { return hash_; }
    const std::vector<std::string>& lines() const { return lines_; }
    std::uint64_t events() const { return events_; }

private:
    std::uint64_t hash_ = 1469598103934665603ull;
    std::uint64_t events_ = 0;
    bool keep_lines_ = false;
    std::vector<std::string> lines_;
    std::unique_ptr<std::ofstream> file_;
};

class Simulator;

// A clocked model. tick() is called once per edge of the component's
// domain, in (time, component_id) order.
class Component {
public:
    virtual ~Component() = default;
    virtual void tick(std::int64_t tick_index) = 0;

    const std::string& name() const { return name_; }
    const ClockDomain& clock() const { return clock_; }
    int id() const { return id_; }
    Simulator& sim() const { return *sim_; }

private:
    friend class Simulator;
    Simulator* sim_ = nullptr;
    std::string name_;
    ClockDomain clock_;
    int id_ = -1;
};

// Deterministic discrete-event engine. Events fire in nondecreasing time;
// ties break by (component_id, sequence_number).
class Simulator {
public:
    explicit Simulator(std::uint64_t seed = 1);

    TimePs now() const { return now_; }

    // comp < 0 means "kernel"; throws SimError("TimeTravel") if t < now().
    void schedule(TimePs t, int comp, std::function<void()> fn);

    // Registers a clocked component; first tick at clock.phase_ps.
    void add_component(Component* c, std::string name, ClockDomain clock);

    // Dispatches every event with time <= t_end (or until stop()).
    TimePs run_until(TimePs t_end);

    void request_stop() { stop_ = true; }
    bool stopped() const { return stop_; }

    Trace& trace() { return trace_; }
    void set_trace_enabled(bool on) { trace_on_ = on; }
    bool trace_enabled() const { return trace_on_; }
    void trace_event(const Component& c, const std::string& event) {
        if (trace_on_)
            trace_.emit(now_, c.name(), event);
    }
    void trace_event(const std::string& component, const std::string& event) {
        if (trace_on_)
            trace_.emit(now_, component, event);
    }

    std::mt19937_64& rng() { return rng_; }
    // Stable per-agent stream so adding agents does not shift others.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

    std::uint64_t scheduled_count() const { return scheduled_; }
    std::uint64_t dispatched_count() const { return dispatched_; }
    std::uint64_t pending_count() const { return queue_.size(); }

private:
    // Recurring component ticks carry (tick_of, tick_k) instead of a
    // closure; one-shot events use fn.
    struct Event {
        TimePs t;
        int comp;
        std::uint64_t seq;
        Component* tick_of = nullptr;
        std::int64_t tick_k = 0;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t)
                return a.t > b.t;
            if (a.comp != b.comp)
                return a.comp > b.comp;
            return a.seq > b.seq;
        }
    };

    void schedule_tick(Component* c, std::int64_t k);

    TimePs now_ = 0;
    bool stop_ = false;
    std::uint64_t seq_ = 0;
    std::uint64_t scheduled_ = 0;
    std::uint64_t dispatched_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::vector<Component*> components_;
    Trace trace_;
    bool trace_on_ = false;
    std::mt19937_64 rng_;
};

} // namespace accnoc
