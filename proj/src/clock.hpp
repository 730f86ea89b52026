#pragma once

#include <cassert>

#include "types.hpp"

namespace accnoc {

// A free-running clock: tick k fires at phase_ps + k*period_ps.
struct ClockDomain {
    TimePs period_ps = 1000;
    TimePs phase_ps = 0;

    bool operator==(const ClockDomain&) const = default;

    TimePs tick_time(std::int64_t k) const { return phase_ps + k * period_ps; }

    // Largest k with tick_time(k) <= t. Valid for t >= phase_ps.
    std::int64_t tick_at(TimePs t) const {
        assert(t >= phase_ps);
        return (t - phase_ps) / period_ps;
    }

    // Time of the first tick strictly after t.
    TimePs next_tick_after(TimePs t) const {
        if (t < phase_ps)
            return phase_ps;
        return tick_time(tick_at(t) + 1);
    }
};

// When a signal produced at `event_time` in one domain is observable in
// `to`: same domain sees it the same instant (status tables are recomputed
// every cycle); different domains see it at the second destination edge
// strictly after the event (two-stage register synchronizer).
inline TimePs visible_in(const ClockDomain& from, const ClockDomain& to,
                         TimePs event_time) {
    if (from == to)
        return event_time;
    const TimePs first = to.next_tick_after(event_time);
    return first + to.period_ps;
}

} // namespace accnoc
