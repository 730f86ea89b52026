#pragma once

#include <deque>
#include <optional>

#include "clock.hpp"
#include "types.hpp"

namespace accnoc {

// Register FIFO inside one clock domain: an entry written at edge t is
// readable from edge t + 1 onward.
template <typename T>
class SyncFifo {
public:
    SyncFifo() = default;
    SyncFifo(ClockDomain domain, std::size_t capacity)
        : domain_(domain), capacity_(capacity) {}

    bool full() const { return entries_.size() >= capacity_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }

    bool push(TimePs t, T v) {
        if (full())
            return false;
        entries_.push_back(Entry{std::move(v), t + domain_.period_ps});
        return true;
    }

    const T* peek(TimePs t) const {
        if (entries_.empty() || entries_.front().visible > t)
            return nullptr;
        return &entries_.front().value;
    }

    std::optional<T> pop(TimePs t) {
        if (entries_.empty() || entries_.front().visible > t)
            return std::nullopt;
        T v = std::move(entries_.front().value);
        entries_.pop_front();
        return v;
    }

private:
    struct Entry {
        T value;
        TimePs visible;
    };
    ClockDomain domain_;
    std::size_t capacity_ = 16;
    std::deque<Entry> entries_;
};

// Clock-domain-crossing FIFO. An entry written at source edge t becomes
// readable at the second read-domain edge strictly after t (two-stage
// synchronizer); FIFO order is preserved and capacity never exceeded.
template <typename T>
class AsyncFifo {
public:
    AsyncFifo() = default;
    AsyncFifo(ClockDomain write_domain, ClockDomain read_domain,
              std::size_t capacity)
        : write_(write_domain), read_(read_domain), capacity_(capacity) {}

    const ClockDomain& write_domain() const { return write_; }
    const ClockDomain& read_domain() const { return read_; }

    bool full() const { return entries_.size() >= capacity_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }

    bool push(TimePs t, T v) {
        if (full())
            return false;
        const TimePs first = read_.next_tick_after(t);
        entries_.push_back(Entry{std::move(v), first + read_.period_ps});
        return true;
    }

    const T* peek(TimePs t) const {
        if (entries_.empty() || entries_.front().visible > t)
            return nullptr;
        return &entries_.front().value;
    }

    std::optional<T> pop(TimePs t) {
        if (entries_.empty() || entries_.front().visible > t)
            return std::nullopt;
        T v = std::move(entries_.front().value);
        entries_.pop_front();
        return v;
    }

    TimePs head_visible_at() const {
        return entries_.empty() ? -1 : entries_.front().visible;
    }

private:
    struct Entry {
        T value;
        TimePs visible;
    };
    ClockDomain write_;
    ClockDomain read_;
    std::size_t capacity_ = 16;
    std::deque<Entry> entries_;
};

// Link FIFO that picks register semantics within one clock domain and the
// two-stage-synchronizer rule across domains.
template <typename T>
class CdcFifo {
public:
    CdcFifo() = default;
    CdcFifo(ClockDomain write_domain, ClockDomain read_domain,
            std::size_t capacity)
        : is_sync_(write_domain == read_domain),
          sync_(write_domain, capacity),
          async_(write_domain, read_domain, capacity) {}

    bool full() const { return is_sync_ ? sync_.full() : async_.full(); }
    bool empty() const { return is_sync_ ? sync_.empty() : async_.empty(); }
    std::size_t size() const { return is_sync_ ? sync_.size() : async_.size(); }

    bool push(TimePs t, T v) {
        return is_sync_ ? sync_.push(t, std::move(v))
                        : async_.push(t, std::move(v));
    }
    const T* peek(TimePs t) const {
        return is_sync_ ? sync_.peek(t) : async_.peek(t);
    }
    std::optional<T> pop(TimePs t) {
        return is_sync_ ? sync_.pop(t) : async_.pop(t);
    }

private:
    bool is_sync_ = true;
    SyncFifo<T> sync_;
    AsyncFifo<T> async_;
};

// Packet-granular FIFO used for the channel command/result queues. A packet
// with n payload flits written at time t surfaces at the read side 4+n read
// cycles later, matching the measured buffer fall-through latency; the
// constant absorbs the internal synchronizer when the domains differ.
template <typename T>
class PacketBuffer {
public:
    PacketBuffer() = default;
    PacketBuffer(ClockDomain write_domain, ClockDomain read_domain,
                 std::size_t capacity)
        : write_(write_domain), read_(read_domain), capacity_(capacity) {}

    bool full() const { return entries_.size() >= capacity_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }

    bool push(TimePs t, T v, int payload_flits) {
        if (full())
            return false;
        // Cross-domain writes align to the first read edge at or after t.
        const TimePs base = write_ == read_ ? t : read_.next_tick_after(t - 1);
        // fall-through: 4 + payload_flits read cycles after the write
        entries_.push_back(
            Entry{std::move(v), base + (4 + payload_flits) * read_.period_ps});
        return true;
    }

    const T* peek(TimePs t) const {
        if (entries_.empty() || entries_.front().visible > t)
            return nullptr;
        return &entries_.front().value;
    }

    std::optional<T> pop(TimePs t) {
        if (entries_.empty() || entries_.front().visible > t)
            return std::nullopt;
        T v = std::move(entries_.front().value);
        entries_.pop_front();
        return v;
    }

private:
    struct Entry {
        T value;
        TimePs visible;
    };
    ClockDomain write_;
    ClockDomain read_;
    std::size_t capacity_ = 4;
    std::deque<Entry> entries_;
};

} // namespace accnoc
