#include "kernel.hpp"

namespace accnoc {

bool Trace::open_file(const std::string& path) {
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) {
        file_.reset();
        return false;
    }
    return true;
}

void Trace::emit(TimePs t, const std::string& component,
                 const std::string& event) {
    std::string line = std::to_string(t);
    line += ' ';
    line += component;
    line += ' ';
    line += event;
    for (unsigned char c : line)
        hash_ = (hash_ ^ c) * 1099511628211ull;
    hash_ = (hash_ ^ '\n') * 1099511628211ull;
    ++events_;
    if (file_)
        *file_ << line << '\n';
    if (keep_lines_)
        lines_.push_back(std::move(line));
}

Simulator::Simulator(std::uint64_t seed) : rng_(seed) {}

std::uint64_t Simulator::derive_seed(std::uint64_t base, std::uint64_t salt) {
    // splitmix64 over (base, salt)
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void Simulator::schedule(TimePs t, int comp, std::function<void()> fn) {
    if (t < now_)
        throw SimError("TimeTravel: schedule at " + std::to_string(t) +
                       " before now " + std::to_string(now_));
    ++scheduled_;
    queue_.push(Event{t, comp, seq_++, nullptr, 0, std::move(fn)});
}

void Simulator::add_component(Component* c, std::string name,
                              ClockDomain clock) {
    c->sim_ = this;
    c->name_ = std::move(name);
    c->clock_ = clock;
    c->id_ = static_cast<int>(components_.size());
    components_.push_back(c);
    schedule_tick(c, 0);
}

void Simulator::schedule_tick(Component* c, std::int64_t k) {
    ++scheduled_;
    queue_.push(Event{c->clock_.tick_time(k), c->id_, seq_++, c, k, {}});
}

TimePs Simulator::run_until(TimePs t_end) {
    while (!stop_ && !queue_.empty() && queue_.top().t <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.t;
        ++dispatched_;
        if (ev.tick_of) {
            ev.tick_of->tick(ev.tick_k);
            schedule_tick(ev.tick_of, ev.tick_k + 1);
        } else {
            ev.fn();
        }
    }
    if (!stop_ && now_ < t_end)
        now_ = t_end;
    return now_;
}

} // namespace accnoc
