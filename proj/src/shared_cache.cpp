#include "shared_cache.hpp"

namespace accnoc {

SharedCache::SharedCache(Params params, Stats* stats)
    : p_(params), stats_(stats) {
    const std::size_t lines =
        p_.size_bytes / static_cast<std::size_t>(p_.line_bytes);
    sets_ = lines / static_cast<std::size_t>(p_.ways);
    if (sets_ == 0)
        sets_ = 1;
    tags_.assign(sets_, std::vector<Way>(static_cast<std::size_t>(p_.ways)));
}

void SharedCache::access(TimePs now, bool write, std::uint64_t addr,
                         std::size_t bytes, std::function<void(TimePs)> cb) {
    const auto line = static_cast<std::uint64_t>(p_.line_bytes);
    const std::uint64_t first = addr / line;
    const std::uint64_t last = bytes == 0 ? first : (addr + bytes - 1) / line;
    const std::uint64_t id = next_batch_++;
    batches_[id] = Batch{static_cast<int>(last - first + 1), std::move(cb)};
    for (std::uint64_t l = first; l <= last; ++l)
        queue_.push_back(LineReq{write, l * line, id});
    (void)now;
}

bool SharedCache::lookup(std::uint64_t line_addr) {
    const std::uint64_t idx =
        (line_addr / static_cast<std::uint64_t>(p_.line_bytes)) % sets_;
    auto& set = tags_[static_cast<std::size_t>(idx)];
    ++lru_clock_;
    for (auto& w : set) {
        if (w.valid && w.tag == line_addr) {
            w.lru = lru_clock_;
            return true;
        }
    }
    // miss: fill the LRU way
    Way* victim = &set[0];
    for (auto& w : set) {
        if (!w.valid) {
            victim = &w;
            break;
        }
        if (w.lru < victim->lru)
            victim = &w;
    }
    victim->valid = true;
    victim->tag = line_addr;
    victim->lru = lru_clock_;
    return false;
}

void SharedCache::tick(std::int64_t) {
    const TimePs now = sim().now();
    if (busy_until_ > now || queue_.empty())
        return;
    LineReq req = queue_.front();
    queue_.pop_front();
    const bool hit = lookup(req.line_addr);
    const TimePs period = clock().period_ps;
    TimePs done;
    if (hit) {
        ++hits_;
        if (stats_)
            ++stats_->cache_hits;
        done = now + p_.hit_cycles * period;
    } else {
        ++misses_;
        if (stats_)
            ++stats_->cache_misses;
        done = now + (p_.hit_cycles + p_.miss_cycles) * period;
        busy_until_ = done; // a miss occupies the port
    }
    const std::uint64_t id = req.batch;
    sim().schedule(done, this->id(), [this, id, done] {
        auto it = batches_.find(id);
        if (it == batches_.end())
            return;
        if (--it->second.outstanding == 0) {
            auto cb = std::move(it->second.cb);
            batches_.erase(it);
            if (cb)
                cb(done);
        }
    });
}

void SharedCache::write_bytes(std::uint64_t addr,
                              const std::vector<std::uint8_t>& data) {
    for (std::size_t i = 0; i < data.size(); ++i)
        store_[addr + i] = data[i];
}

std::vector<std::uint8_t> SharedCache::read_bytes(std::uint64_t addr,
                                                  std::size_t len) const {
    std::vector<std::uint8_t> out(len, 0);
    for (std::size_t i = 0; i < len; ++i) {
        auto it = store_.find(addr + i);
        if (it != store_.end())
            out[i] = it->second;
    }
    return out;
}

} // namespace accnoc
