#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bus.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "endpoints.hpp"
#include "interface.hpp"
#include "metrics.hpp"
#include "noc.hpp"
#include "shared_cache.hpp"

namespace accnoc {

struct RunOutput {
    RunMetrics metrics;
    std::string task_csv;
    std::string error; // nonempty on watchdog timeout / protocol violation
    bool ok() const { return error.empty(); }
};

// One fully wired simulation instance. Independent instances are safe to
// run on separate threads.
class SystemModel {
public:
    explicit SystemModel(const SimConfig& cfg);
    ~SystemModel();

    RunOutput run();

    // direct access for micro-benchmarks and unit tests
    Simulator& sim() { return sim_; }
    const SimConfig& config() const { return cfg_; }
    Channel& channel(std::size_t i) { return *channels_[i]; }
    std::size_t channel_count() const { return channels_.size(); }
    PacketReceiver& receiver() { return *pr_; }
    PacketSender& sender() { return *ps_; }
    Processor& processor(std::size_t i) { return *procs_[i]; }
    std::size_t processor_count() const { return procs_.size(); }
    MemoryNode* memory_node() { return mmu_.get(); }
    Stats& stats() { return stats_; }
    TaskLog& task_log() { return log_; }
    NocCounters& noc_counters() { return counters_; }
    Mesh* mesh() { return mesh_.get(); }

    bool quiet() const;
    void finalize(RunOutput& out); // metrics + data check, callable once

private:
    class FpgaPort : public LocalPort {
    public:
        FpgaPort(AsyncFifo<FlitEnv>* tx, AsyncFifo<FlitEnv>* rx)
            : tx_(tx), rx_(rx) {}
        const FlitEnv* peek_tx(TimePs now) override { return tx_->peek(now); }
        void pull_tx(TimePs now) override { tx_->pop(now); }
        bool rx_ready(TimePs) const override { return !rx_->full(); }
        void rx_push(TimePs now, FlitEnv flit) override {
            rx_->push(now, std::move(flit));
        }

    private:
        AsyncFifo<FlitEnv>* tx_;
        AsyncFifo<FlitEnv>* rx_;
    };

    void build();
    void check_data(RunOutput& out);
    std::uint64_t progress_marker() const;

    SimConfig cfg_;
    Simulator sim_;
    Stats stats_;
    Stats warm_stats_;
    NocCounters counters_;
    NocCounters warm_counters_;
    TaskLog log_;
    AddressMap addr_;
    std::uint64_t task_seq_ = 0;
    std::uint32_t packet_seq_ = 1;
    std::uint64_t expected_completions_ = 0;
    bool finalized_ = false;

    std::unique_ptr<AsyncFifo<FlitEnv>> router_out_; // noc -> interface
    std::unique_ptr<AsyncFifo<FlitEnv>> router_in_;  // interface -> noc
    std::unique_ptr<FpgaPort> fpga_port_;
    std::vector<std::unique_ptr<Channel>> channels_;
    std::unique_ptr<PacketReceiver> pr_;
    std::unique_ptr<PacketSender> ps_;
    std::unique_ptr<InterfaceProbe> probe_;
    std::unique_ptr<SharedCache> cache_;
    std::unique_ptr<Mesh> mesh_;
    std::unique_ptr<SharedBus> bus_;
    std::vector<std::unique_ptr<Processor>> procs_;
    std::unique_ptr<MemoryNode> mmu_;
};

RunOutput run_simulation(const SimConfig& cfg);

} // namespace accnoc
