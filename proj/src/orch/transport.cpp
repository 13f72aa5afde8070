#include "edgegov/orch/transport.hpp"

#include "edgegov/errors.hpp"

namespace edgegov::orch {

void LoopbackTransport::apply_config(core::NodeConfig config) {
    try {
        node_.apply(config.freq);
    } catch (const DomainError& e) {
        throw ConfigRejected(e.what());
    }
}

void LoopbackTransport::invoke_stressor(int load_pct, double duration, std::uint64_t seed) {
    last_ = node_.stress(load_pct, duration, seed);
}

const sim::StressorReport& LoopbackTransport::last_report() const {
    if (!last_) throw TransportError("no stressor run yet");
    return *last_;
}

double LoopbackTransport::read_power() { return last_report().power; }

StressorMetrics LoopbackTransport::read_metrics() { return {last_report().bogo_ops_per_sec}; }

}  // namespace edgegov::orch
