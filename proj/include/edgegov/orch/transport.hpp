#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "edgegov/sim/stressor.hpp"

namespace edgegov::orch {

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The SUT refused a configuration (cpufreq-set failed).
class ConfigRejected : public TransportError {
public:
    using TransportError::TransportError;
};

/// The SUT did not answer in time.
class TransportTimeout : public TransportError {
public:
    using TransportError::TransportError;
};

struct StressorMetrics {
    double bogo_ops_per_sec{0.0};
};

/// Control surface of one system under test. Calls are strictly sequential.
class SutTransport {
public:
    virtual ~SutTransport() = default;

    virtual std::string name() const = 0;
    /// Applies the rung to all cores. Throws ConfigRejected.
    virtual void apply_config(core::NodeConfig config) = 0;
    virtual void wait(double seconds) = 0;
    /// Runs the stressor to completion. load_pct = 0 measures idle.
    virtual void invoke_stressor(int load_pct, double duration, std::uint64_t seed) = 0;
    /// Power meter reading for the last stressor run, in watts.
    virtual double read_power() = 0;
    virtual StressorMetrics read_metrics() = 0;
};

/// In-process transport bound to a simulated node. No I/O; waits only
/// accumulate virtual time.
class LoopbackTransport final : public SutTransport {
public:
    explicit LoopbackTransport(sim::DeviceProfile profile) : node_(std::move(profile)) {}

    std::string name() const override { return "loopback:" + node_.profile().name(); }
    void apply_config(core::NodeConfig config) override;
    void wait(double seconds) override { waited_ += seconds; }
    void invoke_stressor(int load_pct, double duration, std::uint64_t seed) override;
    double read_power() override;
    StressorMetrics read_metrics() override;

    const sim::SimulatedNode& node() const { return node_; }
    double waited() const { return waited_; }
    const sim::StressorReport& last_report() const;

private:
    sim::SimulatedNode node_;
    std::optional<sim::StressorReport> last_;
    double waited_{0.0};
};

}  // namespace edgegov::orch
