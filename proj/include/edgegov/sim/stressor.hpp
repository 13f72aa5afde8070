#pragma once

#include <cstdint>

#include "edgegov/sim/device_profile.hpp"

namespace edgegov::sim {

/// What one stress-ng style run reports, plus the metered power.
struct StressorReport {
    core::NodeConfig config;
    int load_pct{0};
    double duration{0.0};
    double bogo_ops_per_sec{0.0};
    double power{0.0};
};

/// Expected bogo-ops/s at a load: throughput_at(f) * load / 100.
double expected_bogo_ops(const DeviceProfile& profile, core::NodeConfig config, int load_pct);
/// Expected power at a load: affine between p_idle (0 %) and p_full (100 %).
double expected_power(const DeviceProfile& profile, core::NodeConfig config, int load_pct);

/// Runs a synthetic stressor on every virtual core at `load_pct` percent.
/// Both readings get independent multiplicative Gaussian noise with relative
/// sd profile.noise_sd(); the result depends only on the arguments.
/// load_pct = 0 measures the idle draw.
StressorReport run_stressor(const DeviceProfile& profile, core::NodeConfig config, int load_pct,
                            double duration, std::uint64_t seed);

/// A single simulated SUT: holds the currently applied rung.
class SimulatedNode {
public:
    explicit SimulatedNode(DeviceProfile profile)
        : profile_(std::move(profile)), current_{profile_.ladder().highest()} {}

    const DeviceProfile& profile() const { return profile_; }
    core::NodeConfig current() const { return current_; }

    /// Applies the rung to all cores; on rejection the previous rung stays.
    core::NodeConfig apply(Kilohertz freq) {
        current_ = set_frequency(profile_, freq);
        return current_;
    }

    StressorReport stress(int load_pct, double duration, std::uint64_t seed) const {
        return run_stressor(profile_, current_, load_pct, duration, seed);
    }

private:
    DeviceProfile profile_;
    core::NodeConfig current_;
};

}  // namespace edgegov::sim
