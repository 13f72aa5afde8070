#include "edgegov/sim/stressor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "edgegov/errors.hpp"

namespace edgegov::sim {

namespace {

void check_load(int load_pct) {
    if (load_pct < 0 || load_pct > 100) throw DomainError("load_pct", "must lie in [0, 100]");
}

}  // namespace

double expected_bogo_ops(const DeviceProfile& profile, core::NodeConfig config, int load_pct) {
    check_load(load_pct);
    return profile.throughput_at(config.freq) * load_pct / 100.0;
}

double expected_power(const DeviceProfile& profile, core::NodeConfig config, int load_pct) {
    check_load(load_pct);
    if (load_pct == 100) return profile.p_full_at(config.freq);
    const double idle = profile.p_idle_at(config.freq);
    return idle + (profile.p_full_at(config.freq) - idle) * load_pct / 100.0;
}

StressorReport run_stressor(const DeviceProfile& profile, core::NodeConfig config, int load_pct,
                            double duration, std::uint64_t seed) {
    check_load(load_pct);
    if (!(std::isfinite(duration) && duration > 0.0)) throw DomainError("duration", "must be finite and > 0");
    profile.ladder().index_of(config.freq);

    StressorReport r{config, load_pct, duration, expected_bogo_ops(profile, config, load_pct),
                     expected_power(profile, config, load_pct)};
    if (profile.noise_sd() > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> z(0.0, profile.noise_sd());
        r.bogo_ops_per_sec = std::max(0.0, r.bogo_ops_per_sec * (1.0 + z(rng)));
        r.power = std::max(0.0, r.power * (1.0 + z(rng)));
    }
    return r;
}

}  // namespace edgegov::sim
