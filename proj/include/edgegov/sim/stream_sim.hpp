#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "edgegov/sim/device_profile.hpp"
#include "edgegov/sim/governor.hpp"

namespace edgegov::sim {

struct TokenRecord {
    std::size_t index{0};
    double arrival_time{0.0};
    double start_time{0.0};
    double finish_time{0.0};
    Kilohertz freq_used;
};

struct StreamTrace {
    std::vector<TokenRecord> tokens;  // processed tokens only, in FIFO order
    double energy{0.0};               // joules over [0, max(n*d, last finish)]
    double horizon{0.0};
    std::size_t backlog_max{0};       // most tokens waiting (not in service) at once
    std::size_t dropped{0};

    /// Mean rung over processed tokens, in kHz.
    double avg_freq_khz() const;
};

/// Either a governor or a pinned rung.
using FrequencyControl = std::variant<GovernorPolicy, core::NodeConfig>;

/// Event-driven single-server FIFO simulation of `n_tokens` tokens arriving
/// every stream.d seconds starting at t = 0.
///
/// Tokens run to completion at the rung chosen when they start. A governor
/// is consulted once per token start with utilization
/// min(100, 100 * k / (d * throughput_at(current))); it starts on the top
/// rung. Arrivals finding `queue_capacity` tokens already waiting are
/// dropped. Busy time draws p_full of the token's rung, idle time draws
/// p_idle of the rung most recently applied. Noise is not applied.
StreamTrace simulate_stream(const DeviceProfile& profile, const FrequencyControl& control,
                            const core::StreamSpec& stream, std::size_t n_tokens, std::size_t queue_capacity);

}  // namespace edgegov::sim
