#pragma once

#include <string>
#include <variant>

#include "edgegov/core/stream_model.hpp"

namespace edgegov::sim {

// cpufreq governor policies.
namespace governor {

struct Performance {};
struct Powersave {};
struct Userspace {
    Kilohertz fixed;
};
struct Ondemand {
    double up_threshold{80.0};
};
struct Conservative {
    double up_threshold{80.0};
    double down_threshold{20.0};
};
struct Schedutil {
    double headroom{1.25};
};

}  // namespace governor

using GovernorPolicy = std::variant<governor::Performance, governor::Powersave, governor::Userspace,
                                    governor::Ondemand, governor::Conservative, governor::Schedutil>;

/// Throws DomainError on thresholds outside (0, 100], down >= up, or headroom < 1.
void validate(const GovernorPolicy& policy);

std::string policy_name(const GovernorPolicy& policy);

/// Parses "performance", "powersave", "userspace:<khz>", "ondemand[:up]",
/// "conservative[:up:down]" and "schedutil[:headroom]".
GovernorPolicy parse_policy(const std::string& text);

/// One governor decision. `utilization` is the busy percentage at the
/// current rung. Ondemand picks the lowest rung whose share of top-rung
/// throughput covers the utilization; throughput is linear in frequency so
/// the share is f / f_top.
core::NodeConfig governor_step(const GovernorPolicy& policy, core::NodeConfig current, double utilization,
                               const core::FrequencyLadder& ladder);

}  // namespace edgegov::sim
