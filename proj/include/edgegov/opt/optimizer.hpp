#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edgegov/core/stream_model.hpp"
#include "edgegov/fit/power_model.hpp"
#include "edgegov/sim/device_profile.hpp"
#include "edgegov/sim/governor.hpp"
#include "json.hpp"

namespace edgegov::opt {

/// What the optimizer needs to know about one rung.
struct RungCharacteristics {
    core::NodeConfig config;
    double throughput{0.0};
    core::PowerDraw p_full;
    core::PowerDraw p_idle;
};

std::vector<RungCharacteristics> characterize(const fit::PowerModel& model);
std::vector<RungCharacteristics> characterize(const sim::DeviceProfile& profile);

struct OptimizationResult {
    core::StreamSpec stream;
    std::optional<core::SchedulePlan> best;  // empty when no rung keeps up
    std::vector<core::PlanResult> per_rung;

    bool feasible() const { return best.has_value(); }
};

/// Exhaustive search over the rungs for the feasible plan with the lowest
/// average power; ties go to the lower frequency.
OptimizationResult optimize(const std::vector<RungCharacteristics>& rungs, const core::StreamSpec& stream);
OptimizationResult optimize(const fit::PowerModel& model, const core::StreamSpec& stream);
OptimizationResult optimize(const sim::DeviceProfile& profile, const core::StreamSpec& stream);

struct SweepCell {
    double d{0.0};
    double k{0.0};
    OptimizationResult result;
};

/// Cartesian sweep, d outer and k inner. Cells are evaluated in parallel;
/// output order is fixed.
std::vector<SweepCell> sweep(const std::vector<RungCharacteristics>& rungs, const std::vector<double>& d_values,
                             const std::vector<double>& k_values);

inline constexpr std::string_view kSweepHeader = "d_s,k_bops,best_freq_khz,avg_power_w,energy_per_token_j,feasible";

/// Infeasible rows carry empty numeric fields and feasible=false.
std::string sweep_to_csv(const std::vector<SweepCell>& cells);

struct GovernorRow {
    std::string policy;
    double energy{0.0};
    std::size_t backlog_max{0};
    std::size_t dropped{0};
    double avg_freq_khz{0.0};
};

struct GovernorComparison {
    std::vector<GovernorRow> rows;
    std::optional<core::SchedulePlan> optimal;  // best static plan
    std::optional<double> baseline_energy;      // n_tokens * optimal energy per token

    nlohmann::json to_json() const;
};

/// The six governors with their default tunables; userspace is pinned to `pin`.
std::vector<sim::GovernorPolicy> default_policies(Kilohertz pin);

/// Simulates each policy over the noise-free profile and reports energy and
/// backlog against the optimal static plan.
GovernorComparison compare_governors(const sim::DeviceProfile& profile, const core::StreamSpec& stream,
                                     std::size_t n_tokens, const std::vector<sim::GovernorPolicy>& policies,
                                     std::size_t queue_capacity = 16);

}  // namespace edgegov::opt
