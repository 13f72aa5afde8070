#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "edgegov/units.hpp"

namespace edgegov::orch {

/// `cpufreq-set -r -f <khz>`
std::string cpufreq_set_command(Kilohertz freq);

/// `stress-ng --cpu 0 --cpu-load <u> --timeout <t>s --metrics-brief`, or
/// `sleep <t>` for the idle cell (u = 0).
std::string stressor_command(int load_pct, double duration);

struct ParsedCommand {
    enum class Kind { cpufreq_set, stress_ng, sleep, unknown } kind{Kind::unknown};
    Kilohertz freq;
    int load_pct{100};
    double timeout{0.0};
};

ParsedCommand parse_command(std::string_view command);

/// Renders a `--metrics-brief` summary table for the cpu stressor.
std::string format_metrics_brief(double bogo_ops, double real_time, double usr_time, double sys_time);

/// Extracts the real-time bogo ops/s of the cpu stressor from stress-ng
/// output; nullopt when no cpu metrics line is present.
std::optional<double> parse_bogo_ops_per_sec(std::string_view output);

}  // namespace edgegov::orch
