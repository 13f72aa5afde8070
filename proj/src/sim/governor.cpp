#include "edgegov/sim/governor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "edgegov/errors.hpp"

namespace edgegov::sim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_threshold(double t, const char* name) {
    if (!(t > 0.0 && t <= 100.0)) throw DomainError(name, "threshold must lie in (0, 100]");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty()) throw DomainError(what, "not a number: '" + s + "'");
    return v;
}

// Lowest rung whose frequency is at least `target_khz` (up to rounding), else the top rung.
core::NodeConfig lowest_at_least(const core::FrequencyLadder& ladder, double target_khz) {
    const double target = target_khz * (1.0 - kRelTol);
    for (auto f : ladder.rungs())
        if (static_cast<double>(f.value) >= target) return {f};
    return {ladder.highest()};
}

}  // namespace

void validate(const GovernorPolicy& policy) {
    std::visit(overloaded{
                   [](const governor::Performance&) {},
                   [](const governor::Powersave&) {},
                   [](const governor::Userspace& u) {
                       if (u.fixed.value <= 0) throw DomainError("userspace", "fixed rung must be > 0");
                   },
                   [](const governor::Ondemand& o) { check_threshold(o.up_threshold, "up_threshold"); },
                   [](const governor::Conservative& c) {
                       check_threshold(c.up_threshold, "up_threshold");
                       check_threshold(c.down_threshold, "down_threshold");
                       if (!(c.down_threshold < c.up_threshold))
                           throw DomainError("down_threshold", "must be below up_threshold");
                   },
                   [](const governor::Schedutil& s) {
                       if (!(std::isfinite(s.headroom) && s.headroom >= 1.0))
                           throw DomainError("headroom", "must be >= 1");
                   },
               },
               policy);
}

std::string policy_name(const GovernorPolicy& policy) {
    return std::visit(overloaded{
                          [](const governor::Performance&) -> std::string { return "performance"; },
                          [](const governor::Powersave&) -> std::string { return "powersave"; },
                          [](const governor::Userspace& u) {
                              return "userspace:" + std::to_string(u.fixed.value);
                          },
                          [](const governor::Ondemand&) -> std::string { return "ondemand"; },
                          [](const governor::Conservative&) -> std::string { return "conservative"; },
                          [](const governor::Schedutil&) -> std::string { return "schedutil"; },
                      },
                      policy);
}

GovernorPolicy parse_policy(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.empty()) throw DomainError("policy", "empty policy name");
    const auto& name = parts[0];
    const auto argc = parts.size() - 1;
    auto arg = [&](std::size_t i, const char* what) { return parse_number(parts[i], what); };
    GovernorPolicy p;
    if (name == "performance" && argc == 0) {
        p = governor::Performance{};
    } else if (name == "powersave" && argc == 0) {
        p = governor::Powersave{};
    } else if (name == "userspace" && argc == 1) {
        p = governor::Userspace{Kilohertz{static_cast<std::int64_t>(arg(1, "userspace"))}};
    } else if (name == "ondemand" && argc <= 1) {
        governor::Ondemand o;
        if (argc == 1) o.up_threshold = arg(1, "up_threshold");
        p = o;
    } else if (name == "conservative" && (argc == 0 || argc == 2)) {
        governor::Conservative c;
        if (argc == 2) {
            c.up_threshold = arg(1, "up_threshold");
            c.down_threshold = arg(2, "down_threshold");
        }
        p = c;
    } else if (name == "schedutil" && argc <= 1) {
        governor::Schedutil s;
        if (argc == 1) s.headroom = arg(1, "headroom");
        p = s;
    } else {
        throw DomainError("policy", "unknown or malformed policy '" + text + "'");
    }
    validate(p);
    return p;
}

core::NodeConfig governor_step(const GovernorPolicy& policy, core::NodeConfig current, double utilization,
                               const core::FrequencyLadder& ladder) {
    utilization = std::clamp(utilization, 0.0, 100.0);
    const double f_top = static_cast<double>(ladder.highest().value);
    return std::visit(
        overloaded{
            [&](const governor::Performance&) { return core::NodeConfig{ladder.highest()}; },
            [&](const governor::Powersave&) { return core::NodeConfig{ladder.lowest()}; },
            [&](const governor::Userspace& u) {
                ladder.index_of(u.fixed);
                return core::NodeConfig{u.fixed};
            },
            [&](const governor::Ondemand& o) {
                if (utilization > o.up_threshold) return core::NodeConfig{ladder.highest()};
                return lowest_at_least(ladder, f_top * utilization / 100.0);
            },
            [&](const governor::Conservative& c) {
                const auto i = ladder.index_of(current.freq);
                if (utilization > c.up_threshold && i + 1 < ladder.size()) return core::NodeConfig{ladder[i + 1]};
                if (utilization < c.down_threshold && i > 0) return core::NodeConfig{ladder[i - 1]};
                return current;
            },
            [&](const governor::Schedutil& s) {
                return lowest_at_least(ladder, s.headroom * f_top * utilization / 100.0);
            },
        },
        policy);
}

}  // namespace edgegov::sim
