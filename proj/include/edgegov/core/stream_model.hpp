#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "edgegov/units.hpp"

namespace edgegov::core {

/// A sensor stream: one token every `d` seconds, each costing `k` bogo-ops.
struct StreamSpec {
    double d{1.0};
    double k{0.0};

    /// Throws DomainError unless d > 0, k >= 0 and both finite.
    void validate() const;

    /// Demand rate k/d in bogo-ops per second.
    double demand_rate() const { return k / d; }

    static StreamSpec make(double d, double k) {
        StreamSpec s{d, k};
        s.validate();
        return s;
    }
};

/// One selectable rung of a frequency ladder.
struct NodeConfig {
    Kilohertz freq;

    friend constexpr auto operator<=>(const NodeConfig&, const NodeConfig&) = default;
};

/// Strictly increasing, non-empty set of frequency rungs.
class FrequencyLadder {
public:
    FrequencyLadder() = default;
    explicit FrequencyLadder(std::vector<Kilohertz> rungs);

    /// Evenly spaced rungs from lo to hi inclusive.
    static FrequencyLadder uniform(Kilohertz lo, Kilohertz hi, Kilohertz step);

    std::span<const Kilohertz> rungs() const { return rungs_; }
    std::size_t size() const { return rungs_.size(); }
    Kilohertz operator[](std::size_t i) const { return rungs_[i]; }
    Kilohertz lowest() const { return rungs_.front(); }
    Kilohertz highest() const { return rungs_.back(); }

    bool contains(Kilohertz f) const;
    /// Index of f on the ladder; throws DomainError listing the valid rungs otherwise.
    std::size_t index_of(Kilohertz f) const;
    std::string describe() const;

    friend bool operator==(const FrequencyLadder&, const FrequencyLadder&) = default;

private:
    std::vector<Kilohertz> rungs_;
};

struct PowerDraw {
    double watts{0.0};

    static PowerDraw make(double w);
};

struct SchedulePlan {
    NodeConfig config;
    double t_p{0.0};
    double t_d{0.0};
    double avg_power{0.0};
    double energy_per_token{0.0};
};

/// The node cannot keep up: processing one token takes longer than d.
struct Infeasible {
    NodeConfig config;
    double t_d{0.0};  // negative slack
};

using PlanResult = std::variant<SchedulePlan, Infeasible>;

inline bool is_feasible(const PlanResult& r) { return std::holds_alternative<SchedulePlan>(r); }

/// t_p = k / v.
double processing_time(double k, double v);

/// t_d = d - t_p. Negative values mean the node falls behind.
double slack(const StreamSpec& stream, double t_p);

/// (p_full * t_p + p_idle * t_d) / d. Requires t_p, t_d >= 0 and t_p + t_d = d.
double average_power(PowerDraw p_full, PowerDraw p_idle, double t_p, double t_d, double d);

/// Composes the three functions above. Slack of exactly zero counts as feasible.
PlanResult make_plan(const StreamSpec& stream, NodeConfig config, double v, PowerDraw p_full,
                     PowerDraw p_idle);

}  // namespace edgegov::core
