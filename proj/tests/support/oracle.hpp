#pragma once

// Test-only oracles and generators. Nothing here calls into the optimizer or
// the core plan functions; the objective is recomputed from scratch.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "edgegov/sim/device_profile.hpp"

namespace oracle {

struct Rung {
    std::int64_t khz;
    double v;
    double p_full;
    double p_idle;
};

struct Choice {
    std::int64_t khz;
    double avg_power;
};

inline std::vector<Rung> rungs_of(const edgegov::sim::DeviceProfile& p) {
    std::vector<Rung> out;
    for (auto f : p.ladder().rungs()) out.push_back({f.value, p.throughput_at(f), p.p_full_at(f), p.p_idle_at(f)});
    return out;
}

/// Enumerates every rung, keeps those that finish a token within d, and
/// returns the lowest (p_full*t_p + p_idle*(d - t_p))/d, preferring lower
/// frequencies on ties.
inline std::optional<Choice> brute_force(const std::vector<Rung>& rungs, double d, double k) {
    std::optional<Choice> best;
    for (const auto& r : rungs) {
        const double busy = k / r.v;
        if (busy > d) continue;
        const double idle = d - busy;
        const double p = (r.p_full * busy + r.p_idle * idle) / d;
        if (!best || p < best->avg_power || (p == best->avg_power && r.khz < best->khz)) best = Choice{r.khz, p};
    }
    return best;
}

/// Random profile satisfying the DeviceProfile invariants: every power-curve
/// coefficient is non-negative (so curves are non-decreasing for f > 0) and
/// p_full = p_idle + a strictly positive curve.
inline edgegov::sim::DeviceProfile random_profile(std::mt19937_64& rng) {
    using edgegov::Kilohertz;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 20);
    std::uniform_int_distribution<int> start_mhz(200, 1000);
    std::uniform_int_distribution<int> step_mhz(25, 250);

    const int n = count(rng);
    const std::int64_t start = start_mhz(rng), step = step_mhz(rng);
    std::vector<Kilohertz> rungs;
    for (int i = 0; i < n; ++i) rungs.push_back(Kilohertz::from_mhz(start + i * step));

    edgegov::sim::PowerCurve idle{0.3 + 2.7 * u(rng), u(rng), 0.2 * u(rng), 0.0, 3.0};
    edgegov::sim::PowerCurve full = idle;
    full.P0 += 0.05 + 2.0 * u(rng);
    full.c1 += 2.0 * u(rng);
    full.c3 += 0.5 * u(rng);
    full.n = 4.0 + 8.0 * u(rng);
    full.cn = 0.01 * u(rng) * u(rng);
    const double a = 200.0 + 2800.0 * u(rng);
    return edgegov::sim::DeviceProfile("random", edgegov::core::FrequencyLadder(std::move(rungs)), a, full, idle, 0.0);
}

struct Stream {
    double d;
    double k;
};

/// d log-uniform in [1e-3, 10] s; demand uniform in [0, 1.2] x top-rung
/// throughput, so roughly one stream in six is infeasible everywhere. One in
/// twenty has k = 0.
inline Stream random_stream(std::mt19937_64& rng, double top_throughput) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double d = std::pow(10.0, -3.0 + 4.0 * u(rng));
    if (u(rng) < 0.05) return {d, 0.0};
    return {d, d * top_throughput * 1.2 * u(rng)};
}

}  // namespace oracle
