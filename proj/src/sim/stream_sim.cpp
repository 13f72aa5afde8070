#include "edgegov/sim/stream_sim.hpp"

#include <algorithm>
#include <deque>

#include "edgegov/errors.hpp"

namespace edgegov::sim {

double StreamTrace::avg_freq_khz() const {
    if (tokens.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : tokens) sum += static_cast<double>(t.freq_used.value);
    return sum / static_cast<double>(tokens.size());
}

namespace {

// a is strictly later than b, ignoring rounding noise.
bool later(double a, double b) { return a - b > kRelTol * std::max({1.0, std::fabs(a), std::fabs(b)}); }

}  // namespace

StreamTrace simulate_stream(const DeviceProfile& profile, const FrequencyControl& control,
                            const core::StreamSpec& stream, std::size_t n_tokens, std::size_t queue_capacity) {
    stream.validate();
    if (n_tokens < 1) throw DomainError("n_tokens", "must be >= 1");

    const auto& ladder = profile.ladder();
    core::NodeConfig current{ladder.highest()};
    const GovernorPolicy* policy = std::get_if<GovernorPolicy>(&control);
    if (policy) {
        validate(*policy);
    } else {
        current = set_frequency(profile, std::get<core::NodeConfig>(control).freq);
    }

    StreamTrace trace;
    trace.tokens.reserve(n_tokens);
    std::deque<double> pending_starts;  // start times of admitted tokens, FIFO
    double last_finish = 0.0;
    double idle_energy = 0.0;
    double busy_energy = 0.0;
    double idle_rate = profile.p_idle_at(current.freq);

    for (std::size_t i = 0; i < n_tokens; ++i) {
        const double arrival = static_cast<double>(i) * stream.d;
        while (!pending_starts.empty() && !later(pending_starts.front(), arrival)) pending_starts.pop_front();
        const bool busy = later(last_finish, arrival);
        if (busy && pending_starts.size() >= queue_capacity) {
            ++trace.dropped;
            continue;
        }

        const double start = busy ? last_finish : arrival;
        if (policy) {
            const double util =
                std::min(100.0, 100.0 * stream.k / (stream.d * profile.throughput_at(current.freq)));
            current = governor_step(*policy, current, util, ladder);
        }
        if (start > last_finish) idle_energy += idle_rate * (start - last_finish);
        idle_rate = profile.p_idle_at(current.freq);

        const double t_p = core::processing_time(stream.k, profile.throughput_at(current.freq));
        const double finish = start + t_p;
        busy_energy += profile.p_full_at(current.freq) * t_p;
        trace.tokens.push_back({i, arrival, start, finish, current.freq});
        last_finish = finish;

        if (busy) pending_starts.push_back(start);
        trace.backlog_max = std::max(trace.backlog_max, pending_starts.size());
    }

    trace.horizon = std::max(static_cast<double>(n_tokens) * stream.d, last_finish);
    idle_energy += idle_rate * (trace.horizon - last_finish);
    trace.energy = busy_energy + idle_energy;
    return trace;
}

}  // namespace edgegov::sim
