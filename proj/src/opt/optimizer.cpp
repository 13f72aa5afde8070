#include "edgegov/opt/optimizer.hpp"

#include <future>
#include <thread>

#include "edgegov/errors.hpp"
#include "edgegov/io/atomic_file.hpp"
#include "edgegov/sim/stream_sim.hpp"

namespace edgegov::opt {

std::vector<RungCharacteristics> characterize(const fit::PowerModel& model) {
    std::vector<RungCharacteristics> out;
    for (auto f : model.ladder().rungs())
        out.push_back({{f},
                       fit::query_throughput(model, f),
                       core::PowerDraw::make(fit::query(model, f, 100.0)),
                       core::PowerDraw::make(fit::query(model, f, 0.0))});
    return out;
}

std::vector<RungCharacteristics> characterize(const sim::DeviceProfile& profile) {
    std::vector<RungCharacteristics> out;
    for (auto f : profile.ladder().rungs())
        out.push_back({{f}, profile.throughput_at(f), core::PowerDraw::make(profile.p_full_at(f)),
                       core::PowerDraw::make(profile.p_idle_at(f))});
    return out;
}

OptimizationResult optimize(const std::vector<RungCharacteristics>& rungs, const core::StreamSpec& stream) {
    stream.validate();
    if (rungs.empty()) throw DomainError("rungs", "nothing to optimize over");
    OptimizationResult out{stream, std::nullopt, {}};
    out.per_rung.reserve(rungs.size());
    for (const auto& r : rungs) {
        auto plan = core::make_plan(stream, r.config, r.throughput, r.p_full, r.p_idle);
        if (const auto* p = std::get_if<core::SchedulePlan>(&plan)) {
            // strict < keeps the lower rung on ties; rungs arrive in ascending order
            if (!out.best || p->avg_power < out.best->avg_power ||
                (p->avg_power == out.best->avg_power && p->config.freq < out.best->config.freq))
                out.best = *p;
        }
        out.per_rung.push_back(std::move(plan));
    }
    return out;
}

OptimizationResult optimize(const fit::PowerModel& model, const core::StreamSpec& stream) {
    return optimize(characterize(model), stream);
}

OptimizationResult optimize(const sim::DeviceProfile& profile, const core::StreamSpec& stream) {
    return optimize(characterize(profile), stream);
}

std::vector<SweepCell> sweep(const std::vector<RungCharacteristics>& rungs, const std::vector<double>& d_values,
                             const std::vector<double>& k_values) {
    if (d_values.empty()) throw DomainError("d_values", "sweep axis must not be empty");
    if (k_values.empty()) throw DomainError("k_values", "sweep axis must not be empty");
    for (double d : d_values)
        for (double k : k_values) core::StreamSpec::make(d, k);

    std::vector<SweepCell> cells;
    cells.reserve(d_values.size() * k_values.size());
    for (double d : d_values)
        for (double k : k_values) cells.push_back({d, k, {}});

    const std::size_t workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < cells.size(); i += workers)
                cells[i].result = optimize(rungs, core::StreamSpec{cells[i].d, cells[i].k});
        }));
    for (auto& j : jobs) j.get();
    return cells;
}

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
    std::string out(kSweepHeader);
    out += '\n';
    for (const auto& c : cells) {
        out += io::format_double(c.d) + ',' + io::format_double(c.k) + ',';
        if (const auto& b = c.result.best) {
            out += std::to_string(b->config.freq.value) + ',' + io::format_double(b->avg_power) + ',' +
                   io::format_double(b->energy_per_token) + ",true\n";
        } else {
            out += ",,,false\n";
        }
    }
    return out;
}

nlohmann::json GovernorComparison::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows)
        rows_json.push_back({{"policy", r.policy},
                             {"energy_j", r.energy},
                             {"backlog_max", r.backlog_max},
                             {"dropped", r.dropped},
                             {"avg_freq_khz", r.avg_freq_khz}});
    nlohmann::json j{{"rows", rows_json}};
    if (optimal) {
        j["baseline"] = {{"freq_khz", optimal->config.freq.value},
                         {"avg_power_w", optimal->avg_power},
                         {"energy_per_token_j", optimal->energy_per_token},
                         {"energy_j", *baseline_energy}};
    } else {
        j["baseline"] = nullptr;
    }
    return j;
}

std::vector<sim::GovernorPolicy> default_policies(Kilohertz pin) {
    return {sim::governor::Performance{}, sim::governor::Powersave{}, sim::governor::Userspace{pin},
            sim::governor::Ondemand{},    sim::governor::Conservative{}, sim::governor::Schedutil{}};
}

GovernorComparison compare_governors(const sim::DeviceProfile& profile, const core::StreamSpec& stream,
                                     std::size_t n_tokens, const std::vector<sim::GovernorPolicy>& policies,
                                     std::size_t queue_capacity) {
    const auto quiet = profile.with_noise(0.0);
    GovernorComparison out;
    const auto best = optimize(quiet, stream);
    if (best.best) {
        out.optimal = best.best;
        out.baseline_energy = best.best->energy_per_token * static_cast<double>(n_tokens);
    }
    for (const auto& policy : policies) {
        const auto trace = sim::simulate_stream(quiet, policy, stream, n_tokens, queue_capacity);
        out.rows.push_back({sim::policy_name(policy), trace.energy, trace.backlog_max, trace.dropped, trace.avg_freq_khz()});
    }
    return out;
}

}  // namespace edgegov::opt
