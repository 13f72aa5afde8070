#include "edgegov/orch/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "edgegov/errors.hpp"

namespace edgegov::orch {

void CampaignSpec::validate() const {
    if (configs.empty()) throw DomainError("configs", "at least one configuration is required");
    for (auto c : configs)
        if (c.freq.value <= 0) throw DomainError("configs", "frequencies must be > 0 kHz");
    if (loads.empty()) throw DomainError("loads", "at least one load is required");
    for (int x : loads)
        if (x < 1 || x > 100) throw DomainError("loads", "loads must lie in [1, 100]");
    if (std::adjacent_find(loads.begin(), loads.end(), [](int a, int b) { return a >= b; }) != loads.end())
        throw DomainError("loads", "loads must be strictly ascending");
    if (!(std::isfinite(stress_duration) && stress_duration > 0.0))
        throw DomainError("stress_duration", "must be > 0");
    if (!(std::isfinite(settle_wait) && settle_wait >= 0.0)) throw DomainError("settle_wait", "must be >= 0");
    if (repetitions < 1) throw DomainError("repetitions", "must be >= 1");
}

CampaignSpec campaign_from_json(const nlohmann::json& j) {
    CampaignSpec s;
    try {
        if (j.contains("configs_khz")) {
            s.configs.clear();
            for (const auto& f : j.at("configs_khz")) s.configs.push_back({Kilohertz{f.get<std::int64_t>()}});
        }
        if (j.contains("loads")) s.loads = j.at("loads").get<std::vector<int>>();
        s.stress_duration = j.value("stress_duration_s", s.stress_duration);
        s.settle_wait = j.value("settle_wait_s", s.settle_wait);
        s.repetitions = j.value("repetitions", s.repetitions);
        s.seed = j.value("seed", s.seed);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("campaign spec: ") + e.what());
    }
    return s;
}

nlohmann::json to_json(const CampaignSpec& s) {
    std::vector<std::int64_t> khz;
    for (auto c : s.configs) khz.push_back(c.freq.value);
    return {{"configs_khz", khz},       {"loads", s.loads},
            {"stress_duration_s", s.stress_duration}, {"settle_wait_s", s.settle_wait},
            {"repetitions", s.repetitions}, {"seed", s.seed}};
}

double wall_clock() {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

std::uint64_t cell_seed(std::uint64_t campaign_seed, core::NodeConfig config, int load_pct, int repetition) {
    // splitmix64 over the cell coordinates
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(campaign_seed);
    h = mix(h ^ static_cast<std::uint64_t>(config.freq.value));
    h = mix(h ^ static_cast<std::uint64_t>(load_pct));
    return mix(h ^ static_cast<std::uint64_t>(repetition));
}

namespace {

std::string cell_name(core::NodeConfig c, int load) {
    return "(" + std::to_string(c.freq.value) + " kHz, " + std::to_string(load) + "%)";
}

}  // namespace

CampaignResult run_campaign(SutTransport& transport, const CampaignSpec& spec, const Clock& clock) {
    spec.validate();
    std::vector<int> cell_loads{0};
    cell_loads.insert(cell_loads.end(), spec.loads.begin(), spec.loads.end());

    CampaignResult result;
    result.records.reserve(spec.configs.size() * cell_loads.size() * static_cast<std::size_t>(spec.repetitions));
    for (const auto config : spec.configs) {
        for (const int load : cell_loads) {
            for (int rep = 0; rep < spec.repetitions; ++rep) {
                try {
                    transport.apply_config(config);
                    transport.wait(spec.settle_wait);
                    transport.invoke_stressor(load, spec.stress_duration, cell_seed(spec.seed, config, load, rep));
                    transport.wait(spec.settle_wait);
                    const double power = transport.read_power();
                    const auto metrics = transport.read_metrics();
                    result.records.push_back(
                        {config, load, metrics.bogo_ops_per_sec, power, spec.stress_duration, rep, clock()});
                } catch (const ConfigRejected& e) {
                    result.skipped.push_back({config, load, rep, cell_name(config, load) + ": " + e.what()});
                } catch (const TransportTimeout& e) {
                    result.aborted = CellFailure{config, load, rep, cell_name(config, load) + ": " + e.what()};
                    return result;
                }
            }
        }
    }
    return result;
}

}  // namespace edgegov::orch
