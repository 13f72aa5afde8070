#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edgegov/orch/transport.hpp"
#include "json.hpp"

namespace edgegov::orch {

/// One benchmarking campaign: every config in `configs` is swept across an
/// idle cell and then every load in `loads`.
struct CampaignSpec {
    std::vector<core::NodeConfig> configs;
    std::vector<int> loads{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    double stress_duration{15.0};
    double settle_wait{0.0};
    int repetitions{1};
    std::uint64_t seed{0};

    /// Throws DomainError; runs before any transport call.
    void validate() const;
};

CampaignSpec campaign_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CampaignSpec& spec);

struct BenchmarkRecord {
    core::NodeConfig config;
    int load_pct{0};
    double bogo_ops_per_sec{0.0};
    double power{0.0};
    double duration{0.0};
    int repetition{0};
    double timestamp{0.0};

    friend bool operator==(const BenchmarkRecord&, const BenchmarkRecord&) = default;
};

struct CellFailure {
    core::NodeConfig config;
    int load_pct{0};
    int repetition{0};
    std::string reason;
};

struct CampaignResult {
    std::vector<BenchmarkRecord> records;
    std::vector<CellFailure> skipped;     // cells whose configuration was rejected
    std::optional<CellFailure> aborted;   // set when a timeout stopped the campaign

    bool complete() const { return skipped.empty() && !aborted; }
};

using Clock = std::function<double()>;

/// Seconds since the epoch from the system clock.
double wall_clock();

/// Seed for one (config, load, repetition) cell, derived from the campaign seed.
std::uint64_t cell_seed(std::uint64_t campaign_seed, core::NodeConfig config, int load_pct, int repetition);

/// Runs the benchmarking loop nest: configs outer, then the idle cell and
/// each load, then repetitions. Each cell applies the config, settles,
/// stresses, settles again, then reads power and metrics.
///
/// A rejected configuration skips that cell and records it in `skipped`.
/// A timeout stops the campaign; records gathered so far are kept.
CampaignResult run_campaign(SutTransport& transport, const CampaignSpec& spec, const Clock& clock = wall_clock);

}  // namespace edgegov::orch
