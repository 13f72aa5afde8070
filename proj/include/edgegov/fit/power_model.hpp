#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edgegov/core/stream_model.hpp"
#include "edgegov/orch/campaign.hpp"
#include "json.hpp"

namespace edgegov::fit {

/// Measured power surface over (rung, load) plus the throughput and idle
/// curves derived from it. Rows follow the ladder, columns follow `loads`,
/// which always start with the idle column (0 %) and end with 100 %.
class PowerModel {
public:
    PowerModel(core::FrequencyLadder ladder, std::vector<int> loads, Eigen::MatrixXd power_grid,
               Eigen::VectorXd throughput_curve, std::vector<std::string> warnings = {});

    const core::FrequencyLadder& ladder() const { return ladder_; }
    const std::vector<int>& loads() const { return loads_; }
    const Eigen::MatrixXd& power_grid() const { return power_grid_; }
    const Eigen::VectorXd& throughput_curve() const { return throughput_; }
    Eigen::VectorXd idle_curve() const { return power_grid_.col(0); }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Bilinear in (frequency, load), clamped to the grid hull; exact at nodes.
    double power(double freq_khz, double load_pct) const;
    /// Linear in frequency, clamped to the ladder; exact at rungs.
    double throughput(double freq_khz) const;

private:
    core::FrequencyLadder ladder_;
    std::vector<int> loads_;
    Eigen::MatrixXd power_grid_;
    Eigen::VectorXd throughput_;
    std::vector<std::string> warnings_;
};

/// Averages repetitions per (rung, load) cell. Throughput comes from the
/// 100 % cells and idle power from the 0 % cells.
///
/// Throws FormatError listing every missing cell when the grid is
/// incomplete. Non-monotone throughput or idle power above a loaded cell
/// only add a warning.
PowerModel fit(std::span<const orch::BenchmarkRecord> records);

inline double query(const PowerModel& m, Kilohertz f, double load_pct) {
    return m.power(static_cast<double>(f.value), load_pct);
}
inline double query_throughput(const PowerModel& m, Kilohertz f) {
    return m.throughput(static_cast<double>(f.value));
}

/// Ops per joule over the grid and its normalisation by the global maximum.
struct EfficiencyGrid {
    Eigen::MatrixXd raw;
    Eigen::MatrixXd values;
    Eigen::Index best_row{0};
    Eigen::Index best_col{0};
};

/// raw(f, u) = throughput(f) * u/100 / power(f, u); the idle column is 0.
/// The argmax breaks ties toward the lowest frequency, then the lowest load.
EfficiencyGrid efficiency(const PowerModel& model);

nlohmann::json to_json(const PowerModel& model);
/// Throws FormatError naming the offending field.
PowerModel model_from_json(const nlohmann::json& j);

PowerModel load_model(const std::string& path);
void save_model(const PowerModel& model, const std::string& path);

}  // namespace edgegov::fit
