#pragma once

#include <string>

#include "edgegov/core/stream_model.hpp"
#include "json.hpp"

namespace edgegov::sim {

/// p(f) = P0 + c1*g + c3*g^3 + cn*g^n with g the frequency in GHz.
///
/// The high-order term models the steep power knee near the top of the
/// ladder; set cn = 0 for a plain cubic.
struct PowerCurve {
    double P0{0.0};
    double c1{0.0};
    double c3{0.0};
    double cn{0.0};
    double n{3.0};

    double operator()(Kilohertz f) const;
};

/// Ground-truth synthetic device. Throughput is linear in frequency:
/// throughput_at(f) = a * g, g in GHz.
class DeviceProfile {
public:
    DeviceProfile(std::string name, core::FrequencyLadder ladder, double throughput_per_ghz,
                  PowerCurve p_full, PowerCurve p_idle, double noise_sd);

    const std::string& name() const { return name_; }
    const core::FrequencyLadder& ladder() const { return ladder_; }
    double noise_sd() const { return noise_sd_; }
    double throughput_per_ghz() const { return a_; }
    const PowerCurve& full_curve() const { return p_full_; }
    const PowerCurve& idle_curve() const { return p_idle_; }

    double throughput_at(Kilohertz f) const { return a_ * f.ghz(); }
    double p_full_at(Kilohertz f) const { return p_full_(f); }
    double p_idle_at(Kilohertz f) const { return p_idle_(f); }

    DeviceProfile with_noise(double noise_sd) const;

private:
    void validate() const;

    std::string name_;
    core::FrequencyLadder ladder_;
    double a_;
    PowerCurve p_full_;
    PowerCurve p_idle_;
    double noise_sd_;
};

/// Raspberry-Pi-4-like node: 13 rungs from 600 to 1800 MHz, 4.75 W at full
/// load on the top rung, 2.0 W on the bottom rung, efficiency peak at 1500 MHz.
DeviceProfile default_profile();

inline constexpr double kDefaultNoiseSd = 0.02;

/// Returns the config for an exact rung; rejects off-ladder frequencies with
/// an error listing every valid rung.
core::NodeConfig set_frequency(const DeviceProfile& profile, Kilohertz freq);

nlohmann::json to_json(const DeviceProfile& profile);
DeviceProfile profile_from_json(const nlohmann::json& j);

DeviceProfile load_profile(const std::string& path);
void save_profile(const DeviceProfile& profile, const std::string& path);

}  // namespace edgegov::sim
