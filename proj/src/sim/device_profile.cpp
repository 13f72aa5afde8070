#include "edgegov/sim/device_profile.hpp"

#include <cmath>
#include <fstream>

#include "edgegov/errors.hpp"
#include "edgegov/io/atomic_file.hpp"

namespace edgegov::sim {

double PowerCurve::operator()(Kilohertz f) const {
    const double g = f.ghz();
    return P0 + c1 * g + c3 * g * g * g + cn * std::pow(g, n);
}

DeviceProfile::DeviceProfile(std::string name, core::FrequencyLadder ladder, double throughput_per_ghz,
                             PowerCurve p_full, PowerCurve p_idle, double noise_sd)
    : name_(std::move(name)),
      ladder_(std::move(ladder)),
      a_(throughput_per_ghz),
      p_full_(p_full),
      p_idle_(p_idle),
      noise_sd_(noise_sd) {
    validate();
}

void DeviceProfile::validate() const {
    if (ladder_.size() == 0) throw DomainError("ladder", "must not be empty");
    if (!(std::isfinite(a_) && a_ > 0.0)) throw DomainError("throughput.a", "must be finite and > 0");
    if (!(noise_sd_ >= 0.0 && noise_sd_ <= 0.1)) throw DomainError("noise_sd", "must lie in [0, 0.1]");
    double prev_full = 0.0, prev_idle = 0.0;
    for (std::size_t i = 0; i < ladder_.size(); ++i) {
        const auto f = ladder_[i];
        const double full = p_full_at(f), idle = p_idle_at(f);
        if (!(std::isfinite(full) && std::isfinite(idle)))
            throw DomainError("power", "non-finite power at " + to_string(f));
        if (!(idle > 0.0)) throw DomainError("p_idle", "must be > 0 at " + to_string(f));
        if (!(full > idle)) throw DomainError("power", "p_full must exceed p_idle at " + to_string(f));
        if (i > 0 && (full < prev_full || idle < prev_idle))
            throw DomainError("power", "power curves must be non-decreasing on the ladder");
        prev_full = full;
        prev_idle = idle;
    }
}

DeviceProfile DeviceProfile::with_noise(double noise_sd) const {
    return DeviceProfile(name_, ladder_, a_, p_full_, p_idle_, noise_sd);
}

DeviceProfile default_profile() {
    // Full-load anchors: 2.0 W at 0.6 GHz and 4.75 W at 1.8 GHz. The linear
    // slope and the knee order are chosen so that p_full stays within
    // [2.0, 2.5] W up to 1.2 GHz and ops/W peaks on the 1.5 GHz rung.
    // cn = (4.75 - 2.0 - 0.5*1.2) / (1.8^16 - 0.6^16), P0 = 2.0 - 0.5*0.6 - cn*0.6^16,
    // both pinned to the doubles that reproduce the anchors exactly.
    constexpr double lo = 0.6;
    PowerCurve full;
    full.c1 = 0.5;
    full.n = 16.0;
    full.cn = 0x1.734927cf709e7p-13;
    full.P0 = 0x1.b333325caf491p+0;

    // Idle draw: 1.9 W at the bottom rung, rising linearly with frequency.
    PowerCurve idle;
    idle.c1 = 0.55;
    idle.P0 = 1.9 - idle.c1 * lo;

    return DeviceProfile("rpi4-like",
                         core::FrequencyLadder::uniform(Kilohertz::from_mhz(600), Kilohertz::from_mhz(1800),
                                                        Kilohertz::from_mhz(100)),
                         1000.0, full, idle, kDefaultNoiseSd);
}

core::NodeConfig set_frequency(const DeviceProfile& profile, Kilohertz freq) {
    profile.ladder().index_of(freq);
    return core::NodeConfig{freq};
}

namespace {

nlohmann::json curve_json(const PowerCurve& c) {
    return {{"P0", c.P0}, {"c1", c.c1}, {"c3", c.c3}, {"cn", c.cn}, {"n", c.n}};
}

PowerCurve curve_from(const nlohmann::json& j, const char* field) {
    if (!j.is_object()) throw FormatError(std::string("profile: '") + field + "' must be an object");
    PowerCurve c;
    c.P0 = j.value("P0", 0.0);
    c.c1 = j.value("c1", 0.0);
    c.c3 = j.value("c3", 0.0);
    c.cn = j.value("cn", 0.0);
    c.n = j.value("n", 3.0);
    return c;
}

}  // namespace

nlohmann::json to_json(const DeviceProfile& p) {
    nlohmann::json ladder = nlohmann::json::array();
    for (auto f : p.ladder().rungs()) ladder.push_back(f.value);
    return {{"name", p.name()},
            {"ladder_khz", ladder},
            {"throughput", {{"a", p.throughput_per_ghz()}}},
            {"power", curve_json(p.full_curve())},
            {"p_idle", curve_json(p.idle_curve())},
            {"noise_sd", p.noise_sd()}};
}

DeviceProfile profile_from_json(const nlohmann::json& j) {
    try {
        for (const char* key : {"name", "ladder_khz", "throughput", "power", "p_idle"})
            if (!j.contains(key)) throw FormatError(std::string("profile: missing field '") + key + "'");
        std::vector<Kilohertz> rungs;
        for (const auto& v : j.at("ladder_khz")) rungs.emplace_back(v.get<std::int64_t>());
        return DeviceProfile(j.at("name").get<std::string>(), core::FrequencyLadder(std::move(rungs)),
                             j.at("throughput").at("a").get<double>(), curve_from(j.at("power"), "power"),
                             curve_from(j.at("p_idle"), "p_idle"), j.value("noise_sd", kDefaultNoiseSd));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("profile: ") + e.what());
    }
}

DeviceProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile '" + path + "'");
    try {
        return profile_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("profile '" + path + "': " + e.what());
    }
}

void save_profile(const DeviceProfile& profile, const std::string& path) {
    io::write_atomic(path, to_json(profile).dump(2) + "\n");
}

}  // namespace edgegov::sim
