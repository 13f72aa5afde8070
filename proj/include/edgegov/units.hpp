#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace edgegov {

/// CPU clock frequency in integer kilohertz, the unit cpufreq uses.
struct Kilohertz {
    std::int64_t value{0};

    constexpr Kilohertz() = default;
    constexpr explicit Kilohertz(std::int64_t khz) : value(khz) {}

    static constexpr Kilohertz from_mhz(std::int64_t mhz) { return Kilohertz{mhz * 1000}; }

    constexpr double ghz() const { return static_cast<double>(value) / 1e6; }
    constexpr double mhz() const { return static_cast<double>(value) / 1e3; }

    friend constexpr auto operator<=>(Kilohertz, Kilohertz) = default;
};

inline std::string to_string(Kilohertz f) { return std::to_string(f.value) + " kHz"; }

/// Relative tolerance used for all time/energy comparisons.
inline constexpr double kRelTol = 1e-9;

/// |a - b| <= tol * max(|a|, |b|, scale); scale guards comparisons against zero.
inline bool approx_equal(double a, double b, double tol = kRelTol, double scale = 0.0) {
    const double mag = std::fmax(std::fmax(std::fabs(a), std::fabs(b)), scale);
    return std::fabs(a - b) <= tol * mag;
}

}  // namespace edgegov
