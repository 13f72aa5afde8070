#include "edgegov/core/stream_model.hpp"

#include <algorithm>
#include <cmath>

#include "edgegov/errors.hpp"

namespace edgegov::core {

namespace {

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw DomainError(name, "must be finite");
}

}  // namespace

void StreamSpec::validate() const {
    require_finite(d, "d");
    require_finite(k, "k");
    if (d <= 0.0) throw DomainError("d", "inter-arrival interval must be > 0");
    if (k < 0.0) throw DomainError("k", "work per token must be >= 0");
}

FrequencyLadder::FrequencyLadder(std::vector<Kilohertz> rungs) : rungs_(std::move(rungs)) {
    if (rungs_.empty()) throw DomainError("ladder", "must contain at least one rung");
    if (rungs_.front().value <= 0) throw DomainError("ladder", "rungs must be > 0 kHz");
    if (std::adjacent_find(rungs_.begin(), rungs_.end(),
                           [](Kilohertz a, Kilohertz b) { return !(a < b); }) != rungs_.end())
        throw DomainError("ladder", "rungs must be strictly increasing");
}

FrequencyLadder FrequencyLadder::uniform(Kilohertz lo, Kilohertz hi, Kilohertz step) {
    if (step.value <= 0) throw DomainError("step", "must be > 0");
    std::vector<Kilohertz> r;
    for (auto f = lo.value; f <= hi.value; f += step.value) r.emplace_back(f);
    return FrequencyLadder(std::move(r));
}

bool FrequencyLadder::contains(Kilohertz f) const {
    return std::binary_search(rungs_.begin(), rungs_.end(), f);
}

std::size_t FrequencyLadder::index_of(Kilohertz f) const {
    auto it = std::lower_bound(rungs_.begin(), rungs_.end(), f);
    if (it == rungs_.end() || *it != f)
        throw DomainError("freq", std::to_string(f.value) + " kHz is not on the ladder; valid rungs: " +
                                      describe());
    return static_cast<std::size_t>(it - rungs_.begin());
}

std::string FrequencyLadder::describe() const {
    std::string out = "[";
    for (std::size_t i = 0; i < rungs_.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(rungs_[i].value);
    }
    return out + "] kHz";
}

PowerDraw PowerDraw::make(double w) {
    require_finite(w, "watts");
    if (w < 0.0) throw DomainError("watts", "power draw must be >= 0");
    return PowerDraw{w};
}

double processing_time(double k, double v) {
    require_finite(k, "k");
    require_finite(v, "v");
    if (v <= 0.0) throw DomainError("v", "processing speed must be > 0");
    if (k < 0.0) throw DomainError("k", "work per token must be >= 0");
    return k / v;
}

double slack(const StreamSpec& stream, double t_p) {
    stream.validate();
    require_finite(t_p, "t_p");
    if (t_p < 0.0) throw DomainError("t_p", "processing time must be >= 0");
    return stream.d - t_p;
}

double average_power(PowerDraw p_full, PowerDraw p_idle, double t_p, double t_d, double d) {
    require_finite(p_full.watts, "p_full");
    require_finite(p_idle.watts, "p_idle");
    require_finite(t_p, "t_p");
    require_finite(t_d, "t_d");
    require_finite(d, "d");
    if (d <= 0.0) throw DomainError("d", "must be > 0");
    if (t_p < 0.0) throw DomainError("t_p", "must be >= 0");
    if (t_d < 0.0) throw DomainError("t_d", "must be >= 0 (infeasible plan)");
    if (std::fabs(t_p + t_d - d) > kRelTol * d) throw DomainError("t_d", "t_p + t_d must equal d");
    // Exact endpoints: an all-idle or saturated interval returns the corresponding draw.
    if (t_p == 0.0) return p_idle.watts;
    if (t_d == 0.0) return p_full.watts;
    const double p = (p_full.watts * t_p + p_idle.watts * t_d) / d;
    const auto [lo, hi] = std::minmax(p_full.watts, p_idle.watts);
    return std::clamp(p, lo, hi);
}

PlanResult make_plan(const StreamSpec& stream, NodeConfig config, double v, PowerDraw p_full,
                     PowerDraw p_idle) {
    stream.validate();
    PowerDraw::make(p_full.watts);
    PowerDraw::make(p_idle.watts);
    const double t_p = processing_time(stream.k, v);
    const double t_d = slack(stream, t_p);
    if (t_d < 0.0) return Infeasible{config, t_d};
    const double avg = average_power(p_full, p_idle, t_p, t_d, stream.d);
    return SchedulePlan{config, t_p, t_d, avg, avg * stream.d};
}

}  // namespace edgegov::core
